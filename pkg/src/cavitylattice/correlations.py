"""Intensity-intensity and intensity-field correlation functions.

Channel naming: the first letter picks the conditioning detection
(T = transmission, collapse with a; F = fluorescence, collapse with sigma_-),
the second letter the quantity measured at delay tau (T = cavity,
F = atomic).

  g2_XY(tau)      ratio of the Y-family photon/excitation population of the
                  X-collapsed state at tau to its steady-state value
  htheta_XY(tau)  ratio of the Y-family field quadrature of the X-collapsed
                  state to the steady-state theta = 0 quadrature

The weak-field quadrature sums are constructed as z + conj(z), hence real;
the imaginary part is asserted below 1e-10 as a bookkeeping guard instead of
being discarded silently.  The theta dependence enters as an exact overall
cos(theta) factor.

The tau = 0 sample is evaluated on the exact post-collapse bare amplitudes, so
structural zeros (fluorescence after a fluorescence collapse of a single atom)
are exact rather than truncation-limited.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from .dynamics import BareAmplitudes, build_generator
from .errors import DegenerateDenominatorError, InvalidInputError
from .lattice import LatticeSystem

CHANNELS = ("TT", "FF", "TF", "FT")

_IMAG_GUARD = 1.0e-10


@dataclass(frozen=True)
class CorrelationTrace:
    """One sampled correlation function over a tau grid."""

    kind: str             # "g2" or "htheta"
    channel: str          # TT | FF | TF | FT
    theta: float | None   # htheta only
    tau_grid: np.ndarray
    values: np.ndarray
    metadata: dict

    def value_at(self, tau: float) -> float:
        idx = int(np.argmin(np.abs(self.tau_grid - tau)))
        return float(self.values[idx])


def _system_snapshot(sys: LatticeSystem) -> dict:
    return dataclasses.asdict(sys)


def _check_channel(channel: str) -> str:
    if channel not in CHANNELS:
        raise InvalidInputError(f"channel must be one of {CHANNELS}, got {channel!r}")
    return channel


def _family_population(bare: BareAmplitudes, letter: str) -> float:
    """Sum of squared amplitudes of the measured family."""
    fam = bare.g1 if letter == "T" else bare.e0
    return float(np.sum(np.abs(fam) ** 2))


def _quadrature_sum(bare: BareAmplitudes, letter: str) -> float:
    """Real quadrature sum 2 Re sum_m conj(c_excited) c_ground for one family."""
    fam = bare.g1 if letter == "T" else bare.e0
    s = np.sum(np.conj(fam) * bare.g0)
    q = s + np.conj(s)
    scale = max(1.0, abs(s))
    if abs(q.imag) > _IMAG_GUARD * scale:
        raise InvalidInputError(
            f"quadrature sum lost realness (imag {q.imag:.3e}); bookkeeping bug"
        )
    return float(q.real)


def _conditional_bares(sys, fc_tables, weights, collapse_kind, tau_grid):
    """Steady state, collapse, evolve; bare amplitudes per grid point."""
    gen = build_generator(sys, fc_tables)
    ss = gen.steady_state(weights)
    ss_bare = gen.bare_amplitudes(ss)
    coll = gen.collapse(ss, collapse_kind)
    taus = np.asarray(tau_grid, dtype=float)
    bares = []
    for state in gen.evolve(coll.state, taus):
        if state.tau == 0.0:
            # exact operator action; keeps single-atom zeros exact
            bares.append(coll.bare)
        else:
            bares.append(gen.bare_amplitudes(state))
    return gen, ss_bare, coll, taus, bares


def g2(channel: str, sys: LatticeSystem, fc_tables: dict, weights, tau_grid) -> CorrelationTrace:
    """Second-order correlation g2_channel on the given tau grid."""
    channel = _check_channel(channel)
    gen, ss_bare, coll, taus, bares = _conditional_bares(
        sys, fc_tables, weights, channel[0], tau_grid
    )
    denom = _family_population(ss_bare, channel[1])
    if denom <= 0.0 or not np.isfinite(denom):
        raise DegenerateDenominatorError(
            f"steady state carries no {channel[1]}-family population"
        )
    values = np.array([_family_population(b, channel[1]) for b in bares]) / denom
    return CorrelationTrace(
        kind="g2", channel=channel, theta=None, tau_grid=taus,
        values=values, metadata=_system_snapshot(sys),
    )


def h_theta(
    channel: str,
    theta: float,
    sys: LatticeSystem,
    fc_tables: dict,
    weights,
    tau_grid,
    ft_denominator: str = "atomic",
) -> CorrelationTrace:
    """Intensity-field correlation h_theta for one channel.

    ``ft_denominator`` selects the steady-state quadrature normalizing the FT
    channel: "atomic" divides the conditioned cavity quadrature by the atomic
    steady-state quadrature (the published form), "cavity" by the cavity one
    (which restores h -> cos(theta) at late tau).
    """
    channel = _check_channel(channel)
    if ft_denominator not in ("atomic", "cavity"):
        raise InvalidInputError("ft_denominator must be 'atomic' or 'cavity'")
    gen, ss_bare, coll, taus, bares = _conditional_bares(
        sys, fc_tables, weights, channel[0], tau_grid
    )
    denom_letter = channel[1]
    if channel == "FT" and ft_denominator == "atomic":
        denom_letter = "F"
    denom = _quadrature_sum(ss_bare, denom_letter)
    if denom == 0.0 or not np.isfinite(denom):
        raise DegenerateDenominatorError(
            f"steady-state {denom_letter}-quadrature vanishes; h_theta undefined"
        )
    ratios = np.array([_quadrature_sum(b, channel[1]) for b in bares]) / denom
    values = np.cos(theta) * ratios
    return CorrelationTrace(
        kind="htheta", channel=channel, theta=float(theta), tau_grid=taus,
        values=values, metadata=_system_snapshot(sys),
    )


# -- serialization -------------------------------------------------------------


def trace_to_csv(trace: CorrelationTrace, path, sidecar: bool = True) -> None:
    """Write tau,value rows; a JSON sidecar carries the system snapshot."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("tau,value\n")
        for tau, value in zip(trace.tau_grid, trace.values):
            fh.write(f"{tau:.17g},{value:.17g}\n")
    if sidecar:
        meta = {
            "kind": trace.kind,
            "channel": trace.channel,
            "theta": trace.theta,
            "system": trace.metadata,
        }
        with open(f"{path}.meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def trace_from_csv(path) -> CorrelationTrace:
    """Read a trace written by trace_to_csv (sidecar optional)."""
    taus, values = [], []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "tau,value":
            raise InvalidInputError(f"unexpected trace header {header!r} in {path}")
        for line in fh:
            if not line.strip():
                continue
            a, b = line.split(",")
            taus.append(float(a))
            values.append(float(b))
    meta_path = f"{path}.meta.json"
    kind, channel, theta, metadata = "g2", "TT", None, {}
    try:
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        kind = meta.get("kind", kind)
        channel = meta.get("channel", channel)
        theta = meta.get("theta")
        metadata = meta.get("system", {})
    except FileNotFoundError:
        pass
    return CorrelationTrace(
        kind=kind, channel=channel, theta=theta,
        tau_grid=np.array(taus), values=np.array(values), metadata=metadata,
    )
