"""Detection of classical-inequality violations in correlation traces.

Flags and the inequalities they negate (epsilon is the detection tolerance):

  autocorrelations (TT or FF, g2):
    B    g2(0) > g2(tau)                (bunching: initial decrease)
    A    g2(0) < g2(tau)                (antibunching: initial increase)
    SUB  g2(0) < 1                      (sub-Poissonian)
    SUP  g2(0) > 1                      (super-Poissonian)
    OS   |g2(tau) - 1| > |g2(0) - 1|    (overshoot)
    US   |g2(tau) - 1| < |g2(0) - 1|    (undershoot)
  cross correlations (values at tau = 0):
    CV1  g2_TF/FT(0) > sqrt(g2_TT(0) g2_FF(0))
    CV2  g2_TF(0) - 1 > sqrt(max(g2_TT(0) - 1, 0))
  conditioned quadrature (htheta):
    S1   h(0) outside [1, 2]
    S2   |h(tau) - 1| > min(|h(0) - 1|, 1)

B/A are decided by the initial slope (first two grid samples) and
cross-checked against the global comparison; a disagreement is recorded as a
grid-resolution warning, never silently resolved.  The slope rule needs a
reasonably fine grid; spacing above MAX_SLOPE_SPACING also triggers a warning.

Every emitted flag carries a witness (tau, value, violated bound, margin) and
the report re-checks each witness against its inequality on construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .correlations import CorrelationTrace
from .errors import InvalidInputError

DEFAULT_EPSILON = 1.0e-9
MAX_SLOPE_SPACING = 0.25  # units 1/gamma; coarser grids get a warning

AUTO_FLAGS = ("B", "A", "SUB", "SUP", "OS", "US")
CROSS_FLAGS = ("CV1", "CV2")
HTHETA_FLAGS = ("S1", "S2")
ALL_FLAGS = AUTO_FLAGS + CROSS_FLAGS + HTHETA_FLAGS


@dataclass(frozen=True)
class Witness:
    """Maximal violation of one inequality: value at tau versus the bound."""

    tau: float
    value: float
    bound: float
    margin: float


def _margin_rule(name: str, witness: Witness) -> float:
    """Recompute the violation margin from the stored witness numbers."""
    if name in ("B", "US"):
        return witness.bound - witness.value
    if name in ("A", "SUP", "OS", "CV1", "CV2", "S2"):
        return witness.value - witness.bound
    if name == "SUB":
        return witness.bound - witness.value
    if name == "S1":
        # distance outside the [1, 2] window
        return max(1.0 - witness.value, witness.value - 2.0)
    raise InvalidInputError(f"unknown flag {name!r}")


@dataclass(frozen=True)
class ViolationReport:
    """Flags with witnesses for one trace (or one cross-correlation pair)."""

    flags: dict
    epsilon: float
    crossings: dict = field(default_factory=dict)
    warnings: tuple = ()

    def __post_init__(self):
        ok, detail = self.audit()
        if not ok:
            raise InvalidInputError(f"witness failed self-audit: {detail}")

    def audit(self) -> tuple[bool, str]:
        """Re-evaluate each witness against its inequality."""
        for name, witness in self.flags.items():
            margin = _margin_rule(name, witness)
            if not margin > self.epsilon:
                return False, f"{name}: margin {margin:.3e} <= eps {self.epsilon:.3e}"
            if abs(margin - witness.margin) > 1e-12 * max(1.0, abs(margin)):
                return False, f"{name}: stored margin {witness.margin!r} != {margin!r}"
        return True, ""

    def flag_names(self) -> tuple:
        return tuple(sorted(self.flags, key=ALL_FLAGS.index))

    def to_json(self) -> str:
        payload = {
            "epsilon": self.epsilon,
            "warnings": list(self.warnings),
            "crossings": dict(self.crossings),
            "flags": {
                name: {"tau": w.tau, "value": w.value, "bound": w.bound, "margin": w.margin}
                for name, w in self.flags.items()
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def merge_reports(*reports: ViolationReport) -> ViolationReport:
    """Union of flags from several reports (e.g. auto + cross + htheta)."""
    flags, crossings, warnings = {}, {}, []
    eps = reports[0].epsilon if reports else DEFAULT_EPSILON
    for rep in reports:
        flags.update(rep.flags)
        crossings.update(rep.crossings)
        warnings.extend(rep.warnings)
    return ViolationReport(flags=flags, epsilon=eps, crossings=crossings,
                           warnings=tuple(warnings))


def _check_trace(trace: CorrelationTrace, kind: str) -> None:
    if trace.tau_grid.size == 0 or trace.values.size == 0:
        raise InvalidInputError("empty trace")
    if trace.kind != kind:
        raise InvalidInputError(f"expected a {kind} trace, got {trace.kind!r}")


def classify_auto(trace: CorrelationTrace, epsilon: float = DEFAULT_EPSILON) -> ViolationReport:
    """B/A/SUB/SUP/OS/US flags for a TT or FF intensity autocorrelation."""
    _check_trace(trace, "g2")
    if trace.channel not in ("TT", "FF"):
        raise InvalidInputError(f"autocorrelation flags need TT or FF, got {trace.channel}")
    tau = trace.tau_grid
    g = trace.values
    g0 = float(g[0])
    flags: dict = {}
    warnings = []
    crossings = {}

    if tau.size >= 2 and tau[1] - tau[0] > MAX_SLOPE_SPACING:
        warnings.append(
            f"grid spacing {tau[1] - tau[0]:.3g} exceeds {MAX_SLOPE_SPACING}; "
            "initial-slope B/A may be unreliable"
        )

    # B/A: decided by the initial slope, witnessed by the extremal excursion.
    slope_pick = None
    if tau.size >= 2:
        if g[1] < g0 - epsilon:
            slope_pick = "B"
        elif g[1] > g0 + epsilon:
            slope_pick = "A"
    if slope_pick == "B":
        idx = int(np.argmin(g[1:])) + 1
        flags["B"] = Witness(float(tau[idx]), float(g[idx]), g0, g0 - float(g[idx]))
    elif slope_pick == "A":
        idx = int(np.argmax(g[1:])) + 1
        flags["A"] = Witness(float(tau[idx]), float(g[idx]), g0, float(g[idx]) - g0)

    global_b = bool(np.any(g[1:] < g0 - epsilon))
    global_a = bool(np.any(g[1:] > g0 + epsilon))
    global_pick = {"B"} if global_b and not global_a else {"A"} if global_a and not global_b else (
        {"B", "A"} if global_b and global_a else set()
    )
    if (slope_pick is None and global_pick) or (slope_pick and slope_pick not in global_pick) \
            or (slope_pick and len(global_pick) > 1):
        warnings.append(
            f"initial-slope rule ({slope_pick or 'none'}) and global comparison "
            f"({'/'.join(sorted(global_pick)) or 'none'}) disagree; grid may be too coarse"
        )

    if g0 < 1.0 - epsilon:
        flags["SUB"] = Witness(0.0, g0, 1.0, 1.0 - g0)
    elif g0 > 1.0 + epsilon:
        flags["SUP"] = Witness(0.0, g0, 1.0, g0 - 1.0)

    # OS/US compare excursions from 1 against the initial excursion.
    ref = abs(g0 - 1.0)
    exc = np.abs(g[1:] - 1.0)
    if np.any(exc > ref + epsilon):
        idx = int(np.argmax(exc)) + 1
        flags["OS"] = Witness(float(tau[idx]), float(abs(g[idx] - 1.0)), ref,
                              float(abs(g[idx] - 1.0)) - ref)
    if np.any(exc < ref - epsilon):
        idx = int(np.argmin(exc)) + 1
        flags["US"] = Witness(float(tau[idx]), float(abs(g[idx] - 1.0)), ref,
                              ref - float(abs(g[idx] - 1.0)))
    # Beat wiggles can cross the reference excursion many times; record counts.
    signs = np.sign(exc - ref)
    nonzero = signs[signs != 0]
    crossings["OSUS"] = int(np.sum(nonzero[1:] != nonzero[:-1])) if nonzero.size else 0

    return ViolationReport(flags=flags, epsilon=epsilon, crossings=crossings,
                           warnings=tuple(warnings))


def classify_cross(
    tf_trace: CorrelationTrace | None,
    ft_trace: CorrelationTrace | None,
    tt0: float,
    ff0: float,
    epsilon: float = DEFAULT_EPSILON,
) -> ViolationReport:
    """CV1/CV2 flags from the cross channels and the tau = 0 autocorrelations."""
    if tt0 < 0 or ff0 < 0:
        raise InvalidInputError("g2(0) inputs must be non-negative")
    flags: dict = {}
    bound_cv1 = float(np.sqrt(tt0 * ff0))
    best = None
    for trace in (tf_trace, ft_trace):
        if trace is None:
            continue
        _check_trace(trace, "g2")
        value = float(trace.values[0])
        if value < 0:
            raise InvalidInputError("cross correlation value must be non-negative")
        if value > bound_cv1 + epsilon and (best is None or value > best):
            best = value
    if best is not None:
        flags["CV1"] = Witness(0.0, best, bound_cv1, best - bound_cv1)
    if tf_trace is not None:
        tf0 = float(tf_trace.values[0])
        bound_cv2 = float(np.sqrt(max(tt0 - 1.0, 0.0))) + 1.0
        if tf0 > bound_cv2 + epsilon:
            flags["CV2"] = Witness(0.0, tf0, bound_cv2, tf0 - bound_cv2)
    return ViolationReport(flags=flags, epsilon=epsilon)


def classify_htheta(trace: CorrelationTrace, epsilon: float = DEFAULT_EPSILON) -> ViolationReport:
    """S1/S2 squeezing flags for a conditioned-quadrature trace."""
    _check_trace(trace, "htheta")
    tau = trace.tau_grid
    h = trace.values
    h0 = float(h[0])
    flags: dict = {}
    if h0 < 1.0 - epsilon or h0 > 2.0 + epsilon:
        margin = max(1.0 - h0, h0 - 2.0)
        flags["S1"] = Witness(0.0, h0, 1.0 if h0 < 1.0 else 2.0, margin)
    ref = min(abs(h0 - 1.0), 1.0)
    exc = np.abs(h[1:] - 1.0)
    if np.any(exc > ref + epsilon):
        idx = int(np.argmax(exc)) + 1
        flags["S2"] = Witness(float(tau[idx]), float(abs(h[idx] - 1.0)), ref,
                              float(abs(h[idx] - 1.0)) - ref)
    crossings = {}
    signs = np.sign(exc - ref)
    nonzero = signs[signs != 0]
    crossings["S2"] = int(np.sum(nonzero[1:] != nonzero[:-1])) if nonzero.size else 0
    return ViolationReport(flags=flags, epsilon=epsilon, crossings=crossings)


def summary_table(rows: list[tuple[str, ViolationReport]]) -> str:
    """Aligned plain-text table: one row per labelled report, columns per flag."""
    label_width = max([len(label) for label, _ in rows] + [len("run")])
    head = "run".ljust(label_width) + "  " + "  ".join(f"{f:>4}" for f in ALL_FLAGS)
    lines = [head, "-" * len(head)]
    for label, report in rows:
        marks = ["yes" if f in report.flags else "." for f in ALL_FLAGS]
        lines.append(label.ljust(label_width) + "  " + "  ".join(f"{m:>4}" for m in marks))
    return "\n".join(lines) + "\n"
