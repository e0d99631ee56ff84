"""Vibrational overlap (Franck-Condon) tables and the initial wave-packet weights.

The coupling between dressed manifolds is reduced by the overlap of their
vibrational eigenstates, because each manifold lives in a well of different
depth.  These overlaps form the tables consumed by the amplitude hierarchy.

Quadrature policy: composite Gauss-Legendre panels with a Richardson
(panel-doubling) check converged to 1e-10.  The integrands are finite
trigonometric polynomials, so the rule is exact up to rounding once the panel
count is adequate; the doubling check guards against under-paneling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, eval_hermite

from . import mathieu
from .errors import ConvergenceError, InvalidInputError
from .lattice import BRANCHES, LatticeSystem

QUAD_TOL = 1.0e-10


@dataclass(frozen=True)
class FranckCondonTable:
    """Overlap matrix between the ground-manifold ladder and one dressed ladder.

    entries[l, m] = <ground mode l | dressed mode m>, so rows index the ground
    manifold and columns the (n, branch) manifold.
    """

    n: int
    branch: str
    entries: np.ndarray
    l_max: int

    def row_completeness(self, l: int) -> float:
        """Sum of squared overlaps out of ground mode l (approaches 1)."""
        return float(np.sum(self.entries[l, :] ** 2))

    def dump_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("l\\m," + ",".join(str(m) for m in range(self.l_max + 1)) + "\n")
            for l in range(self.l_max + 1):
                fh.write(str(l) + "," + ",".join(f"{v:.17g}" for v in self.entries[l]) + "\n")


@dataclass(frozen=True)
class InitialWeights:
    """Projection of the initial Gaussian wave packet onto the ground ladder."""

    weights: np.ndarray        # renormalized, unit sum of squares
    sigma: float               # Gaussian width in units of sigma_0
    deficit: float             # 1 - sum(raw**2): truncation loss before renormalization
    single_site_loss: float    # Gaussian probability mass outside the central site window
    site_warning: bool         # True when single_site_loss > 10%


def _gauss_legendre_panels(f, lo: float, hi: float, panels: int, order: int = 10) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    # (panels, order) grid of mapped nodes
    x = mid[:, None] + half[:, None] * nodes[None, :]
    vals = f(x.ravel()).reshape(x.shape)
    return float(np.sum(half[:, None] * weights[None, :] * vals))


def integrate_periodic(f, lo: float, hi: float, min_panels: int = 8) -> float:
    """Composite Gauss-Legendre with a panel-doubling convergence check."""
    panels = max(min_panels, 8)
    coarse = _gauss_legendre_panels(f, lo, hi, panels)
    fine = _gauss_legendre_panels(f, lo, hi, 2 * panels)
    scale = max(1.0, abs(fine))
    if abs(fine - coarse) > QUAD_TOL * scale:
        finer = _gauss_legendre_panels(f, lo, hi, 4 * panels)
        if abs(finer - fine) > QUAD_TOL * max(1.0, abs(finer)):
            raise ConvergenceError("overlap quadrature did not converge", abs(finer - fine))
        return finer
    return fine


def franck_condon(mode_a: mathieu.MathieuMode, mode_b: mathieu.MathieuMode) -> float:
    """Normalized overlap (1/pi) int_0^{2pi} psi_a psi_b dz of two Mathieu modes.

    Identical modes give 1.  Modes of opposite parity (ce vs se), or of
    opposite order parity within one family, are orthogonal for every q and
    return exactly 0 without quadrature.
    """
    if mode_a.parity != mode_b.parity:
        return 0.0
    if (mode_a.order - mode_b.order) % 2 != 0:
        # cos/sin harmonics of opposite parity never share a Fourier component
        return 0.0
    max_harmonic = int(mode_a.harmonics()[-1] + mode_b.harmonics()[-1])
    panels = max(8, (max_harmonic + 10) // 10)

    def integrand(z):
        return mathieu.evaluate(mode_a, z) * mathieu.evaluate(mode_b, z)

    return integrate_periodic(integrand, 0.0, 2.0 * np.pi, panels) / np.pi


def _mathieu_ladder_modes(sys: LatticeSystem, n: int, branch: str):
    q = sys.well_parameter(n, branch)
    return [mathieu.eigenfunction(q, "even", l) for l in range(sys.l_max + 1)]


def _hermite_fn(l: int, u: np.ndarray, s: float) -> np.ndarray:
    """Orthonormal harmonic-oscillator eigenfunction of width s, without e^-u^2/2s^2.

    The Gaussian factor is folded into the quadrature weight by the caller.
    """
    norm = 1.0 / np.sqrt(2.0**l * math.factorial(l) * np.sqrt(np.pi) * s)
    return norm * eval_hermite(l, u / s)


def _sho_overlap_table(sys: LatticeSystem, n: int, branch: str) -> np.ndarray:
    """Hermite-function overlaps between the ground well and one dressed well."""
    s_a = sys.sigma0()
    s_b = (4.0 * sys.well_parameter(n, branch)) ** -0.25
    L = sys.l_max + 1
    alpha = 0.5 * (1.0 / s_a**2 + 1.0 / s_b**2)
    # With u = t/sqrt(alpha) the integrand is polynomial * exp(-t^2): exact
    # Gauss-Hermite once the node count covers the polynomial degree.
    t, w = np.polynomial.hermite.hermgauss(2 * L + 8)
    u = t / np.sqrt(alpha)
    out = np.zeros((L, L))
    ha = np.array([_hermite_fn(l, u, s_a) for l in range(L)])
    hb = np.array([_hermite_fn(m, u, s_b) for m in range(L)])
    for l in range(L):
        for m in range(L):
            if (l - m) % 2:
                continue
            out[l, m] = np.sum(w * ha[l] * hb[m]) / np.sqrt(alpha)
    return out


def fc_table(sys: LatticeSystem, n: int, branch: str) -> FranckCondonTable:
    """Overlap table between the ground ladder and the (n, branch) ladder."""
    if n < 1:
        raise InvalidInputError(f"dressed manifolds start at n=1, got n={n}")
    if branch not in BRANCHES:
        raise InvalidInputError(f"branch must be '+' or '-', got {branch!r}")
    L = sys.l_max + 1
    if sys.mode == "stationary":
        entries = np.eye(L)
    elif sys.mode == "sho":
        entries = _sho_overlap_table(sys, n, branch)
    else:
        ground = _mathieu_ladder_modes(sys, 0, "+")
        dressed = _mathieu_ladder_modes(sys, n, branch)
        entries = np.zeros((L, L))
        for l in range(L):
            for m in range(L):
                entries[l, m] = franck_condon(ground[l], dressed[m])
    return FranckCondonTable(n=n, branch=branch, entries=entries, l_max=sys.l_max)


def fc_tables(sys: LatticeSystem) -> dict:
    """The four tables used by the two-excitation hierarchy, keyed (n, branch)."""
    return {(n, b): fc_table(sys, n, b) for n in (1, 2) for b in BRANCHES}


def _gaussian_site_loss(width_z: float) -> float:
    """Probability mass of the Gaussian outside +/- pi around its center."""
    return float(1.0 - erf(np.pi / (np.sqrt(2.0) * width_z)))


def gaussian_weights(sys: LatticeSystem) -> InitialWeights:
    """Project a normalized Gaussian of width sigma*sigma_0 onto the ground ladder.

    The integration window is one full function period [-pi/2, 3pi/2] centered
    on the well minimum at z = pi/2.  Weights are renormalized to unit sum of
    squares; the pre-normalization deficit is reported, and a warning flag is
    set when more than 10% of the Gaussian mass lies outside the central site
    window (the single-site restriction is then dubious).
    """
    L = sys.l_max + 1
    if sys.mode == "stationary":
        weights = np.zeros(L)
        weights[0] = 1.0
        return InitialWeights(weights, sys.sigma, 0.0, 0.0, False)

    s0 = sys.sigma0()
    width = sys.sigma * s0
    raw = np.zeros(L)
    if sys.mode == "sho":
        alpha = 0.5 * (1.0 / s0**2 + 1.0 / width**2)
        t, w = np.polynomial.hermite.hermgauss(2 * L + 8)
        u = t / np.sqrt(alpha)
        gnorm = 1.0 / (np.pi**0.25 * np.sqrt(width))
        for l in range(0, L, 2):
            raw[l] = np.sum(w * _hermite_fn(l, u, s0) * gnorm) / np.sqrt(alpha)
    else:
        modes = _mathieu_ladder_modes(sys, 0, "+")
        center = 0.5 * np.pi
        gnorm = 1.0 / (np.pi**0.25 * np.sqrt(width))
        max_harm = int(modes[-1].harmonics()[-1])
        panels = max(16, (max_harm + 10) // 6, int(8.0 / width))
        for l in range(L):
            mode = modes[l]

            def integrand(z, mode=mode):
                g = gnorm * np.exp(-((z - center) ** 2) / (2.0 * width**2))
                return mathieu.evaluate(mode, z) * g / np.sqrt(np.pi)

            raw[l] = integrate_periodic(integrand, -0.5 * np.pi, 1.5 * np.pi, panels)
        # Odd ladder states are odd about the well center: zero by parity.
        raw[1::2][np.abs(raw[1::2]) < 1e-12] = 0.0

    total = float(np.sum(raw**2))
    if total <= 0:
        raise InvalidInputError("initial Gaussian has no support on the retained ladder")
    deficit = 1.0 - total
    loss = _gaussian_site_loss(width)
    return InitialWeights(
        weights=raw / np.sqrt(total),
        sigma=sys.sigma,
        deficit=deficit,
        single_site_loss=loss,
        site_warning=loss > 0.10,
    )
