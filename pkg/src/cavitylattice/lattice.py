"""System parameters and dressed vibrational energy ladders.

Units: gamma = 1 fixes time, energies are in hbar*gamma.  The lattice depth V0
is entered in units of the recoil energy E_R, and ``recoil`` is the ratio
E_R / (hbar*gamma), so every published rate ratio (g/gamma, kappa/gamma) can be
typed in directly.

In the n-excitation dressed manifold the center of mass sees an effective well
of depth V0 +/- g0*sqrt(n) (in recoil units, the coupling contributes
g0/recoil), which is exactly the dimensionless Mathieu parameter

    q_{n,+/-} = V0 +/- sqrt(n) * g0 / recoil.

Level energies stack three pieces: the Mathieu characteristic value (or its
harmonic approximation), the well-depth offset, and the dressed splitting
+/- sqrt(n) g0.

Three center-of-mass treatments are supported:

* ``mathieu``    - exact even-family (ce) ladders, energies E_R * a_l(q).
* ``sho``        - harmonic approximation of the same wells: the curvature at
                   a well bottom of the potential 2q E_R cos(2z) gives
                   Omega_{n,b} = 4 E_R sqrt(q_{n,b}) and energies
                   -2q E_R + Omega (l + 1/2), matching the deep-well expansion
                   a_l(q) ~ -2q + 4 sqrt(q) (l + 1/2).
* ``stationary`` - infinitely heavy atom: no vibrational structure at all,
                   energies are the bare dressed splittings +/- sqrt(n) g0 and
                   every overlap table is the identity.  This realizes the
                   textbook stationary-atom limit exactly.

The vibrational ladder uses only the even (ce) family: those are the states
with alternating parity about a well minimum, which is what a symmetric
initial wave packet in one well can populate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import mathieu
from .errors import InvalidInputError

MODES = ("sho", "mathieu", "stationary")
BRANCHES = ("+", "-")


@dataclass(frozen=True)
class LatticeSystem:
    """All physical rates and lattice parameters defining one simulation."""

    g0: float                 # atom-cavity coupling, units of gamma
    kappa: float              # cavity field decay rate, units of gamma
    V0: float                 # lattice depth, units of E_R
    Y: float                  # drive amplitude, units of gamma (weak-field bookkeeping)
    sigma: float              # initial Gaussian width, units of the ground-well SHO width sigma_0
    recoil: float             # E_R in units of hbar*gamma
    mode: str = "mathieu"     # "sho" | "mathieu" | "stationary"
    l_max: int = 8            # vibrational truncation
    gamma: float = 1.0        # spontaneous emission rate; the unit of time

    def __post_init__(self):
        for name in ("kappa", "gamma", "Y", "recoil"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be strictly positive, got {value!r}")
        if not (np.isfinite(self.g0) and self.g0 >= 0):
            # g0 = 0 is the empty-cavity limit used by consistency checks
            raise InvalidInputError(f"g0 must be >= 0, got {self.g0!r}")
        if not (np.isfinite(self.V0) and self.V0 >= 0):
            raise InvalidInputError(f"V0 must be >= 0, got {self.V0!r}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidInputError(f"sigma must be strictly positive, got {self.sigma!r}")
        if self.l_max < 0:
            raise InvalidInputError(f"l_max must be >= 0, got {self.l_max!r}")
        if self.mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "stationary" and self.l_max != 0:
            object.__setattr__(self, "l_max", 0)
        if self.mode == "sho":
            # Every manifold well must have real curvature (n up to 2).
            if min(self.well_parameter(n, b) for n in (0, 1, 2) for b in BRANCHES) <= 0:
                raise InvalidInputError(
                    "SHO mode requires V0 large enough that V0 - sqrt(2) g0/E_R stays positive"
                )

    def well_parameter(self, n: int, branch: str = "+") -> float:
        """Dimensionless Mathieu parameter q of the (n, branch) manifold."""
        if n < 0:
            raise InvalidInputError(f"excitation number must be >= 0, got {n}")
        if n == 0:
            return self.V0
        if branch not in BRANCHES:
            raise InvalidInputError(f"branch must be '+' or '-', got {branch!r}")
        sign = 1.0 if branch == "+" else -1.0
        return self.V0 + sign * np.sqrt(n) * self.g0 / self.recoil

    def sho_frequency(self, n: int, branch: str = "+") -> float:
        """Harmonic frequency of the (n, branch) well, units of gamma."""
        q = self.well_parameter(n, branch)
        if q <= 0:
            raise InvalidInputError(f"well (n={n},{branch}) has non-positive depth q={q:g}")
        return 4.0 * self.recoil * np.sqrt(q)

    def sigma0(self) -> float:
        """Ground-well SHO width in lattice coordinates z (sets the sigma unit)."""
        if self.mode == "stationary":
            raise InvalidInputError("stationary mode has no center-of-mass length scale")
        q0 = self.well_parameter(0)
        if q0 <= 0:
            raise InvalidInputError("sigma0 undefined for V0 = 0")
        return (4.0 * q0) ** -0.25


@dataclass(frozen=True)
class DressedLevelIndex:
    """Index (n, l, branch) of one dressed vibrational level."""

    n: int
    l: int
    branch: str = "g"

    def __post_init__(self):
        if self.n not in (0, 1, 2):
            raise InvalidInputError(f"excitation number must be 0, 1 or 2, got {self.n}")
        if self.l < 0:
            raise InvalidInputError(f"vibrational index must be >= 0, got {self.l}")
        if self.n == 0 and self.branch != "g":
            raise InvalidInputError("n=0 levels carry branch 'g'")
        if self.n >= 1 and self.branch not in BRANCHES:
            raise InvalidInputError(f"n>=1 levels need branch '+' or '-', got {self.branch!r}")


def mathieu_q(sys: LatticeSystem, n: int, branch: str = "+") -> float:
    """Mathieu parameter of the (n, branch) manifold (branch ignored for n=0)."""
    return sys.well_parameter(n, branch)


def vibrational_ladder(sys: LatticeSystem, n: int, branch: str = "+") -> np.ndarray:
    """Vibrational energies of one manifold, without the dressed splitting.

    Units hbar*gamma.  Mathieu mode returns E_R * a_l(q) for the even (ce)
    family; SHO mode returns the bottom-of-well harmonic approximation
    including the -2q well-depth offset so the two ladders coincide as
    V0/E_R -> infinity; stationary mode returns zeros.
    """
    L = sys.l_max + 1
    if sys.mode == "stationary":
        return np.zeros(L)
    if sys.mode == "sho":
        q = sys.well_parameter(n, branch)
        omega = sys.sho_frequency(n, branch)
        return -2.0 * q * sys.recoil + omega * (np.arange(L) + 0.5)
    q = sys.well_parameter(n, branch)
    return sys.recoil * mathieu.characteristic_values(q, "even", sys.l_max)


def level_energy(sys: LatticeSystem, idx: DressedLevelIndex) -> float:
    """Energy of one dressed level, units hbar*gamma.

    E = (vibrational ladder term) + sqrt(n) g0 for branch '+', - sqrt(n) g0
    for branch '-'; the n = 0 manifold has no dressed shift.
    """
    if idx.l > sys.l_max:
        raise InvalidInputError(f"l={idx.l} exceeds l_max={sys.l_max}")
    ladder = vibrational_ladder(sys, idx.n, idx.branch if idx.n else "+")
    shift = 0.0
    if idx.n >= 1:
        sign = 1.0 if idx.branch == "+" else -1.0
        shift = sign * np.sqrt(idx.n) * sys.g0
    return float(ladder[idx.l] + shift)


def manifold_energies(sys: LatticeSystem, n: int, branch: str) -> np.ndarray:
    """Vector of level energies E_{n,l,branch} for l = 0..l_max."""
    ladder = vibrational_ladder(sys, n, branch)
    if n == 0:
        return ladder
    sign = 1.0 if branch == "+" else -1.0
    return ladder + sign * np.sqrt(n) * sys.g0


def stationary_system(g0: float, kappa: float, Y: float, gamma: float = 1.0) -> LatticeSystem:
    """Convenience constructor for the stationary-atom (no lattice) limit."""
    return LatticeSystem(
        g0=g0, kappa=kappa, V0=0.0, Y=Y, sigma=1.0, recoil=1.0,
        mode="stationary", l_max=0, gamma=gamma,
    )


def with_parameter(sys: LatticeSystem, name: str, value) -> LatticeSystem:
    """Return a copy of the system with one field replaced (sweep helper)."""
    if not hasattr(sys, name):
        raise InvalidInputError(f"unknown system parameter {name!r}")
    return replace(sys, **{name: value})
