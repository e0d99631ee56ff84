"""Weak-field amplitude hierarchy: steady state, collapses, conditional evolution.

The state of the driven atom-cavity-lattice system, truncated at two
excitations, is expanded over the channels

    (0, l, g)   ground manifold, vibrational level l of the bare lattice well
    (1, m, +/-) single-excitation dressed doublet, vibrational level m of the
                (1, +/-) well
    (2, m, +/-) double-excitation doublet

with complex amplitudes D.  Amplitudes are kept in the per-channel rotating
frame (the "D frame") in which each channel's free phase
exp(-i (E_{n,m,b} - E_{0,m}) tau) has been removed; the ground amplitudes are
then constants of the motion and the weak-field equations read

  dD0/dtau      = 0
  dD1(m,b)/dtau = -[gamma/4 + kappa/2 + i(E1(m,b) - E0(m))] D1(m,b)
                  - (kappa/2 - gamma/4) D1(m,-b)
                  - (Y/sqrt(2)) sum_l FC1[b][l,m] D0(l)
  dD2(m,b)/dtau = -[gamma/4 + 3 kappa/2 + i(E2(m,b) - E0(m))] D2(m,b)
                  - (kappa/2 - gamma/4) D2(m,-b)
                  - Y sum_{s,m'} w[b,s] T[b,s][m',m] D1(m',s)

with w[+,+] = w[-,-] = 1/sqrt(2) + 1/2, w[+,-] = w[-,+] = 1/sqrt(2) - 1/2 and
T[b,s] the (1,s) -> (2,b) vibrational overlap composed through the ground
ladder, T[b,s][m',m] = sum_l FC2[b][l,m] FC1[s][l,m'].  The derivation,
including every damping and drive sign, is docs/weak_field_equations.md; the
structure reduces to the textbook stationary-atom two-excitation equations
when the overlap tables are the identity.

Hierarchy bookkeeping: D0 is O(1), D1 is O(Y), D2 is O(Y^2), and the feed is
strictly upward, so every correlation ratio built from these amplitudes is
exactly independent of Y.  Collapses are evaluated by exact operator action on
the bare-basis amplitudes (so single-atom hard zeros are exact) and normalized
at leading order, which keeps the collapsed state inside the same hierarchy.

Everything here is pure: generators and states are immutable after
construction, and parameter sweeps can run fully in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateCollapseError,
    InvalidInputError,
    SingularBlockError,
)
from .lattice import BRANCHES, LatticeSystem, manifold_energies
from .overlaps import FranckCondonTable, InitialWeights

_BRANCH_SIGN = np.array([1.0, -1.0])  # columns of the (L, 2) blocks are [+, -]
_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class AmplitudeState:
    """Weak-field amplitudes at one conditional time tau (D frame)."""

    ground: np.ndarray   # (L,)  complex, constant under evolution
    one: np.ndarray      # (L, 2) complex, columns [+, -]
    two: np.ndarray      # (L, 2) complex
    tau: float
    generator: "WeakFieldGenerator"
    frame: str = "D"

    def amplitude(self, n: int, l: int, branch: str = "g") -> complex:
        """Single amplitude D[(n, l, branch)]."""
        if n == 0:
            return complex(self.ground[l])
        col = BRANCHES.index(branch)
        block = self.one if n == 1 else self.two
        return complex(block[l, col])


@dataclass(frozen=True)
class BareAmplitudes:
    """Bare-basis amplitudes c_{g,n,l}, c_{e,n,l} with channel phases restored."""

    g0: np.ndarray
    g1: np.ndarray
    e0: np.ndarray
    g2: np.ndarray
    e1: np.ndarray
    tau: float


@dataclass(frozen=True)
class CollapsedState:
    """State immediately after a detection, plus leading-order emission rates.

    ``bare`` holds the exact post-collapse bare amplitudes at tau = 0; the
    fluorescence collapse has exactly zero excited amplitude there, which is
    what makes the single-atom cross-correlation zeros exact.
    """

    state: AmplitudeState
    kind: str                    # "T" (transmission) or "F" (fluorescence)
    bare: BareAmplitudes
    p_transmission: float        # 2 kappa <a^dag a> at tau = 0
    p_fluorescence: float        # gamma <sigma_+ sigma_-> at tau = 0


class WeakFieldGenerator:
    """Immutable linear generator of the two-excitation hierarchy.

    Exposes the matrix M over the dynamical channels (1,m,+/-), (2,m,+/-) and
    the drive vector b(ground) such that dD/dtau = M D + Y b realizes the
    module equations.  The single-to-double drive block scales with Y and sits
    inside M; with Y = 0 and no damping M is anti-Hermitian (pure within-
    manifold Hamiltonian evolution).
    """

    def __init__(self, sys: LatticeSystem, fc_tables: dict):
        for key in ((1, "+"), (1, "-"), (2, "+"), (2, "-")):
            if key not in fc_tables:
                raise InvalidInputError(f"fc_tables missing manifold {key}")
            table: FranckCondonTable = fc_tables[key]
            if table.l_max != sys.l_max:
                raise InvalidInputError(
                    f"fc_table {key} covers l_max={table.l_max}, system needs {sys.l_max}"
                )
        self.sys = sys
        L = sys.l_max + 1
        self.L = L
        self.fc1 = np.stack([fc_tables[(1, b)].entries for b in BRANCHES], axis=2)  # (L, L, 2)
        self.fc2 = np.stack([fc_tables[(2, b)].entries for b in BRANCHES], axis=2)

        e0 = manifold_energies(sys, 0, "+")
        self.delta1 = np.stack(
            [manifold_energies(sys, 1, b) - e0 for b in BRANCHES], axis=1
        )  # (L, 2)
        self.delta2 = np.stack(
            [manifold_energies(sys, 2, b) - e0 for b in BRANCHES], axis=1
        )

        g, k = sys.gamma, sys.kappa
        cross = k / 2.0 - g / 4.0
        self._m1 = self._manifold_block(g / 4.0 + k / 2.0, cross, self.delta1)
        self._m2 = self._manifold_block(g / 4.0 + 3.0 * k / 2.0, cross, self.delta2)

        # 0 -> 1 drive map: b1 = B01 @ ground, one factor FC1 per channel pair.
        self._b01 = np.zeros((2 * L, L))
        for b in range(2):
            self._b01[b::2, :] = -(1.0 / _SQRT2) * self.fc1[:, :, b].T

        # 1 -> 2 drive: photon matrix element times composed vibrational overlap.
        w = np.array([[0.5 + 1.0 / _SQRT2, -0.5 + 1.0 / _SQRT2],
                      [-0.5 + 1.0 / _SQRT2, 0.5 + 1.0 / _SQRT2]])
        self._d12 = np.zeros((2 * L, 2 * L))
        for b2 in range(2):
            for b1 in range(2):
                t = self.fc2[:, :, b2].T @ self.fc1[:, :, b1]  # (m2, m1)
                self._d12[b2::2, b1::2] = -w[b2, b1] * t

        self._propagator_cache = {}

    @staticmethod
    def _manifold_block(damping: float, cross: float, delta: np.ndarray) -> np.ndarray:
        L = delta.shape[0]
        m = np.zeros((2 * L, 2 * L), dtype=complex)
        idx = np.arange(2 * L)
        m[idx, idx] = -damping - 1j * delta.reshape(-1)
        for l in range(L):
            m[2 * l, 2 * l + 1] = -cross
            m[2 * l + 1, 2 * l] = -cross
        return m

    # -- public matrix views -------------------------------------------------

    def matrix(self) -> np.ndarray:
        """Full dynamical generator M over stacked (n=1, n=2) channels."""
        L = self.L
        m = np.zeros((4 * L, 4 * L), dtype=complex)
        m[: 2 * L, : 2 * L] = self._m1
        m[2 * L :, 2 * L :] = self._m2
        m[2 * L :, : 2 * L] = self.sys.Y * self._d12
        return m

    def drive_vector(self, ground: np.ndarray) -> np.ndarray:
        """b such that Y*b sources the n=1 block from the given ground amplitudes."""
        out = np.zeros(4 * self.L, dtype=complex)
        out[: 2 * self.L] = self._b01 @ ground
        return out

    # -- steady state ---------------------------------------------------------

    def steady_state(self, weights: InitialWeights | np.ndarray) -> AmplitudeState:
        """Order-by-order fixed point: n=1 sourced by D0, then n=2 by n=1."""
        ground = np.asarray(
            weights.weights if isinstance(weights, InitialWeights) else weights,
            dtype=complex,
        )
        if ground.shape != (self.L,):
            raise InvalidInputError(f"ground weights must have shape ({self.L},)")
        Y = self.sys.Y
        try:
            d1 = np.linalg.solve(self._m1, -Y * (self._b01 @ ground))
        except np.linalg.LinAlgError as exc:
            raise SingularBlockError("n=1", str(exc)) from exc
        try:
            d2 = np.linalg.solve(self._m2, -Y * (self._d12 @ d1))
        except np.linalg.LinAlgError as exc:
            raise SingularBlockError("n=2", str(exc)) from exc
        L = self.L
        return AmplitudeState(
            ground=ground,
            one=d1.reshape(L, 2),
            two=d2.reshape(L, 2),
            tau=0.0,
            generator=self,
        )

    # -- frame bookkeeping ----------------------------------------------------

    def channel_phases(self, tau: float):
        """exp(-i Delta tau) factors restoring the lab (C) frame at time tau."""
        return (
            np.exp(-1j * self.delta1 * tau),
            np.exp(-1j * self.delta2 * tau),
        )

    def bare_amplitudes(self, state: AmplitudeState) -> BareAmplitudes:
        """Transform dressed amplitudes to bare-basis ones at the state's tau."""
        ph1, ph2 = self.channel_phases(state.tau)
        one = state.one * ph1
        two = state.two * ph2
        # c_{g,n,l} couples the symmetric doublet combination, c_{e,n-1,l} the
        # antisymmetric one; each leg carries one vibrational overlap factor.
        g1 = np.zeros(self.L, dtype=complex)
        e0 = np.zeros(self.L, dtype=complex)
        g2 = np.zeros(self.L, dtype=complex)
        e1 = np.zeros(self.L, dtype=complex)
        for b, sign in ((0, 1.0), (1, -1.0)):
            g1 += (self.fc1[:, :, b] @ one[:, b]) / _SQRT2
            e0 += sign * (self.fc1[:, :, b] @ one[:, b]) / _SQRT2
            g2 += (self.fc2[:, :, b] @ two[:, b]) / _SQRT2
            e1 += sign * (self.fc2[:, :, b] @ two[:, b]) / _SQRT2
        return BareAmplitudes(
            g0=state.ground.copy(), g1=g1, e0=e0, g2=g2, e1=e1, tau=state.tau
        )

    def dress_one_block(self, g1: np.ndarray, e0: np.ndarray) -> np.ndarray:
        """Project bare (g,1,l) and (e,0,l) amplitudes back onto the dressed doublet."""
        one = np.zeros((self.L, 2), dtype=complex)
        for b, sign in ((0, 1.0), (1, -1.0)):
            one[:, b] = self.fc1[:, :, b].T @ (g1 + sign * e0) / _SQRT2
        return one

    # -- collapses ------------------------------------------------------------

    def collapse(self, ss: AmplitudeState, kind: str) -> CollapsedState:
        """Apply the transmission (a) or fluorescence (sigma_-) jump operator.

        The operator acts exactly on the bare amplitudes; the result is
        normalized at leading order in Y and re-dressed for evolution.
        """
        if kind not in ("T", "F"):
            raise InvalidInputError(f"collapse kind must be 'T' or 'F', got {kind!r}")
        bare = self.bare_amplitudes(ss)
        if kind == "T":
            new_g0 = bare.g1.copy()
            new_g1 = _SQRT2 * bare.g2
            new_e0 = bare.e1.copy()
        else:
            new_g0 = bare.e0.copy()
            new_g1 = bare.e1.copy()
            new_e0 = np.zeros(self.L, dtype=complex)
        norm = float(np.linalg.norm(new_g0))
        sector_scale = float(np.linalg.norm(np.concatenate([bare.g1, bare.e0])))
        if norm == 0.0 or norm < 1e-12 * sector_scale:
            raise DegenerateCollapseError(
                f"{kind}-collapse annihilated the state (norm {norm:.3e})"
            )
        new_g0 /= norm
        new_g1 /= norm
        new_e0 /= norm
        state = AmplitudeState(
            ground=new_g0,
            one=self.dress_one_block(new_g1, new_e0),
            two=np.zeros((self.L, 2), dtype=complex),
            tau=0.0,
            generator=self,
        )
        collapsed_bare = BareAmplitudes(
            g0=new_g0,
            g1=new_g1,
            e0=new_e0,
            g2=np.zeros(self.L, dtype=complex),
            e1=np.zeros(self.L, dtype=complex),
            tau=0.0,
        )
        return CollapsedState(
            state=state,
            kind=kind,
            bare=collapsed_bare,
            p_transmission=2.0 * self.sys.kappa * float(np.sum(np.abs(new_g1) ** 2)),
            p_fluorescence=self.sys.gamma * float(np.sum(np.abs(new_e0) ** 2)),
        )

    # -- propagation ----------------------------------------------------------

    def _propagator(self):
        """Eigendecomposition of M, or None when it is unreliable."""
        key = "eig"
        if key not in self._propagator_cache:
            m = self.matrix()
            vals, vecs = np.linalg.eig(m)
            try:
                vinv = np.linalg.inv(vecs)
            except np.linalg.LinAlgError:
                self._propagator_cache[key] = None
                return None
            residual = np.max(np.abs(m - (vecs * vals) @ vinv))
            scale = max(1.0, np.max(np.abs(m)))
            self._propagator_cache[key] = (
                (vals, vecs, vinv) if residual < 1e-9 * scale else None
            )
        return self._propagator_cache[key]

    def evolve(self, state: AmplitudeState, tau_grid) -> list[AmplitudeState]:
        """Propagate under dD/dtau = M D + Y b(ground) on an ascending grid.

        Matrix-exponential stepping evaluated directly from tau = 0 for every
        grid point: refining the grid cannot change overlapping samples.
        """
        taus = np.asarray(tau_grid, dtype=float)
        if taus.ndim != 1 or taus.size == 0:
            raise InvalidInputError("tau_grid must be a non-empty 1-d sequence")
        if np.any(taus < 0) or np.any(np.diff(taus) < 0):
            raise InvalidInputError("tau_grid must be ascending and non-negative")

        fixed = self.steady_state(state.ground)
        xp = np.concatenate([fixed.one.reshape(-1), fixed.two.reshape(-1)])
        x0 = np.concatenate([state.one.reshape(-1), state.two.reshape(-1)])
        dx = x0 - xp

        eig = self._propagator()
        out = []
        if eig is not None:
            vals, vecs, vinv = eig
            w0 = vinv @ dx
            for tau in taus:
                x = xp + vecs @ (np.exp(vals * (tau - state.tau)) * w0)
                out.append(self._unpack(state, x, tau))
        else:
            m = self.matrix()
            for tau in taus:
                x = xp + scipy.linalg.expm(m * (tau - state.tau)) @ dx
                out.append(self._unpack(state, x, tau))
        return out

    def _unpack(self, template: AmplitudeState, x: np.ndarray, tau: float) -> AmplitudeState:
        L = self.L
        return AmplitudeState(
            ground=template.ground,
            one=x[: 2 * L].reshape(L, 2),
            two=x[2 * L :].reshape(L, 2),
            tau=float(tau),
            generator=self,
        )


# -- module-level operations -------------------------------------------------


def build_generator(sys: LatticeSystem, fc_tables: dict) -> WeakFieldGenerator:
    """Assemble the weak-field generator from the system and its overlap tables."""
    return WeakFieldGenerator(sys, fc_tables)


def steady_state(sys: LatticeSystem, fc_tables: dict, weights) -> AmplitudeState:
    """Hierarchy fixed point with the ground manifold pinned at the given weights."""
    return build_generator(sys, fc_tables).steady_state(weights)


def collapse(ss: AmplitudeState, kind: str) -> CollapsedState:
    """Detection back-action on a steady state; see WeakFieldGenerator.collapse."""
    return ss.generator.collapse(ss, kind)


def evolve(state: CollapsedState | AmplitudeState, tau_grid) -> list[AmplitudeState]:
    """Conditional evolution after a collapse, exact on the given tau grid."""
    if isinstance(state, CollapsedState):
        state = state.state
    return state.generator.evolve(state, tau_grid)
