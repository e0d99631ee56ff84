"""Periodic Mathieu functions by truncated Fourier (tridiagonal) diagonalization.

The center-of-mass motion of the trapped atom obeys

    psi''(z) + (a - 2 q cos 2z) psi(z) = 0,

whose 2*pi-periodic solutions are the even ce_r (characteristic value a_r) and
odd se_r (characteristic value b_r) functions.  Expanding in a Fourier basis
turns the eigenproblem into a symmetric tridiagonal matrix, one matrix per
symmetry class:

    ce_{2n}   : cos(2kz),     k = 0..N-1,  diag (2k)^2,  first coupling sqrt(2)q
    ce_{2n+1} : cos((2k+1)z), diag (2k+1)^2, corner shift +q
    se_{2n+1} : sin((2k+1)z), diag (2k+1)^2, corner shift -q
    se_{2n+2} : sin((2k+2)z), diag (2k+2)^2

Normalization is chosen so that int_0^{2pi} ce_r ce_s dz = pi * delta_rs for
every order including r = 0 (hence ce_0 -> 1/sqrt(2) at q = 0): a unit-norm
symmetric eigenvector gives exactly that once the constant Fourier term is
rescaled by 1/sqrt(2).

All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, InvalidInputError

# Documented validity range for the well-depth parameter.
Q_MAX = 1.0e4

# Truncation is grown until the last Fourier coefficient of the highest
# requested mode is below this relative magnitude.
_TAIL_TOL = 1.0e-14


@dataclass(frozen=True)
class MathieuMode:
    """One periodic Mathieu eigenfunction.

    ``fourier_coeffs`` are the coefficients of the symmetry-class basis listed
    in the module docstring; for even classes the k=0 coefficient is already
    divided back by sqrt(2), i.e. evaluate() is a plain series sum.
    """

    parity: str              # "ce" (even) or "se" (odd)
    order: int
    q: float
    char_value: float
    fourier_coeffs: np.ndarray
    truncation: int

    @property
    def harmonic_step(self) -> int:
        """Spacing of the Fourier harmonics (always 2)."""
        return 2

    @property
    def base_harmonic(self) -> int:
        """Lowest harmonic in the series: 0 or 1 depending on order parity."""
        return self.order % 2 if self.parity == "ce" else 2 - self.order % 2

    def harmonics(self) -> np.ndarray:
        """Integer harmonics n_k multiplying z inside cos/sin."""
        k = np.arange(self.fourier_coeffs.size)
        if self.parity == "ce":
            return 2 * k + (self.order % 2)
        if self.order % 2 == 1:
            return 2 * k + 1
        return 2 * k + 2


def _class_matrix(q: float, parity: str, odd_order: bool, size: int):
    """Diagonal and off-diagonal of one symmetry-class tridiagonal matrix."""
    if parity == "ce" and not odd_order:
        diag = (2.0 * np.arange(size)) ** 2
        off = np.full(size - 1, q)
        off[0] = np.sqrt(2.0) * q
    elif parity == "ce":
        diag = (2.0 * np.arange(size) + 1.0) ** 2
        diag[0] += q
        off = np.full(size - 1, q)
    elif odd_order:
        diag = (2.0 * np.arange(size) + 1.0) ** 2
        diag[0] -= q
        off = np.full(size - 1, q)
    else:
        diag = (2.0 * np.arange(size) + 2.0) ** 2
        off = np.full(size - 1, q)
    return diag, off


def _initial_size(q: float, max_order: int) -> int:
    # Coefficients decay super-exponentially past k ~ sqrt(q); pad generously.
    return max(32, max_order // 2 + 8 + int(np.ceil(2.0 * np.sqrt(abs(q) + 1.0))))


def _validate_q(q: float) -> float:
    q = float(q)
    if not np.isfinite(q):
        raise InvalidInputError(f"well-depth parameter q must be finite, got {q!r}")
    if abs(q) >= Q_MAX:
        raise InvalidInputError(f"|q| = {abs(q):g} outside documented validity range < {Q_MAX:g}")
    return q


def _validate_parity(parity: str) -> str:
    if parity in ("even", "ce"):
        return "ce"
    if parity in ("odd", "se"):
        return "se"
    raise InvalidInputError(f"parity must be 'even'/'ce' or 'odd'/'se', got {parity!r}")


def _solve_class(q: float, parity: str, odd_order: bool, n_modes: int):
    """Eigenvalues and vectors of one symmetry class, truncation-converged."""
    size = _initial_size(q, 2 * n_modes)
    last_tail = np.inf
    for _ in range(12):
        diag, off = _class_matrix(q, parity, odd_order, size)
        vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_modes - 1))
        tail = np.max(np.abs(vecs[-1, :])) / np.max(np.abs(vecs))
        if tail < _TAIL_TOL:
            return vals, vecs
        last_tail = tail
        size = int(size * 1.6) + 8
    raise ConvergenceError(
        f"Fourier truncation for q={q:g} did not converge", residual=float(last_tail)
    )


def characteristic_values(q: float, parity: str, max_order: int) -> np.ndarray:
    """Characteristic values a_0..a_max (even) or b_1..b_max (odd).

    Values are returned in strictly increasing order of the index r; for q > 0
    they interlace as a_0 < b_1 < a_1 < b_2 < ...
    """
    q = _validate_q(q)
    parity = _validate_parity(parity)
    max_order = int(max_order)
    if parity == "ce" and max_order < 0:
        raise InvalidInputError("max_order must be >= 0 for even parity")
    if parity == "se" and max_order < 1:
        raise InvalidInputError("max_order must be >= 1 for odd parity")

    n_even = max_order // 2 + 1
    n_odd = (max_order + 1) // 2
    out = np.empty(max_order + 1 if parity == "ce" else max_order)
    if parity == "ce":
        even_vals, _ = _solve_class(q, parity, False, n_even)
        out[0::2] = even_vals
        if n_odd:
            odd_vals, _ = _solve_class(q, parity, True, n_odd)
            out[1::2] = odd_vals
    else:
        odd_vals, _ = _solve_class(q, parity, True, n_odd)  # se_1, se_3, ...
        out[0::2] = odd_vals
        if max_order >= 2:
            even_vals, _ = _solve_class(q, parity, False, max_order // 2)  # se_2, se_4, ...
            out[1::2] = even_vals
    return out


def eigenfunction(q: float, parity: str, order: int) -> MathieuMode:
    """Fourier representation of ce_order or se_order at well depth q.

    Sign convention: the first nonvanishing Fourier coefficient is positive,
    which keeps overlap tables smooth along parameter sweeps.
    """
    q = _validate_q(q)
    parity = _validate_parity(parity)
    order = int(order)
    if order < 0 or (parity == "se" and order < 1):
        raise InvalidInputError(f"order {order} invalid for parity {parity}")

    odd_order = order % 2 == 1
    index_in_class = order // 2 if parity == "ce" else (order - 1) // 2 if odd_order else order // 2 - 1
    vals, vecs = _solve_class(q, parity, odd_order, index_in_class + 1)
    val = float(vals[index_in_class])
    vec = vecs[:, index_in_class].copy()

    nonzero = np.nonzero(np.abs(vec) > 1e-12 * np.max(np.abs(vec)))[0]
    if nonzero.size and vec[nonzero[0]] < 0:
        vec = -vec
    if parity == "ce" and not odd_order:
        vec[0] /= np.sqrt(2.0)  # undo the symmetrizing rescale of the constant term

    return MathieuMode(
        parity=parity,
        order=order,
        q=q,
        char_value=val,
        fourier_coeffs=vec,
        truncation=int(vec.size),
    )


def evaluate(mode: MathieuMode, z) -> np.ndarray | float:
    """Evaluate the eigenfunction at z (scalar or array); 2*pi-periodic."""
    z_arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z_arr)):
        raise InvalidInputError("z must be finite")
    harmonics = mode.harmonics()
    phases = np.multiply.outer(z_arr, harmonics)
    basis = np.cos(phases) if mode.parity == "ce" else np.sin(phases)
    out = basis @ mode.fourier_coeffs
    return float(out) if np.isscalar(z) or z_arr.ndim == 0 else out


def evaluate_second_derivative(mode: MathieuMode, z) -> np.ndarray:
    """d^2 psi / dz^2, used for operator-residual (defect) checks."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    harmonics = mode.harmonics()
    phases = np.multiply.outer(z_arr, harmonics)
    basis = np.cos(phases) if mode.parity == "ce" else np.sin(phases)
    return -(basis * harmonics.astype(float) ** 2) @ mode.fourier_coeffs


def operator_residual(mode: MathieuMode, n_grid: int = 512) -> float:
    """Max-norm of psi'' + (a - 2q cos 2z) psi on a uniform grid."""
    z = np.linspace(0.0, 2.0 * np.pi, n_grid, endpoint=False)
    psi = evaluate(mode, z)
    d2 = evaluate_second_derivative(mode, z)
    return float(np.max(np.abs(d2 + (mode.char_value - 2.0 * mode.q * np.cos(2.0 * z)) * psi)))


def dump_mode_csv(mode: MathieuMode, path, n_grid: int = 512) -> None:
    """Debug dump of the eigenfunction as CSV with columns z, psi(z)."""
    z = np.linspace(0.0, 2.0 * np.pi, n_grid)
    psi = evaluate(mode, z)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("z,psi\n")
        for zi, pi in zip(z, psi):
            fh.write(f"{zi:.17g},{pi:.17g}\n")
