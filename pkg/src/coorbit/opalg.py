"""Dense complex operator algebra.

Everything downstream works with dense square complex matrices carrying a
dimension: states, kernels, displacement families. This module provides the
carrier types (:class:`Operator`, :class:`DensityMatrix`) and the handful of
linear-algebra primitives the reconstruction engines need — the
Hilbert-Schmidt pairing, tensor products, Hermitian eigendecomposition,
matrix exponentials and state fidelity.

All functions are pure; operators are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-10


def _as_square_complex(entries) -> np.ndarray:
    arr = np.asarray(entries, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"operator entries must be square, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("operator dimension must be positive")
    if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
        raise ValueError("operator entries must be finite")
    return arr


@dataclass(frozen=True)
class Operator:
    """A dim x dim complex matrix with its dimension as metadata."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_square_complex(self.entries).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def norm_hs(self) -> float:
        return float(np.linalg.norm(self.entries))

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(self.entries + other.entries)

    def __sub__(self, other: "Operator") -> "Operator":
        return Operator(self.entries - other.entries)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.entries * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        return Operator(self.entries @ other.entries)


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=complex))


def zero(dim: int) -> Operator:
    return Operator(np.zeros((dim, dim), dtype=complex))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator.

    Inputs within tolerance (Hermiticity 1e-12, trace 1e-12, minimum
    eigenvalue >= -1e-10) are accepted and symmetrized; anything worse is
    rejected. Quadrature reconstructions return near-Hermitian matrices, so
    the small symmetrization step keeps round trips composable.
    """

    op: Operator

    def __post_init__(self):
        m = self.op.entries
        herm_gap = np.abs(m - m.conj().T).max()
        if herm_gap > HERMITICITY_TOL:
            raise ValueError(f"not Hermitian: deviation {herm_gap:.3e}")
        sym = (m + m.conj().T) / 2
        tr = np.trace(sym).real
        if abs(tr - 1) > 1e-12:
            raise ValueError(f"trace {tr!r} differs from 1 beyond tolerance")
        evals = np.linalg.eigvalsh(sym)
        if evals[0] < -PSD_TOL:
            raise ValueError(f"not positive semidefinite: min eigenvalue {evals[0]:.3e}")
        object.__setattr__(self, "op", Operator(sym))

    @property
    def dim(self) -> int:
        return self.op.dim


def hs_inner(a: Operator, b: Operator) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dag b)."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.entries, b.entries))


def matrix_exp(a: Operator) -> Operator:
    """Matrix exponential exp(a) (scaling and squaring)."""
    return Operator(scipy.linalg.expm(a.entries))


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product a (x) b; the result has dim = a.dim * b.dim."""
    return Operator(np.kron(a.entries, b.entries))


def eig_hermitian(a: Operator):
    """Eigendecomposition of a Hermitian operator.

    Returns (eigenvalues ascending, unitary eigenvector matrix) with
    a = V diag(w) V^dag. Raises on input that is not Hermitian within 1e-10.
    """
    m = a.entries
    gap = np.abs(m - m.conj().T).max()
    if gap > 1e-10:
        raise ValueError(f"not Hermitian: deviation {gap:.3e}")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return w, v


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    w, v = eig_hermitian(rho.op)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    inner = sqrt_rho @ sigma.op.entries @ sqrt_rho
    evals = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    f = np.sqrt(np.clip(evals, 0, None)).sum() ** 2
    return float(min(max(f, 0.0), 1.0))


def closest_density(a: Operator) -> DensityMatrix:
    """Project a near-density operator onto the density-matrix set.

    Symmetrizes, clips negative eigenvalues to zero and renormalizes the
    trace. Quadrature round trips return operators a few parts in 1e9 away
    from positive semidefinite; this is the canonical repair before
    computing fidelities.
    """
    sym = (a.entries + a.entries.conj().T) / 2
    w, v = np.linalg.eigh(sym)
    w = np.clip(w, 0, None)
    total = w.sum()
    if total <= 0:
        raise ValueError("operator has no positive spectral weight")
    return DensityMatrix(Operator((v * (w / total)) @ v.conj().T))


def kahan_matrix_sum(terms, shape) -> np.ndarray:
    """Compensated (Kahan) sum of complex matrices in iteration order.

    All grid reductions use this with a fixed node ordering so results are
    bit-stable across runs.
    """
    total = np.zeros(shape, dtype=complex)
    comp = np.zeros(shape, dtype=complex)
    for term in terms:
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total
