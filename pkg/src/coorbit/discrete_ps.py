"""Finite phase-space tomography on Z_N x Z_N.

Cyclic shift and clock operators generate a discrete displacement family
U(q, p) that forms an orthogonal operator basis, so reconstruction from the
N^2 sampled overlaps is exact. Phase-space point operators A(q, p) live on
the doubled 2N x 2N lattice and give the discrete Wigner function; both the
displacement route and the point-operator route rebuild the state to
machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frame_core import IndexGrid, TomographicSystem
from .opalg import DensityMatrix, Operator


@dataclass(frozen=True)
class FiniteLattice:
    """Hilbert dimension N with index set G_N = {0..N-1}^2.

    Point operators extend to the doubled 2N x 2N lattice.
    """

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("lattice dimension must be positive")

    @property
    def coarse_points(self):
        return [(q, p) for q in range(self.N) for p in range(self.N)]

    @property
    def fine_points(self):
        return [(q, p) for q in range(2 * self.N) for p in range(2 * self.N)]


def shift_q(N: int, m: int) -> Operator:
    """Cyclic position shift: Q^m |n> = |n + m mod N>."""
    if N <= 0:
        raise ValueError("N must be positive")
    mat = np.zeros((N, N), dtype=complex)
    for n in range(N):
        mat[(n + m) % N, n] = 1
    return Operator(mat)


def shift_v(N: int, m: int) -> Operator:
    """Clock operator: V^m |n> = e^{2 pi i m n / N} |n>."""
    if N <= 0:
        raise ValueError("N must be positive")
    return Operator(np.diag(np.exp(2j * math.pi * m * np.arange(N) / N)))


def parity(N: int) -> Operator:
    """Finite parity R |n> = |-n mod N>."""
    mat = np.zeros((N, N), dtype=complex)
    for n in range(N):
        mat[(-n) % N, n] = 1
    return Operator(mat)


def displacement_discrete(N: int, q: int, p: int) -> Operator:
    """Discrete displacement U(q, p) = Q^q V^p e^{i pi p q / N}."""
    phase = np.exp(1j * math.pi * ((p * q) % (2 * N)) / N)
    return Operator(shift_q(N, q).entries @ shift_v(N, p).entries * phase)


def point_operator(N: int, q: int, p: int, route: str = "parity") -> Operator:
    """Phase-space point operator A(q, p) on the 2N x 2N lattice.

    Two equivalent constructions: the Fourier sum over displacements
    A = (1/(2N)^2) sum_{m,k} U(m,k) e^{-2 pi i (k q - m p)/(2N)}, and the
    displaced-parity product A = (1/2N) Q^q R V^{-p} e^{i pi p q / N}.
    """
    if not (0 <= q <= 2 * N - 1 and 0 <= p <= 2 * N - 1):
        raise ValueError(f"lattice index ({q}, {p}) outside the 2N x 2N range")
    if route == "parity":
        phase = np.exp(1j * math.pi * ((p * q) % (2 * N)) / N)
        mat = shift_q(N, q).entries @ parity(N).entries @ shift_v(N, -p).entries
        return Operator(mat * phase / (2 * N))
    if route == "fourier":
        acc = np.zeros((N, N), dtype=complex)
        for m in range(2 * N):
            for k in range(2 * N):
                # 2N-th roots of unity with exact integer angles
                ang = math.pi * ((k * q - m * p) % (2 * N)) / N
                acc += displacement_discrete(N, m, k).entries * np.exp(-1j * ang)
        return Operator(acc / (2 * N) ** 2)
    raise ValueError(f"unknown route {route!r}")


def discrete_wigner(rho: DensityMatrix, N: int) -> np.ndarray:
    """Discrete Wigner function W(q, p) = Tr(A(q, p) rho) on the 2N lattice."""
    if rho.dim != N:
        raise ValueError(f"dimension mismatch: state {rho.dim}, lattice {N}")
    w = np.empty((2 * N, 2 * N))
    for q in range(2 * N):
        for p in range(2 * N):
            val = np.trace(point_operator(N, q, p).entries @ rho.op.entries)
            w[q, p] = val.real
    return w


def reconstruct_displacement(rho: DensityMatrix, N: int) -> Operator:
    """rho = (1/N) sum_{G_N} Tr(rho U^dag(q,p)) U(q,p)."""
    if rho.dim != N:
        raise ValueError(f"dimension mismatch: state {rho.dim}, lattice {N}")
    acc = np.zeros((N, N), dtype=complex)
    for q in range(N):
        for p in range(N):
            u = displacement_discrete(N, q, p).entries
            acc += np.vdot(u, rho.op.entries) * u
    return Operator(acc / N)


def reconstruct_point(rho: DensityMatrix, N: int) -> Operator:
    """rho = 4N sum_{G_N} Tr(rho A(q,p)) A(q,p)."""
    if rho.dim != N:
        raise ValueError(f"dimension mismatch: state {rho.dim}, lattice {N}")
    acc = np.zeros((N, N), dtype=complex)
    for q in range(N):
        for p in range(N):
            a = point_operator(N, q, p).entries
            acc += np.trace(rho.op.entries @ a) * a
    return Operator(4 * N * acc)


def heisenberg_finite_system(N: int) -> TomographicSystem:
    """Displacement-family system over G_N with weights 1/N.

    With analysis = synthesis = U(q, p) and weight 1/N per node, the family
    {U / sqrt(N)} is an orthonormal operator basis, so the round trip is a
    Parseval identity (frame bounds A = B = 1 and P = 1).
    """
    if N < 2:
        raise ValueError("need N >= 2")
    lattice = FiniteLattice(N)
    nodes = tuple((float(q), float(p)) for q, p in lattice.coarse_points)
    grid = IndexGrid(nodes, np.full(N * N, 1 / N))
    family = {
        node: displacement_discrete(N, int(node[0]), int(node[1])) for node in nodes
    }
    return TomographicSystem(
        dim=N,
        grid=grid,
        analysis=family.__getitem__,
        synthesis=family.__getitem__,
        vacuum=Operator(np.eye(N)),
        test_functional=Operator(np.eye(N)),
        normalization=1.0,
    )
