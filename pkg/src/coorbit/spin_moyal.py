"""Spin phase-space kernels on the sphere.

For a spin-s system the index set is the unit sphere. The direct kernel
Delta_n is the spin-coherent projector along n; the dual kernel Delta^n is
diagonal in the rotated basis with coefficients built from Wigner 3j ratios.
Pairing a state against the dual kernel gives its spherical symbol, and the
weighted sum of symbols against the direct kernel reconstructs the state
exactly on a product Gauss-Legendre x uniform grid (the integrand is
band-limited to spherical-harmonic degree 4s, so (2s+1) x (4s+2) nodes give
machine-precision quadrature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .frame_core import IndexGrid, SampleVector, TomographicSystem, analyze
from .opalg import DensityMatrix, Operator, matrix_exp


@dataclass(frozen=True)
class SpinParams:
    """Spin magnitude stored as the integer 2s; dim = 2s + 1.

    The m-basis ordering is m = s, s-1, ..., -s (index 0 is m = +s).
    """

    two_s: int

    def __post_init__(self):
        if self.two_s < 0:
            raise ValueError("2s must be a nonnegative integer")

    @property
    def dim(self) -> int:
        return self.two_s + 1

    @property
    def s(self) -> float:
        return self.two_s / 2


@dataclass(frozen=True)
class SphereGrid:
    """Product quadrature on the sphere with measure (2s+1)/(4pi) d(n).

    Gauss-Legendre nodes in cos(theta) times a uniform phi grid; the total
    weight is 2s+1.
    """

    theta_nodes: np.ndarray
    theta_weights: np.ndarray
    phi_nodes: np.ndarray
    phi_weight: float

    def to_index_grid(self, p: SpinParams) -> IndexGrid:
        nodes = []
        weights = []
        scale = (p.two_s + 1) / (4 * math.pi)
        for th, wt in zip(self.theta_nodes, self.theta_weights):
            for ph in self.phi_nodes:
                nodes.append((float(th), float(ph)))
                weights.append(scale * wt * self.phi_weight)
        return IndexGrid(tuple(nodes), np.array(weights))


def sphere_grid(p: SpinParams, n_theta: int | None = None, n_phi: int | None = None) -> SphereGrid:
    """Default exact grid: (2s+1) Gauss-Legendre x (4s+2) uniform nodes."""
    n_theta = n_theta if n_theta is not None else p.two_s + 1
    n_phi = n_phi if n_phi is not None else 2 * p.two_s + 2
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x[::-1])
    weights = w[::-1].copy()
    phi = np.arange(n_phi) * 2 * math.pi / n_phi
    return SphereGrid(theta, weights, phi, 2 * math.pi / n_phi)


def _fac(n: int) -> int:
    if n < 0:
        raise ValueError("negative factorial in 3j evaluation")
    return math.factorial(n)


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol by the Racah single-sum closed form."""
    two = []
    for v in (j1, j2, j3, m1, m2, m3):
        t = round(2 * v)
        if abs(2 * v - t) > 1e-9:
            raise ValueError("3j arguments must be integers or half-integers")
        two.append(t)
    tj1, tj2, tj3, tm1, tm2, tm3 = two
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0.0
    if tj3 > tj1 + tj2 or tj3 < abs(tj1 - tj2):
        return 0.0
    if (tj1 + tj2 + tj3) % 2 != 0:
        return 0.0

    def f2(x):  # factorial of a doubled integer that must be even
        if x % 2 != 0:
            raise ValueError("non-integer factorial argument in 3j")
        return _fac(x // 2)

    delta = math.sqrt(
        f2(tj1 + tj2 - tj3) * f2(tj1 - tj2 + tj3) * f2(-tj1 + tj2 + tj3)
        / f2(tj1 + tj2 + tj3 + 2)
    )
    pref = math.sqrt(
        f2(tj1 + tm1) * f2(tj1 - tm1) * f2(tj2 + tm2) * f2(tj2 - tm2)
        * f2(tj3 + tm3) * f2(tj3 - tm3)
    )
    kmin = max(0, (tj2 - tj3 - tm1) // 2, (tj1 - tj3 + tm2) // 2)
    kmax = min((tj1 + tj2 - tj3) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    total = 0.0
    for k in range(kmin, kmax + 1):
        term = (
            _fac(k)
            * f2(tj1 + tj2 - tj3 - 2 * k)
            * f2(tj1 - tm1 - 2 * k)
            * f2(tj2 + tm2 - 2 * k)
            * f2(tj3 - tj2 + tm1 + 2 * k)
            * f2(tj3 - tj1 - tm2 + 2 * k)
        )
        total += (-1) ** k / term
    phase = (-1) ** ((tj1 - tj2 - tm3) // 2)
    return phase * delta * pref * total


def _angular_momentum(p: SpinParams):
    """Jx, Jy matrices in the m = s..-s ordering."""
    s = p.s
    dim = p.dim
    jp = np.zeros((dim, dim))
    for i in range(1, dim):
        m = s - i  # J+ raises m: |m> -> |m+1>, i.e. index i -> i-1
        jp[i - 1, i] = math.sqrt(s * (s + 1) - m * (m + 1))
    jm = jp.T
    jx = (jp + jm) / 2
    jy = (jp - jm) / (2j)
    return jx, jy


def rotation_operator(p: SpinParams, theta: float, phi: float) -> Operator:
    """Unitary rotating the north pole to direction (theta, phi).

    Rotation by theta about the in-plane axis perpendicular to both n_z and
    the target direction: generator -sin(phi) Jx + cos(phi) Jy.
    """
    jx, jy = _angular_momentum(p)
    gen = -math.sin(phi) * jx + math.cos(phi) * jy
    return matrix_exp(Operator(-1j * theta * gen))


def kernel_direct(p: SpinParams, theta: float, phi: float) -> Operator:
    """Spin-coherent projector |s, n><s, n| at direction n = (theta, phi)."""
    u = rotation_operator(p, theta, phi).entries
    top = u[:, 0]
    return Operator(np.outer(top, top.conj()))


@lru_cache(maxsize=None)
def dual_coefficients(two_s: int) -> tuple:
    """Diagonal coefficients of the dual kernel, ordered m = s..-s.

    Delta^m = sum_l (2l+1)/(2s+1) (-1)^(s-m) 3j(s,l,s; m,0,-m) / 3j(s,l,s; s,0,-s).
    """
    s = two_s / 2
    coeffs = []
    for i in range(two_s + 1):
        m = s - i
        total = 0.0
        for l in range(two_s + 1):
            ratio = wigner_3j(s, l, s, m, 0, -m) / wigner_3j(s, l, s, s, 0, -s)
            total += (2 * l + 1) / (two_s + 1) * (-1) ** round(s - m) * ratio
        coeffs.append(total)
    return tuple(coeffs)


def kernel_dual(p: SpinParams, theta: float, phi: float) -> Operator:
    """Dual kernel Delta^n: diagonal in the rotated basis."""
    u = rotation_operator(p, theta, phi).entries
    diag = np.array(dual_coefficients(p.two_s))
    return Operator((u * diag) @ u.conj().T)


def tracial_overlap(p: SpinParams, theta: float) -> float:
    """Overlap Tr[Delta_{n_z} Delta^n] = sum_l (2l+1)/(2s+1) P_l(cos theta)."""
    x = math.cos(theta)
    total = 0.0
    p_prev, p_curr = 0.0, 1.0  # P_{-1} (unused), P_0
    for l in range(p.two_s + 1):
        if l == 1:
            p_prev, p_curr = p_curr, x
        elif l >= 2:
            p_next = ((2 * l - 1) * x * p_curr - (l - 1) * p_prev) / l
            p_prev, p_curr = p_curr, p_next
        total += (2 * l + 1) / (p.two_s + 1) * p_curr
    return total


def moyal_system(
    p: SpinParams, grid: SphereGrid, allow_underresolved: bool = False
) -> TomographicSystem:
    """Spin system: analysis = dual kernels, synthesis = coherent projectors."""
    need_theta = p.two_s + 1
    need_phi = 2 * p.two_s + 2
    if not allow_underresolved and (
        len(grid.theta_nodes) < need_theta or len(grid.phi_nodes) < need_phi
    ):
        raise ValueError(
            f"grid is under-resolved for 2s={p.two_s}: need at least "
            f"{need_theta} theta nodes and {need_phi} phi nodes"
        )
    index_grid = grid.to_index_grid(p)
    direct = {node: kernel_direct(p, *node) for node in index_grid.nodes}
    dual = {node: kernel_dual(p, *node) for node in index_grid.nodes}
    return TomographicSystem(
        dim=p.dim,
        grid=index_grid,
        analysis=dual.__getitem__,
        synthesis=direct.__getitem__,
        vacuum=kernel_direct(p, 0.0, 0.0),
        test_functional=kernel_dual(p, 0.0, 0.0),
        normalization=1.0,
    )


def spin_symbols(p: SpinParams, rho: DensityMatrix, grid: SphereGrid) -> SampleVector:
    """Spherical symbol Tr(rho Delta^n) sampled over the grid."""
    return analyze(moyal_system(p, grid, allow_underresolved=True), rho.op)
