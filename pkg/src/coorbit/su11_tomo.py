"""Hyperbolic-ladder (SU(1,1)-type) tomography in the discrete series.

Generators at Bargmann index k act on levels |r>, r = 0, 1, ... via
K+|r> = sqrt((r+1)(r+2k))|r+1>, Kz|r> = (r+k)|r>. The analysis family B is
an anticommutator of a hyperbolic group element with Kz; the synthesis
family pi is the hyperbolically rotated Kz. Both are evaluated through
closed forms that are exact entrywise at truncation:

* the group exponential E = exp(xi K+ - conj(xi) K-) via the disentangled
  triangular product e^{zeta K+} (1-|zeta|^2)^{Kz} e^{-conj(zeta) K-} with
  zeta = tanh(theta) e^{i(phi+pi)};
* pi(theta, phi) = cosh(theta) Kz
  + (i/2) sinh(theta) (-e^{-i phi} K+ + e^{i phi} K-).

The measure is (1/(4 pi)) dphi tanh(theta) dtheta with a configurable
theta_max; biorthogonality and probe admissibility are checked by
quadrature with convergence ladders in theta_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frame_core import IndexGrid, TomographicSystem, analyze, synthesize
from .opalg import DensityMatrix, Operator

INTERIOR_MARGIN = 2  # top levels excluded from algebra assertions


@dataclass(frozen=True)
class DiscreteSeriesRep:
    """Discrete-series representation data: Bargmann index k and truncation."""

    k: float
    cutoff: int

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("Bargmann index must be positive")
        if self.cutoff < 2:
            raise ValueError("cutoff must be at least 2")


def _kplus(k: float, d: int) -> np.ndarray:
    m = np.zeros((d, d))
    for r in range(d - 1):
        m[r + 1, r] = math.sqrt((r + 1) * (r + 2 * k))
    return m


def generators(rep: DiscreteSeriesRep):
    """(K+, K-, Kz) as Operators; K- = K+^dag, Kz diagonal r + k."""
    kp = _kplus(rep.k, rep.cutoff)
    kz = np.diag(np.arange(rep.cutoff) + rep.k)
    return Operator(kp), Operator(kp.T), Operator(kz)


def casimir_scalar(rep: DiscreteSeriesRep) -> float:
    """Interior diagonal value of Kz^2 - (K+K- + K-K+)/2.

    With this ladder realization the scalar is k(k-1); the value is reported
    for comparison against alternative conventions, never adjusted.
    """
    kp, km, kz = (g.entries for g in generators(rep))
    cas = kz @ kz - (kp @ km + km @ kp) / 2
    interior = np.diag(cas).real[: rep.cutoff - INTERIOR_MARGIN]
    return float(interior.mean())


def group_element(rep: DiscreteSeriesRep, theta: float, phi: float) -> Operator:
    """E = exp(theta (e^{-i phi} K- - e^{i phi} K+)), exact at truncation.

    Disentangled as a lower-triangular x diagonal x upper-triangular
    product, so every retained matrix element involves only retained levels.
    """
    d = rep.cutoff
    if theta == 0:
        return Operator(np.eye(d))
    zeta = -math.tanh(theta) * np.exp(1j * phi)
    kp = _kplus(rep.k, d).astype(complex)

    def tri_exp(m):
        out = np.eye(d, dtype=complex)
        term = np.eye(d, dtype=complex)
        for j in range(1, d):
            term = term @ m / j
            if not np.abs(term).max() > 0:
                break
            out += term
        return out

    mid = np.diag((1 - abs(zeta) ** 2) ** (np.arange(d) + rep.k)).astype(complex)
    return Operator(tri_exp(zeta * kp) @ mid @ tri_exp(-np.conj(zeta) * kp.T))


def analysis_B(rep: DiscreteSeriesRep, theta: float, phi: float) -> Operator:
    """Analysis operator: anticommutator of the signed group element with Kz.

    B = {(-1)^(Kz - k) E(theta, phi), Kz}; entrywise
    B[m, n] = (m + n + 2k) (-1)^m E[m, n]. The parity is taken relative to
    the lowest weight ((-1)^(Kz - k)) so the diagonal biorthogonality
    integrals converge to +1.
    """
    e = group_element(rep, theta, phi).entries
    m = np.arange(rep.cutoff)
    signed = ((-1.0) ** m)[:, None] * e
    fac = m[:, None] + m[None, :] + 2 * rep.k
    return Operator(fac * signed)


def synthesis_pi(rep: DiscreteSeriesRep, theta: float, phi: float) -> Operator:
    """Synthesis operator: hyperbolic rotation of Kz (exact closed form).

    pi = cosh(theta) Kz + (i/2) sinh(theta) (-e^{-i phi} K+ + e^{i phi} K-);
    Hermitian by construction, reduces to Kz at theta = 0.
    """
    kp, km, kz = (g.entries.astype(complex) for g in generators(rep))
    mat = math.cosh(theta) * kz + 0.5j * math.sinh(theta) * (
        -np.exp(-1j * phi) * kp + np.exp(1j * phi) * km
    )
    return Operator(mat)


@dataclass(frozen=True)
class SUGrid:
    """Quadrature for the measure (1/(4 pi)) dphi tanh(theta) dtheta.

    Gauss-Legendre theta nodes on [0, theta_max], uniform phi nodes; the
    tanh factor and measure prefactor are folded into the weights.
    """

    theta_max: float
    n_theta: int
    n_phi: int

    def __post_init__(self):
        if self.theta_max <= 0 or self.n_theta < 1 or self.n_phi < 1:
            raise ValueError("need theta_max > 0 and positive node counts")

    def to_index_grid(self) -> IndexGrid:
        tn, tw = np.polynomial.legendre.leggauss(self.n_theta)
        theta = (tn + 1) * self.theta_max / 2
        tw = tw * self.theta_max / 2
        phi = np.arange(self.n_phi) * 2 * math.pi / self.n_phi
        phw = 2 * math.pi / self.n_phi
        nodes = []
        weights = []
        for th, wt in zip(theta, tw):
            for ph in phi:
                nodes.append((float(th), float(ph)))
                weights.append(wt * math.tanh(th) * phw / (4 * math.pi))
        return IndexGrid(tuple(nodes), np.array(weights))


def su11_system(rep: DiscreteSeriesRep, grid: SUGrid) -> TomographicSystem:
    """System with analysis = B, synthesis = pi over the hyperbolic grid."""
    if rep.cutoff < 6:
        raise ValueError("need cutoff >= 6")
    index_grid = grid.to_index_grid()
    b_cache = {node: analysis_B(rep, *node) for node in index_grid.nodes}
    pi_cache = {node: synthesis_pi(rep, *node) for node in index_grid.nodes}
    return TomographicSystem(
        dim=rep.cutoff,
        grid=index_grid,
        analysis=b_cache.__getitem__,
        synthesis=pi_cache.__getitem__,
        vacuum=Operator(np.eye(rep.cutoff)),
        test_functional=Operator(np.eye(rep.cutoff)),
        normalization=1.0,
    )


def biorthogonality_check(rep: DiscreteSeriesRep, grid: SUGrid, indices) -> complex:
    """Quadrature of the pairing sum_x w_x <m|B^dag(x)|n> <l|pi(x)|q>.

    Converges to delta_{mq} delta_{nl}-type values as theta_max grows;
    indices near the truncation boundary are unreliable (warning range is
    the top INTERIOR_MARGIN levels).
    """
    m, n, l, q = indices
    if max(indices) >= rep.cutoff - INTERIOR_MARGIN:
        raise ValueError("indices must sit at least two levels below the cutoff")
    total = 0j
    for node, w in zip(*_grid_arrays(grid)):
        b = analysis_B(rep, *node).entries
        p = synthesis_pi(rep, *node).entries
        total += w * np.conj(b[m, n]) * p[l, q]
    return complex(total)


def _grid_arrays(grid: SUGrid):
    ig = grid.to_index_grid()
    return ig.nodes, ig.weights


def biorthogonality_ladder(
    rep: DiscreteSeriesRep, theta_maxes, n_theta: int = 80, n_phi: int = 16
):
    """Diagonal/off-diagonal biorthogonality values over a theta_max ladder.

    Returns {"theta_max": [...], "diag_value": [...], "offdiag_max": [...]}
    using the (0,0,0,0) diagonal entry and the (0,1,0,0) off-diagonal entry.
    """
    diag = []
    off = []
    for tm in theta_maxes:
        grid = SUGrid(tm, n_theta, n_phi)
        diag.append(biorthogonality_check(rep, grid, (0, 0, 0, 0)).real)
        off.append(abs(biorthogonality_check(rep, grid, (0, 1, 0, 0))))
    return {
        "theta_max": [float(t) for t in theta_maxes],
        "diag_value": diag,
        "offdiag_max": off,
    }


def reconstruct_su11(rho: DensityMatrix, rep: DiscreteSeriesRep, grid: SUGrid) -> Operator:
    """Resummation sum_x w_x Tr(B(x)^dag rho) pi(x).

    Note the synthesis family spans only the three-dimensional algebra
    {Kz, K+, K-}, so the output is the projection of the quadrature pairing
    onto that span — see the biorthogonality ladder for the matrix elements
    the pairing does resolve.
    """
    sys = su11_system(rep, grid)
    return synthesize(sys, analyze(sys, rho.op))


def thermal_probe(rep: DiscreteSeriesRep, b: float) -> Operator:
    """Geometric diagonal probe p0 = sum_r b^r |r><r|."""
    if not 0 < b < 1:
        raise ValueError("thermal parameter must lie in (0, 1)")
    return Operator(np.diag(b ** np.arange(rep.cutoff, dtype=float)).astype(complex))


def thermal_admissibility(rep: DiscreteSeriesRep, b: float, grid: SUGrid) -> complex:
    """Probe admissibility with the analysis family (the group orbit side).

    C = sum_x w_x Tr(B(x)^dag p0) Tr(B(x)); equals 1/(1-b) = 2 at b = 1/2
    for large theta_max and cutoff.
    """
    from .frame_core import singular_admissibility

    sys = su11_system(rep, grid)
    return singular_admissibility(sys, thermal_probe(rep, b), family="analysis")
