"""Generic analysis/synthesis engine over an index grid.

A :class:`TomographicSystem` bundles a quadrature grid over some index set X
with two operator families: an *analysis* family (sampling an operator gives
``values[i] = Tr(O analysis(x_i)^dag)``) and a *synthesis* family (the
weighted sum ``sum_i w_i values[i] synthesis(x_i)`` rebuilds an operator).
Admissibility constants, frame bounds from the mixed Gram superoperator,
weighted-norm functionals and JSON serialization of grids and sample vectors
all live here; the concrete instantiations (spin, finite lattice, homodyne,
symplectic, SU(1,1)) only supply grids and operator families.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .opalg import Operator, hs_inner, kahan_matrix_sum

GRAM_DIM_LIMIT = 4096


@dataclass(frozen=True)
class IndexGrid:
    """Quadrature nodes over the index set with positive measure weights.

    Each node is a tuple of coordinates (the full group coordinates of the
    point); the node ordering is fixed at construction and preserved by
    serialization, so all reductions are deterministic.
    """

    nodes: tuple
    weights: np.ndarray

    def __post_init__(self):
        nodes = tuple(tuple(float(c) for c in node) for node in self.nodes)
        weights = np.asarray(self.weights, dtype=float).copy()
        if weights.ndim != 1 or len(nodes) != weights.shape[0]:
            raise ValueError("weights must be a vector aligned with nodes")
        if not np.all(weights > 0):
            raise ValueError("all grid weights must be positive")
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def grid_id(self) -> str:
        return hashlib.sha256(grid_to_json(self).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SampleVector:
    """Complex samples of a transform, aligned with a grid's node order."""

    values: np.ndarray
    grid_id: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).copy()
        if values.ndim != 1:
            raise ValueError("sample values must be a vector")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class FrameReport:
    """Empirical frame bounds and admissibility for a system."""

    A: float
    B: float
    gram_spectrum_min: float
    gram_spectrum_max: float
    admissibility: complex

    def __post_init__(self):
        if not (0 < self.A <= self.B):
            raise ValueError(f"frame bounds must satisfy 0 < A <= B, got {self.A}, {self.B}")


@dataclass(frozen=True)
class RegularizerSpec:
    """Gaussian damping factor R_delta(x) = exp(-x^2 / (2 delta^2))."""

    delta: float
    kind: str = "gaussian"

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("regularizer width must be positive")
        if self.kind != "gaussian":
            raise ValueError(f"unknown regularizer kind {self.kind!r}")

    def __call__(self, x: float) -> float:
        return math.exp(-x * x / (2 * self.delta**2))


@dataclass(frozen=True)
class TomographicSystem:
    """Grid plus paired analysis/synthesis operator families.

    ``analysis(node)`` and ``synthesis(node)`` return Operators of the
    system dimension; ``vacuum`` seeds the synthesis family, the
    ``test_functional`` operator L0 realizes the analysis functional through
    the trace pairing, and ``normalization`` is the constant P dividing the
    analyze -> synthesize round trip.
    """

    dim: int
    grid: IndexGrid
    analysis: Callable[[tuple], Operator]
    synthesis: Callable[[tuple], Operator]
    vacuum: Operator
    test_functional: Operator
    normalization: complex

    def __post_init__(self):
        p = complex(self.normalization)
        if p == 0 or not (math.isfinite(p.real) and math.isfinite(p.imag)):
            raise ValueError("normalization constant must be nonzero and finite")


class AdmissibilityResult(NamedTuple):
    constant: complex
    projection: complex


def analyze(sys: TomographicSystem, o: Operator) -> SampleVector:
    """Sample an operator against the analysis family.

    values[i] = Tr(o analysis(x_i)^dag); linear in o.
    """
    if o.dim != sys.dim:
        raise ValueError(f"dimension mismatch: operator {o.dim}, system {sys.dim}")
    values = np.array(
        [hs_inner(sys.analysis(node), o) for node in sys.grid.nodes], dtype=complex
    )
    return SampleVector(values, sys.grid.grid_id)


def synthesize(sys: TomographicSystem, s: SampleVector) -> Operator:
    """Weighted resummation of samples over the synthesis family."""
    if s.grid_id != sys.grid.grid_id or len(s.values) != len(sys.grid):
        raise ValueError("sample vector is not aligned with the system grid")
    terms = (
        w * v * sys.synthesis(node).entries
        for node, w, v in zip(sys.grid.nodes, sys.grid.weights, s.values)
    )
    return Operator(kahan_matrix_sum(terms, (sys.dim, sys.dim)))


def roundtrip(sys: TomographicSystem, o: Operator):
    """synthesize(analyze(o)) / P and its Hilbert-Schmidt error against o."""
    if abs(complex(sys.normalization)) < 1e-14:
        raise ValueError("system is non-admissible (normalization ~ 0)")
    rec = synthesize(sys, analyze(sys, o)) * (1 / complex(sys.normalization))
    return rec, float(np.linalg.norm(rec.entries - o.entries))


def admissibility_constant(
    sys: TomographicSystem, b0p: Operator, l0p: Operator
) -> AdmissibilityResult:
    """Quadrature admissibility constant for a vacuum/functional pair.

    C = sum_i w_i <analysis(x_i), sys.vacuum> <l0p, synthesis(x_i)>, together
    with the projection constant P = C / <l0p, sys.vacuum> when the
    denominator is nonzero (NaN otherwise). ``b0p`` replaces the system
    vacuum on the analysis side, covering the primed-vacuum variant.
    """
    c = 0j
    comp = 0j
    for node, w in zip(sys.grid.nodes, sys.grid.weights):
        term = w * hs_inner(sys.analysis(node), b0p) * hs_inner(l0p, sys.synthesis(node))
        y = term - comp
        s = c + y
        comp = (s - c) - y
        c = s
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError("admissibility quadrature diverged (non-admissible system)")
    denom = hs_inner(l0p, sys.vacuum)
    proj = c / denom if abs(denom) > 1e-14 else complex("nan")
    return AdmissibilityResult(c, proj)


def singular_admissibility(
    sys: TomographicSystem, probe: Operator, family: str = "synthesis"
) -> complex:
    """Probe-regularized admissibility constant for singular vacua.

    C(b0, p0) = < sum_i w_i <family(x_i), probe> family(x_i), L0 >, where the
    operator family is the system's stored image of the group orbit through
    the vacuum (``synthesis`` by default; ``analysis`` for systems whose
    synthesis side is a dual family rather than the orbit itself).
    """
    if probe.dim != sys.dim:
        raise ValueError(f"dimension mismatch: probe {probe.dim}, system {sys.dim}")
    if family not in ("synthesis", "analysis"):
        raise ValueError(f"unknown family {family!r}")
    fam = sys.synthesis if family == "synthesis" else sys.analysis
    l0 = sys.test_functional
    total = 0j
    comp = 0j
    for node, w in zip(sys.grid.nodes, sys.grid.weights):
        op = fam(node)
        term = w * hs_inner(op, probe) * hs_inner(l0, op)
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
    if not (math.isfinite(total.real) and math.isfinite(total.imag)):
        raise ValueError("singular admissibility quadrature diverged")
    return total


def check_vacuum_invariance(
    sys: TomographicSystem, subgroup_samples: Sequence[Operator]
) -> list:
    """Verify the vacuum is fixed (up to phase) by stabilizer elements.

    Each sample h acts on the vacuum by conjugation; the report lists the
    best-fit proportionality factor chi(h) and the residual
    ||h b0 h^dag - chi b0||. Reporting only — nothing is asserted here.
    """
    b0 = sys.vacuum
    nsq = hs_inner(b0, b0).real
    report = []
    for h in subgroup_samples:
        moved = h.entries @ b0.entries @ h.entries.conj().T
        chi = complex(np.vdot(b0.entries, moved)) / nsq if nsq > 0 else 0j
        residual = float(np.linalg.norm(moved - chi * b0.entries))
        report.append({"chi": chi, "residual": residual})
    return report


def coorbit_norm(s: SampleVector, grid: IndexGrid, d: float) -> float:
    """Weighted l^d norm of a sample vector; d = inf gives the sup norm."""
    if len(s.values) != len(grid):
        raise ValueError("sample vector is not aligned with the grid")
    if d == math.inf:
        return float(np.abs(s.values).max()) if len(s.values) else 0.0
    if d < 1:
        raise ValueError("norm exponent must be >= 1")
    return float(np.sum(grid.weights * np.abs(s.values) ** d) ** (1 / d))


def frame_bounds(
    sys: TomographicSystem, d: float = 2, sample_count: int = 256, seed: int = 0
) -> FrameReport:
    """Frame bounds of the analysis/synthesis pair.

    For d = 2 the mixed Gram superoperator
    S = sum_i w_i vec(synthesis_i) vec(analysis_i)^dag is assembled as a
    dim^2 x dim^2 matrix, symmetrized and diagonalized; A and B are the
    square roots of its extreme eigenvalues. For d != 2 the bounds are
    sampled empirically over random unit-norm operators (estimates, not
    certificates).
    """
    dim = sys.dim
    if dim * dim > GRAM_DIM_LIMIT:
        raise ValueError(
            f"dim^2 = {dim * dim} exceeds the Gram limit {GRAM_DIM_LIMIT}; "
            "use a smaller system"
        )
    adm = admissibility_constant(sys, sys.vacuum, sys.test_functional).constant
    if d == 2:
        n = len(sys.grid)
        va = np.empty((n, dim * dim), dtype=complex)
        vs = np.empty((n, dim * dim), dtype=complex)
        for i, node in enumerate(sys.grid.nodes):
            va[i] = sys.analysis(node).entries.ravel()
            vs[i] = sys.synthesis(node).entries.ravel()
        gram = (vs * sys.grid.weights[:, None]).T @ va.conj()
        gram = (gram + gram.conj().T) / 2
        evals = np.linalg.eigvalsh(gram)
        lo, hi = float(evals[0]), float(evals[-1])
    else:
        rng = np.random.default_rng(seed)
        ratios = []
        for _ in range(sample_count):
            m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            m /= np.linalg.norm(m)
            ratios.append(coorbit_norm(analyze(sys, Operator(m)), sys.grid, d))
        lo, hi = min(ratios) ** 2, max(ratios) ** 2
    a = math.sqrt(max(lo, 0.0))
    b = math.sqrt(max(hi, 0.0))
    return FrameReport(a, b, lo, hi, adm)


# ---------------------------------------------------------------------------
# JSON serialization (bit-exact round trips: floats are emitted with the
# shortest representation that reparses to the identical double).


def grid_to_json(grid: IndexGrid) -> str:
    return json.dumps(
        {
            "nodes": [{"coords": list(node)} for node in grid.nodes],
            "weights": list(grid.weights),
        }
    )


def grid_from_json(text: str) -> IndexGrid:
    doc = json.loads(text)
    nodes = tuple(tuple(n["coords"]) for n in doc["nodes"])
    return IndexGrid(nodes, np.array(doc["weights"], dtype=float))


def sample_to_json(s: SampleVector) -> str:
    return json.dumps(
        {
            "grid_id": s.grid_id,
            "values": [[v.real, v.imag] for v in s.values],
        }
    )


def sample_from_json(text: str) -> SampleVector:
    doc = json.loads(text)
    values = np.array([complex(re, im) for re, im in doc["values"]], dtype=complex)
    return SampleVector(values, doc["grid_id"])
