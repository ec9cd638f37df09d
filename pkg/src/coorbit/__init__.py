"""Operator-reconstruction toolkit over coherent-state-style frames.

Five instantiations of one analyze/synthesize engine: spin kernels on the
sphere, displacement operators on the finite lattice, homodyne displacement
families on truncated Fock space, symplectic marginal inversion, and
hyperbolic-ladder (SU(1,1)-type) dual pairs.
"""

from .opalg import (
    DensityMatrix,
    Operator,
    eig_hermitian,
    fidelity,
    hs_inner,
    matrix_exp,
    tensor,
)
from .frame_core import (
    FrameReport,
    IndexGrid,
    RegularizerSpec,
    SampleVector,
    TomographicSystem,
    admissibility_constant,
    analyze,
    coorbit_norm,
    frame_bounds,
    roundtrip,
    singular_admissibility,
    synthesize,
)

__all__ = [
    "DensityMatrix",
    "Operator",
    "eig_hermitian",
    "fidelity",
    "hs_inner",
    "matrix_exp",
    "tensor",
    "FrameReport",
    "IndexGrid",
    "RegularizerSpec",
    "SampleVector",
    "TomographicSystem",
    "admissibility_constant",
    "analyze",
    "coorbit_norm",
    "frame_bounds",
    "roundtrip",
    "singular_admissibility",
    "synthesize",
]

__version__ = "0.1.0"
