"""Weighted shifts on directed trees: normality, normal-extension models and numeric cross-checks."""

from .classify import (
    ExtensionKind,
    ExtensionModel,
    ExtensionVerdict,
    FormalNormalityVerdict,
    ModelReason,
    NormalityReason,
    NormalityStatus,
    build_extension_model,
    classify_extension,
    commutator_defect,
    decompose_normal,
    formal_normality,
    verify_extension,
)
from .errors import DomainError, PreconditionError, SpecError, TreeShiftError, WindowError
from .moments import MomentSequence, delta1_check, lambda1_bound_check, stieltjes_check
from .shift import DenseOperator, SparseVector, Tail, WeightedShift, WeightFamily, operator_norm, to_dense
from .specfile import load_spec, parse_spec, serialize
from .tree import (
    FiniteTree,
    Shape,
    TreeProfile,
    VertexId,
    Window,
    branching_vertices,
    chi_n,
    descendants,
    is_leafless,
    iter_parent,
    path_shape,
    truncate,
    z_profile,
    zhat_profile,
    zplus_profile,
)

__version__ = "0.1.0"
