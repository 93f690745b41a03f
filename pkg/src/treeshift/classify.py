"""Normality and normal-extension classification of weighted shifts on tree profiles.

Structural verdicts are decided exactly from the finite description of a
profile.  :func:`commutator_defect` gives an independent dense-matrix check of
``S*S = SS*`` on truncations, restricted to vertices whose neighbourhood
survived the cut.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError, TreeShiftError, WindowError
from .moments import lambda1_bound_check
from .shift import SparseVector, Tail, WeightedShift, WeightFamily, moduli_equal, to_dense
from .tree import (
    FiniteTree,
    Kind,
    PathEnumeration,
    Shape,
    TreeProfile,
    VertexId,
    Window,
    path_shape,
    truncate,
    zhat_profile,
)

SUBNORMALITY_NOTE = (
    "subnormality is not certified; only the necessary weight pattern and the "
    "finite Stieltjes test of the root moments are enforced"
)


class NormalityStatus(enum.Enum):
    FORMALLY_NORMAL = "FormallyNormalNormal"
    NOT = "Not"
    ZERO = "ZeroOperator"


class NormalityReason(enum.Enum):
    NO_BI_INFINITE_PATH = "NoBiInfinitePath"
    NONCONSTANT_MODULUS = "NonconstantModulus"
    NONZERO_OFF_PATH = "NonzeroOffPath"


@dataclass(frozen=True)
class FormalNormalityVerdict:
    status: NormalityStatus
    path: PathEnumeration | None = None
    modulus: float | None = None
    reason: NormalityReason | None = None
    vertex: VertexId | None = None

    @property
    def is_normal(self) -> bool:
        return self.status == NormalityStatus.FORMALLY_NORMAL

    def label(self) -> str:
        if self.reason is not None:
            return f"{self.status.value}({self.reason.value})"
        return self.status.value


def _not(reason: NormalityReason, vertex: VertexId | None = None) -> FormalNormalityVerdict:
    return FormalNormalityVerdict(NormalityStatus.NOT, reason=reason, vertex=vertex)


def _tail_breaks(tail: Tail, make_vertex) -> VertexId | None:
    """First vertex of a stem/ray whose weight vanishes, if any."""
    for k, x in enumerate(tail.prefix, 1):
        if x == 0:
            return make_vertex(k)
    if tail.tail_modulus == 0:
        return make_vertex(len(tail.prefix) + 1)
    return None


def formal_normality(shift: WeightedShift) -> FormalNormalityVerdict:
    """Decide formal normality (equivalently: bounded and normal) from the weight structure.

    Holds exactly when the nonzero weights sit on one bi-infinite path of
    parent links and all have the same modulus.
    """
    if shift.is_zero():
        return FormalNormalityVerdict(NormalityStatus.ZERO)
    tree = shift.tree
    if not isinstance(tree, TreeProfile) or not tree.stem:
        return _not(NormalityReason.NO_BI_INFINITE_PATH)
    w = shift.weights
    broken = _tail_breaks(w.stem, lambda k: VertexId.stem(-k))
    if broken is not None:
        return _not(NormalityReason.NO_BI_INFINITE_PATH, broken)
    root = tree.core.root
    if shift.weight(root) == 0:
        return _not(NormalityReason.NO_BI_INFINITE_PATH, root)

    core_path = [root]
    while True:
        u = core_path[-1]
        live = [c for c in tree.children(u) if shift.weight(c) != 0]
        if len(live) >= 2:
            return _not(NormalityReason.NONZERO_OFF_PATH, u)
        if not live:
            return _not(NormalityReason.NO_BI_INFINITE_PATH, u)
        (nxt,) = live
        if nxt.kind == Kind.RAY:
            ray = nxt.name
            break
        core_path.append(nxt)
    broken = _tail_breaks(w.rays[ray], lambda k: VertexId.ray(ray, k))
    if broken is not None:
        return _not(NormalityReason.NO_BI_INFINITE_PATH, broken)
    path = PathEnumeration(tuple(core_path), ray, True)

    on_path = set(core_path)
    for v in sorted(w.explicit):
        if v not in on_path and w.explicit[v] != 0:
            return _not(NormalityReason.NONZERO_OFF_PATH, v)
    for name in sorted(w.rays):
        if name != ray:
            broken = _first_nonzero(w.rays[name], lambda k, n=name: VertexId.ray(n, k))
            if broken is not None:
                return _not(NormalityReason.NONZERO_OFF_PATH, broken)

    alpha = w.stem.tail_modulus
    for v, x in _path_weights(shift, path):
        if not moduli_equal(abs(x), alpha):
            return _not(NormalityReason.NONCONSTANT_MODULUS, v)
    return FormalNormalityVerdict(NormalityStatus.FORMALLY_NORMAL, path=path, modulus=alpha)


def _first_nonzero(tail: Tail, make_vertex) -> VertexId | None:
    for k, x in enumerate(tail.prefix, 1):
        if x != 0:
            return make_vertex(k)
    if tail.tail_modulus != 0:
        return make_vertex(len(tail.prefix) + 1)
    return None


def _path_weights(shift: WeightedShift, path: PathEnumeration):
    """Every distinct weight met along ``path`` (prefixes plus one tail representative each)."""
    lo = -(len(shift.weights.stem.prefix) + 1) if path.bilateral else 1
    hi = path.first_tail_position + len(shift.weights.rays[path.ray].prefix)
    for n in range(lo, hi + 1):
        v = path.vertex(n)
        yield v, shift.weight(v)


@dataclass
class CommutatorDefect:
    max_interior_defect: float
    matrix: np.ndarray
    basis: tuple[VertexId, ...]
    interior: tuple[VertexId, ...]
    worst_vertex: VertexId | None
    window: Window | None
    tol: float

    @property
    def passes(self) -> bool:
        return self.max_interior_defect <= self.tol


def interior_vertices(shift: WeightedShift, finite: FiniteTree) -> tuple[VertexId, ...]:
    """Vertices of ``finite`` whose parent and children (in the shift's own tree) all survive."""
    tree = shift.tree
    out = []
    for v in finite.vertices:
        p = tree.parent(v)
        if p is not None and p not in finite:
            continue
        if all(c in finite for c in tree.children(v)):
            out.append(v)
    return tuple(out)


def commutator_defect(shift: WeightedShift, window: Window | None = None, tol: float = 1e-10) -> CommutatorDefect:
    """Largest entry of ``M*M - MM*`` in rows indexed by interior vertices of a truncation."""
    if shift.is_profile:
        if window is None:
            raise WindowError("profiles need a truncation window for the commutator oracle")
        finite, _ = truncate(shift.tree, window)
    else:
        finite = shift.tree
    interior = interior_vertices(shift, finite)
    if not interior:
        raise WindowError(f"{window} leaves no interior vertex; enlarge the window")
    m = to_dense(shift, finite).matrix
    defect = m.conj().T @ m - m @ m.conj().T
    idx = {v: i for i, v in enumerate(finite.vertices)}
    rows = np.abs(defect[[idx[v] for v in interior], :])
    worst = float(rows.max())
    worst_vertex = interior[int(np.argmax(rows.max(axis=1)))] if worst > 0 else None
    return CommutatorDefect(worst, defect, finite.vertices, interior, worst_vertex, window, tol)


def separating_window(shift: WeightedShift) -> Window:
    """A window large enough that every prefix perturbation has interior rows in it."""
    w = shift.distinct_window()
    return Window(w.stem_depth + 2, w.ray_length + 2)


@dataclass(frozen=True)
class NormalDecomposition:
    """``S = alpha U (+) 0``: a bilateral path ``X`` carrying modulus ``alpha`` and the killed rest ``Y``."""

    alpha: float
    path: PathEnumeration
    zero_core: frozenset[VertexId]
    zero_rays: tuple[str, ...]

    def in_path(self, v: VertexId) -> bool:
        return v in self.path

    def zero_part(self, profile: TreeProfile, window: Window) -> list[VertexId]:
        finite, _ = truncate(profile, window)
        return [v for v in finite.vertices if not self.in_path(v)]


def decompose_normal(shift: WeightedShift, verdict: FormalNormalityVerdict | None = None,
                     window: Window | None = None) -> NormalDecomposition:
    if verdict is None:
        verdict = formal_normality(shift)
    if not verdict.is_normal:
        raise PreconditionError(f"decomposition needs a formally normal shift, got {verdict.label()}")
    path = verdict.path
    tree = shift.tree
    dec = NormalDecomposition(
        verdict.modulus,
        path,
        frozenset(v for v in tree.core.vertices if v not in path),
        tuple(n for n in tree.ray_names if n != path.ray),
    )
    finite, _ = truncate(tree, window or separating_window(shift))
    for u in finite.vertices:
        image = shift.apply(SparseVector.basis(u))
        if dec.in_path(u):
            if not all(dec.in_path(v) for v in image.support()):
                raise TreeShiftError(f"S e_{u} leaves the path part")
        elif len(image):
            raise TreeShiftError(f"S e_{u} is nonzero on the zero part")
    return dec


class ExtensionKind(enum.Enum):
    BILATERAL = "BilateralMultiple"
    PERTURBED_UNILATERAL = "PerturbedUnilateral"
    NOT_MODELABLE = "NotModelable"


class ModelReason(enum.Enum):
    ZERO_OPERATOR = "ZeroOperator"
    ZERO_WEIGHT = "ZeroWeight"
    NONCONSTANT_BILATERAL = "NonconstantBilateral"
    WEIGHT_PATTERN = "WeightPattern"
    BRANCHING_OR_LEAF = "BranchingOrLeaf"


@dataclass(frozen=True)
class ExtensionVerdict:
    kind: ExtensionKind
    alpha: float | None = None
    theta: float | None = None
    reason: ModelReason | None = None
    vertex: VertexId | None = None
    moment_check: bool | None = None
    note: str = SUBNORMALITY_NOTE

    def label(self) -> str:
        if self.kind == ExtensionKind.BILATERAL:
            return f"BilateralMultiple({self.alpha:.12g})"
        if self.kind == ExtensionKind.PERTURBED_UNILATERAL:
            return f"PerturbedUnilateral({self.alpha:.12g}, {self.theta:.12g})"
        return f"NotModelable({self.reason.value})"


def _not_modelable(reason: ModelReason, vertex: VertexId | None = None, **kw) -> ExtensionVerdict:
    return ExtensionVerdict(ExtensionKind.NOT_MODELABLE, reason=reason, vertex=vertex, **kw)


def _first_zero_weight(shift: WeightedShift) -> VertexId | None:
    w = shift.weights
    for v in sorted(w.explicit):
        if w.explicit[v] == 0:
            return v
    if w.stem is not None:
        hit = _tail_breaks(w.stem, lambda k: VertexId.stem(-k))
        if hit is not None:
            return hit
    for name in sorted(w.rays):
        hit = _tail_breaks(w.rays[name], lambda k, n=name: VertexId.ray(n, k))
        if hit is not None:
            return hit
    return None


def classify_extension(shift: WeightedShift, nonzero_weights_required: bool = True) -> ExtensionVerdict:
    """Which weighted-shift model, if any, a normal extension of ``shift`` can have.

    Only two shapes qualify: a positive multiple of the bilateral shift, and a
    positive multiple of the half-line shift with weights ``theta, 1, 1, ...``
    for ``0 < theta <= 1``.
    """
    if shift.is_zero():
        return _not_modelable(ModelReason.ZERO_OPERATOR)
    if nonzero_weights_required:
        zero = _first_zero_weight(shift)
        if zero is not None:
            return _not_modelable(ModelReason.ZERO_WEIGHT, zero)
    if not isinstance(shift.tree, TreeProfile):
        return _not_modelable(ModelReason.BRANCHING_OR_LEAF)
    shape = path_shape(shift.tree)
    if shape.kind == Shape.NOT_A_PATH:
        return _not_modelable(ModelReason.BRANCHING_OR_LEAF)
    path = shape.enumeration

    if shape.kind == Shape.Z_PATH:
        alpha = shift.weights.stem.tail_modulus
        for v, x in _path_weights(shift, path):
            if alpha == 0 or not moduli_equal(abs(x), alpha):
                return _not_modelable(ModelReason.NONCONSTANT_BILATERAL, v)
        return ExtensionVerdict(ExtensionKind.BILATERAL, alpha=alpha)

    alpha = shift.weights.rays[path.ray].tail_modulus
    pattern_ok = alpha > 0
    vertex = None
    for v, x in _path_weights(shift, path):
        if path.position(v) >= 2 and not moduli_equal(abs(x), alpha):
            pattern_ok, vertex = False, v
            break
    if not pattern_ok:
        return _not_modelable(ModelReason.WEIGHT_PATTERN, vertex)
    first = path.vertex(1)
    theta = abs(shift.weight(first)) / alpha
    if moduli_equal(theta, 1.0):
        theta = 1.0
    moments_ok = lambda1_bound_check(shift)
    if not 0 < theta <= 1:
        return _not_modelable(ModelReason.WEIGHT_PATTERN, first, moment_check=moments_ok)
    return ExtensionVerdict(ExtensionKind.PERTURBED_UNILATERAL, alpha=alpha, theta=theta, moment_check=moments_ok)


@dataclass(frozen=True)
class ExtensionModel:
    """Normal extension of the half-line shift ``alpha * (theta, 1, 1, ...)`` on the line with a leaf at 0.

    ``embedded(n)`` is the image of the ``n``-th basis vector of the half line.
    """

    alpha: float
    theta: float
    shift: WeightedShift
    leaf: VertexId = field(default_factory=lambda: VertexId.core("omega"))

    def embedded(self, n: int) -> SparseVector:
        if n < 0:
            raise DomainError("embedding index must be nonnegative")
        if n == 0:
            return SparseVector({self.leaf: math.sqrt(1 - self.theta ** 2), VertexId.core("0"): self.theta})
        return SparseVector.basis(VertexId.ray("", n))

    def embedded_basis(self, count: int) -> list[SparseVector]:
        return [self.embedded(n) for n in range(count)]


def build_extension_model(alpha: float, theta: float, leaf: str = "omega") -> ExtensionModel:
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not 0 < theta <= 1:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    profile = zhat_profile(leaf)
    leaf_v = VertexId.core(leaf)
    weights = WeightFamily({VertexId.core("0"): alpha, leaf_v: 0.0}, Tail((), alpha), {"": Tail((), alpha)})
    return ExtensionModel(alpha, theta, WeightedShift(profile, weights), leaf_v)


@dataclass
class CheckResult:
    passed: bool
    residual: float


@dataclass
class ExtensionReport:
    alpha: float
    theta: float
    window: int
    tol: float
    checks: dict[str, CheckResult]
    restriction_weights: tuple[float, ...]
    restriction: np.ndarray

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    @property
    def max_residual(self) -> float:
        return max(c.residual for c in self.checks.values())


def verify_extension(shift: WeightedShift, model: ExtensionModel, window: int = 30,
                     tol: float = 1e-12) -> ExtensionReport:
    """Check that ``model`` carries a normal extension of ``shift`` on the first ``window + 1`` vectors."""
    verdict = classify_extension(shift)
    if verdict.kind != ExtensionKind.PERTURBED_UNILATERAL:
        raise PreconditionError(f"shift classifies as {verdict.label()}, not PerturbedUnilateral")
    if not (moduli_equal(verdict.alpha, model.alpha) and moduli_equal(verdict.theta, model.theta)):
        raise PreconditionError(
            f"model built for ({model.alpha}, {model.theta}) but shift has ({verdict.alpha}, {verdict.theta})")
    if window < 1:
        raise WindowError("verify_extension needs a window of at least 1")
    alpha, theta = model.alpha, model.theta
    n = model.shift
    basis = model.embedded_basis(window + 2)
    checks: dict[str, CheckResult] = {}

    gram = np.array([[a.inner(b) for b in basis[:window + 1]] for a in basis[:window + 1]])
    r = float(np.abs(gram - np.eye(window + 1)).max())
    checks["orthonormal"] = CheckResult(r <= tol, r)

    r = 0.0
    for k in range(window + 1):
        factor = alpha * theta if k == 0 else alpha
        r = max(r, (n.apply(basis[k]) - factor * basis[k + 1]).norm())
    checks["invariant_subspace"] = CheckResult(r <= tol, r)

    # compressed matrix <N e~_j, e~_i> against the half-line shift it should reproduce
    images = [n.apply(b) for b in basis[:window + 1]]
    restriction = np.array([[images[j].inner(basis[i]) for j in range(window + 1)] for i in range(window + 1)])
    path = path_shape(shift.tree).enumeration
    expected = np.zeros((window + 1, window + 1), dtype=complex)
    for k in range(window):
        expected[k + 1, k] = abs(shift.weight(path.vertex(k + 1)))
    r = float(np.abs(restriction - expected).max())
    checks["restriction_matches"] = CheckResult(r <= tol, r)

    fn = formal_normality(n)
    r = abs(fn.modulus - alpha) if fn.is_normal else math.inf
    checks["model_normal"] = CheckResult(fn.is_normal and r <= tol, r)

    # a proper perturbation (theta < 1) cannot be an isometry up to scale
    root_norm = math.sqrt(shift.basis_norm_sq(shift.tree.core.root))
    r = abs(root_norm - alpha * theta)
    isometric = moduli_equal(root_norm, alpha)
    checks["non_isometry"] = CheckResult(r <= tol and (isometric == (theta == 1.0)), r)

    sub = tuple(float(restriction[k + 1, k].real) for k in range(window))
    return ExtensionReport(alpha, theta, window, tol, checks, sub, restriction)
