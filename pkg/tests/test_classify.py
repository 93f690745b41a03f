import cmath
import math

import numpy as np
import pytest

from treeshift.classify import (
    ExtensionKind,
    ModelReason,
    NormalityReason,
    NormalityStatus,
    build_extension_model,
    classify_extension,
    commutator_defect,
    decompose_normal,
    formal_normality,
    separating_window,
    verify_extension,
)
from treeshift.errors import DomainError, PreconditionError, WindowError
from treeshift.generators import bilateral_shift, random_branching_profile, unilateral_shift
from treeshift.moments import lambda1_bound_check
from treeshift.shift import SparseVector, Tail, WeightedShift, WeightFamily
from treeshift.tree import FiniteTree, TreeProfile, VertexId, Window, z_profile

C = VertexId.core
S = VertexId.stem


def R(i, name=""):
    return VertexId.ray(name, i)


def model_shift(alpha=1.0):
    return build_extension_model(alpha, 0.5).shift


# -- formal normality ----------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_bilateral_constant_modulus_is_normal(alpha):
    v = formal_normality(bilateral_shift(alpha))
    assert v.status == NormalityStatus.FORMALLY_NORMAL
    assert v.modulus == alpha
    assert v.path.vertices(-1, 1) == [S(-1), C("0"), R(1)]


def test_model_is_normal():
    v = formal_normality(model_shift())
    assert v.is_normal and v.modulus == 1.0
    assert C("omega") not in v.path


def test_half_line_never_normal():
    for w in ([0.5], [1.0], [2.0, 3.0]):
        v = formal_normality(unilateral_shift(w))
        assert v.status == NormalityStatus.NOT
        assert v.reason == NormalityReason.NO_BI_INFINITE_PATH


def test_zero_operator_outcome():
    z = WeightedShift(z_profile(), WeightFamily({C("0"): 0}, Tail((), 0), {"": Tail((), 0)}))
    assert formal_normality(z).status == NormalityStatus.ZERO
    assert classify_extension(z).reason == ModelReason.ZERO_OPERATOR
    assert commutator_defect(z, Window(4, 4)).max_interior_defect == 0.0


def test_nonconstant_modulus():
    v = formal_normality(bilateral_shift(1.0, ray_prefix=[1, 2]))
    assert v.reason == NormalityReason.NONCONSTANT_MODULUS
    assert v.vertex == R(2)
    v = formal_normality(bilateral_shift(1.0, stem_prefix=[1j], ray_prefix=[]).map_weights(lambda u, x: x)
                         .scaled(1.0))
    assert v.is_normal


def test_phases_do_not_matter():
    s = bilateral_shift(2.0, core_weight=-2, stem_prefix=[2j, -2j], ray_prefix=[cmath.rect(2, 0.3)])
    assert formal_normality(s).is_normal


def _profile(edges, root, stem, rays):
    return TreeProfile(FiniteTree.from_edges(edges, root=root), stem=stem, rays=rays)


def test_two_live_children_is_off_path():
    prof = _profile([("0", "a")], "0", True, [("0", ""), ("a", "t")])
    s = WeightedShift(prof, WeightFamily({C("0"): 1, C("a"): 1}, Tail((), 1), {"": Tail((), 1), "t": Tail((), 1)}))
    v = formal_normality(s)
    assert v.reason == NormalityReason.NONZERO_OFF_PATH and v.vertex == C("0")


def test_nonzero_weight_deep_off_path():
    # path through the ray at 0; branch a -> b carries a nonzero weight below a zero one
    prof = _profile([("0", "a"), ("a", "b")], "0", True, [("0", "")])
    s = WeightedShift(prof, WeightFamily({C("0"): 1, C("a"): 0, C("b"): 0.5}, Tail((), 1), {"": Tail((), 1)}))
    v = formal_normality(s)
    assert v.reason == NormalityReason.NONZERO_OFF_PATH and v.vertex == C("b")


def test_path_through_core_segment():
    prof = _profile([("0", "a"), ("a", "b"), ("0", "x")], "0", True, [("b", "up"), ("x", "side")])
    w = WeightFamily({C("0"): 1j, C("a"): 1, C("b"): -1, C("x"): 0},
                     Tail((), 1), {"up": Tail((1j,), 1), "side": Tail((0,), 0)})
    v = formal_normality(WeightedShift(prof, w))
    assert v.is_normal
    assert v.path.vertices(0, 4) == [C("0"), C("a"), C("b"), R(1, "up"), R(2, "up")]


def test_broken_stem_has_no_path():
    s = bilateral_shift(1.0, stem_prefix=[1, 0])
    v = formal_normality(s)
    assert v.reason == NormalityReason.NO_BI_INFINITE_PATH and v.vertex == S(-2)


# -- numeric commutator oracle -------------------------------------------------

@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_commutator_defect_normal(alpha):
    d = commutator_defect(bilateral_shift(alpha), Window(20, 20))
    assert d.max_interior_defect < 1e-12
    assert len(d.interior) == 39


def test_commutator_defect_perturbed():
    d = commutator_defect(bilateral_shift(1.0, ray_prefix=[1, 1, 2]), Window(20, 20))
    assert d.max_interior_defect == pytest.approx(3.0, abs=1e-12)
    assert d.worst_vertex in (R(2), R(3))


def test_commutator_defect_window_errors():
    with pytest.raises(WindowError):
        commutator_defect(bilateral_shift(1.0))
    with pytest.raises(WindowError):
        commutator_defect(bilateral_shift(1.0), Window(0, 0))


def test_interior_defect_matches_full_infinite_formula():
    # interior rows are exact: compare against the closed form of S*S - SS* on basis vectors
    rng = np.random.default_rng(11)
    for _ in range(10):
        s = random_branching_profile(rng)
        w = separating_window(s)
        d = commutator_defect(s, w)
        idx = {v: i for i, v in enumerate(d.basis)}
        for u in d.interior:
            col = np.zeros(len(d.basis), dtype=complex)
            col[idx[u]] += s.basis_norm_sq(u)
            p = s.tree.parent(u)
            if p is not None:
                for v in s.tree.children(p):
                    col[idx[v]] -= s.weight(v) * s.weight(u).conjugate()
            assert np.allclose(d.matrix[:, idx[u]], col, atol=1e-12)


def test_structural_and_numeric_verdicts_agree():
    rng = np.random.default_rng(12)
    shifts = [random_branching_profile(rng) for _ in range(30)]
    shifts += [bilateral_shift(a) for a in (0.3, 1, 4)]
    shifts += [bilateral_shift(1, ray_prefix=[1, 1.5]), bilateral_shift(2, stem_prefix=[2, 2, 1]),
               unilateral_shift([0.5]), model_shift(2.0)]
    for s in shifts:
        v = formal_normality(s)
        d = commutator_defect(s, separating_window(s))
        if v.is_normal:
            assert d.max_interior_defect < 1e-10
        else:
            assert d.max_interior_defect > 1e-6


def test_basis_norm_constant_along_witness_path():
    s = model_shift(1.7)
    v = formal_normality(s)
    norms = [s.basis_norm_sq(u) for u in v.path.vertices(-6, 6)]
    assert norms == pytest.approx([1.7 ** 2] * len(norms))


# -- decomposition -------------------------------------------------------------

def test_decompose_model():
    dec = decompose_normal(model_shift())
    assert dec.alpha == 1.0
    assert dec.zero_core == {C("omega")}
    assert dec.zero_part(model_shift().tree, Window(3, 3)) == [C("omega")]


def test_decompose_bilateral_has_empty_zero_part():
    dec = decompose_normal(bilateral_shift(3.0))
    assert dec.alpha == 3.0 and not dec.zero_core and not dec.zero_rays


def test_decompose_requires_normal():
    with pytest.raises(PreconditionError):
        decompose_normal(unilateral_shift([0.5]))


def test_decompose_invariance():
    prof = _profile([("0", "a"), ("a", "b")], "0", True, [("0", ""), ("b", "dead")])
    s = WeightedShift(prof, WeightFamily({C("0"): 1, C("a"): 0, C("b"): 0}, Tail((), 1),
                                         {"": Tail((), 1), "dead": Tail((), 0)}))
    dec = decompose_normal(s)
    assert dec.zero_rays == ("dead",)
    for u in dec.zero_part(prof, Window(3, 3)):
        assert len(s.apply(SparseVector.basis(u))) == 0
    for u in dec.path.vertices(-3, 3):
        assert all(dec.in_path(v) for v in s.apply(SparseVector.basis(u)).support())


# -- extension trichotomy ------------------------------------------------------

def test_perturbed_unilateral():
    v = classify_extension(unilateral_shift([0.5]))
    assert v.kind == ExtensionKind.PERTURBED_UNILATERAL
    assert (v.alpha, v.theta) == (1.0, 0.5)
    assert v.moment_check is True


def test_bilateral_multiple():
    v = classify_extension(bilateral_shift(2.0))
    assert v.kind == ExtensionKind.BILATERAL and v.alpha == 2.0


def test_theta_above_one_not_modelable():
    v = classify_extension(unilateral_shift([2.0]))
    assert v.reason == ModelReason.WEIGHT_PATTERN
    assert v.moment_check is False


def test_nonconstant_bilateral():
    v = classify_extension(bilateral_shift(1.0, stem_prefix=[0.5]))
    assert v.reason == ModelReason.NONCONSTANT_BILATERAL and v.vertex == S(-1)


def test_tail_pattern_violation():
    v = classify_extension(unilateral_shift([0.5, 0.7]))
    assert v.reason == ModelReason.WEIGHT_PATTERN and v.vertex == R(2)


def test_zero_weight_reported():
    v = classify_extension(model_shift())
    assert v.reason == ModelReason.ZERO_WEIGHT and v.vertex == C("omega")
    v = classify_extension(model_shift(), nonzero_weights_required=False)
    assert v.reason == ModelReason.BRANCHING_OR_LEAF


def test_branching_profiles_never_modelable():
    rng = np.random.default_rng(13)
    for _ in range(30):
        v = classify_extension(random_branching_profile(rng))
        assert v.reason == ModelReason.BRANCHING_OR_LEAF


def test_finite_trees_not_modelable():
    t = FiniteTree.from_edges([("a", "b")])
    assert classify_extension(WeightedShift(t, {"b": 1})).reason == ModelReason.BRANCHING_OR_LEAF


def test_half_line_through_core():
    prof = _profile([("r", "m")], "r", False, [("m", "t")])
    s = WeightedShift(prof, WeightFamily({C("m"): 0.3j}, None, {"t": Tail((2.0,), 2.0)}))
    v = classify_extension(s)
    assert v.kind == ExtensionKind.PERTURBED_UNILATERAL
    assert v.alpha == 2.0 and v.theta == pytest.approx(0.15)


def test_scaling_law():
    cases = [unilateral_shift([0.5]), unilateral_shift([1.0]), bilateral_shift(1.5), unilateral_shift([3.0]),
             bilateral_shift(1.0, ray_prefix=[2.0])]
    for c in (2.0, 0.5j, cmath.rect(3, 1.1)):
        for s in cases:
            a, b = classify_extension(s), classify_extension(s.scaled(c))
            assert a.kind == b.kind and a.reason == b.reason
            if a.alpha is not None:
                assert b.alpha == pytest.approx(abs(c) * a.alpha)
            if a.theta is not None:
                assert b.theta == pytest.approx(a.theta)


def test_agreement_with_moment_bound():
    for theta in np.arange(1, 21) / 10:
        s = unilateral_shift([theta])
        v = classify_extension(s)
        assert (v.kind == ExtensionKind.PERTURBED_UNILATERAL) == lambda1_bound_check(s) == (theta <= 1)


# -- extension model -----------------------------------------------------------

def test_build_model_vectors():
    m = build_extension_model(1.0, 1.0)
    assert m.embedded(0) == SparseVector.basis(C("0"))
    m = build_extension_model(1.0, 0.6)
    e0 = m.embedded(0)
    assert e0[C("omega")] == pytest.approx(0.8) and e0[C("0")] == pytest.approx(0.6)
    assert e0.norm_sq() == pytest.approx(1.0, abs=1e-15)
    assert m.shift.weight(C("omega")) == 0
    assert m.embedded(4) == SparseVector.basis(R(4))


@pytest.mark.parametrize("theta", [0.0, -0.1, 1.2, math.nan])
def test_build_model_rejects_theta(theta):
    with pytest.raises(DomainError):
        build_extension_model(1.0, theta)


@pytest.mark.parametrize("theta", [0.1, 0.5, 0.9, 1.0])
def test_verify_extension(theta):
    s = unilateral_shift([theta])
    rep = verify_extension(s, build_extension_model(1.0, theta), window=30)
    assert rep.passed, rep.checks
    assert rep.max_residual < 1e-12
    assert rep.restriction_weights == pytest.approx([theta] + [1.0] * 29, abs=1e-12)
    # round trip: the compressed operator is again classified with the same parameters
    back = classify_extension(unilateral_shift(rep.restriction_weights[:5]))
    assert back.kind == ExtensionKind.PERTURBED_UNILATERAL and back.theta == pytest.approx(theta, abs=1e-12)


def test_verify_extension_scaled():
    s = unilateral_shift([0.6], tail_modulus=2.0).scaled(1j)
    v = classify_extension(s)
    rep = verify_extension(s, build_extension_model(v.alpha, v.theta), window=10)
    assert rep.passed
    assert rep.restriction_weights == pytest.approx([0.6] + [2.0] * 9)


def test_verify_extension_mismatch():
    with pytest.raises(PreconditionError):
        verify_extension(unilateral_shift([0.5]), build_extension_model(1.0, 0.6))
    with pytest.raises(PreconditionError):
        verify_extension(bilateral_shift(1.0), build_extension_model(1.0, 0.6))


def test_theta_one_is_isometric():
    s = unilateral_shift([1.0])
    rep = verify_extension(s, build_extension_model(1.0, 1.0), window=5)
    assert rep.checks["non_isometry"].passed
    assert math.sqrt(s.basis_norm_sq(C("0"))) == 1.0
