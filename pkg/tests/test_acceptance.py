"""Acceptance gate: eight end-to-end criteria at their stated tolerances.

Run with ``pytest tests/test_acceptance.py`` (a PASS/FAIL line per criterion is
printed in the terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import cmath
import itertools
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from treeshift.classify import (
    ModelReason,
    NormalityReason,
    NormalityStatus,
    build_extension_model,
    classify_extension,
    commutator_defect,
    formal_normality,
    verify_extension,
)
from treeshift.generators import (
    bilateral_shift,
    random_branching_profile,
    random_shift,
    random_tree,
    rooted_trees,
    unilateral_shift,
)
from treeshift.moments import lambda1_bound_check, stieltjes_check
from treeshift.shift import SparseVector, operator_norm, to_dense
from treeshift.specfile import bundled_specs, parse_spec
from treeshift.tree import VertexId, Window

RESULTS: dict[int, tuple[bool, str]] = {}

CORPUS = {
    "z_constant.json": ("FormallyNormalNormal", "BilateralMultiple(2)"),
    "z_nonconstant.json": ("Not", "NotModelable(NonconstantBilateral)"),
    "zplus_theta.json": ("Not", "PerturbedUnilateral(1, 0.5)"),
    "zplus_theta_1.json": ("Not", "PerturbedUnilateral(1, 1)"),
    "zplus_theta_15.json": ("Not", "NotModelable(WeightPattern)"),
    "zhat_model.json": ("FormallyNormalNormal", "NotModelable(ZeroWeight)"),
    "binary_branching.json": ("Not", "NotModelable(BranchingOrLeaf)"),
}


def criterion_1_norm_formula():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        shift = random_shift(random_tree(int(rng.integers(1, 201)), rng), rng)
        alpha = shift.norm_sq_bound()
        err = abs(operator_norm(to_dense(shift)) ** 2 - alpha) / (1 + alpha)
        worst = max(worst, err)
    elapsed = time.perf_counter() - start
    return worst < 1e-8 and elapsed < 30, f"max relative gap {worst:.2e}, {elapsed:.1f}s"


def criterion_2_adjoint_pairing():
    rng = np.random.default_rng(2025)
    worst, pairs = 0.0, 0
    for n in range(1, 9):
        for tree in rooted_trees(n):
            shift = random_shift(tree, rng)
            for u, v in itertools.product(tree.vertices, repeat=2):
                eu, ev = SparseVector.basis(u), SparseVector.basis(v)
                lhs = shift.apply(eu).inner(ev)
                worst = max(worst, abs(lhs - eu.inner(shift.apply_adjoint(ev))))
                pairs += 1
    return worst < 1e-12, f"{pairs} pairs, max error {worst:.1e}"


def criterion_3_formal_normality():
    ok, details = True, []
    for alpha in (0.5, 1.0, 2.0):
        normal = bilateral_shift(alpha)
        d0 = commutator_defect(normal, Window(20, 20)).max_interior_defect
        bumped = bilateral_shift(alpha, ray_prefix=[alpha, alpha, 2 * alpha])
        v = formal_normality(bumped)
        d1 = commutator_defect(bumped, Window(20, 20)).max_interior_defect
        ok &= (formal_normality(normal).is_normal and d0 < 1e-10
               and v.reason == NormalityReason.NONCONSTANT_MODULUS and d1 >= 3 * alpha ** 2 - 1e-6)
        details.append(f"a={alpha}: {d0:.1e} / {d1:.6g}")
    return ok, "; ".join(details)


def _sibling_pair(shift):
    for u in shift.tree.core.vertices:
        kids = sorted(shift.tree.children(u))
        if len(kids) >= 2:
            return kids[0], kids[1]
    raise AssertionError("no branching vertex")


def criterion_4_trichotomy():
    specs = {p.name: p for p in bundled_specs()}
    corpus_ok = set(specs) == set(CORPUS)
    for name, (status, ext) in CORPUS.items():
        shift = parse_spec(specs[name])
        corpus_ok &= formal_normality(shift).status.value == status and classify_extension(shift).label() == ext

    rng = np.random.default_rng(2026)
    branching_ok, worst = True, 0.0
    window = Window(2, 24)
    for _ in range(50):
        shift = random_branching_profile(rng)
        branching_ok &= classify_extension(shift).reason == ModelReason.BRANCHING_OR_LEAF
        u1, u2 = _sibling_pair(shift)
        orbit1 = [shift.power_apply(u1, k, window) for k in range(7)]
        orbit2 = [shift.power_apply(u2, k, window) for k in range(7)]
        for a, b in itertools.product(orbit1, orbit2):
            worst = max(worst, abs(a.inner(b)))
        for orbit in (orbit1, orbit2):
            for a, b in itertools.combinations(orbit, 2):
                worst = max(worst, abs(a.inner(b)))
    ok = corpus_ok and branching_ok and worst < 1e-12
    return ok, f"corpus {'ok' if corpus_ok else 'MISMATCH'}, branching {'ok' if branching_ok else 'MISMATCH'}, " \
               f"max orbit inner product {worst:.1e}"


def criterion_5_extension_model():
    ok, worst = True, 0.0
    for theta in (0.1, 0.5, 0.9, 1.0):
        model = build_extension_model(1.0, theta)
        rep = verify_extension(unilateral_shift([theta]), model, window=30, tol=1e-12)
        weights_ok = all(round(w - e, 12) == 0 for w, e in zip(rep.restriction_weights, [theta] + [1.0] * 29))
        v = formal_normality(model.shift)
        ok &= (rep.passed and rep.max_residual < 1e-12 and weights_ok
               and v.status == NormalityStatus.FORMALLY_NORMAL and v.modulus == 1.0)
        worst = max(worst, rep.max_residual)
    return ok, f"max residual {worst:.1e}"


def criterion_6_moment_bound():
    grid = [k / 10 for k in range(1, 21)]
    agree = all(lambda1_bound_check(unilateral_shift([t]), tol=1e-9) == (t <= 1) for t in grid)
    s = unilateral_shift([1.5]).moment_sequence(VertexId.core("0"), 20)
    minor = stieltjes_check(s).minors_H[1]
    ok = agree and round(minor - (2.25 - 5.0625), 12) == 0
    return ok, f"grid agreement {agree}, minor {minor!r}"


def _gauge(shift, rng):
    return shift.map_weights(lambda v, x: x * cmath.exp(1j * rng.uniform(0, 2 * np.pi)))


def criterion_7_invariance():
    rng = np.random.default_rng(2027)
    ok = True
    for path in bundled_specs():
        shift = parse_spec(path)
        base_fn, base_ext = formal_normality(shift), classify_extension(shift)
        gauged = _gauge(shift, rng)
        g_fn, g_ext = formal_normality(gauged), classify_extension(gauged)
        ok &= (g_fn.status, g_fn.reason, g_ext.label()) == (base_fn.status, base_fn.reason, base_ext.label())
        for c in (3.0, 0.5j, cmath.rect(1.7, 2.3)):
            s_fn, s_ext = formal_normality(shift.scaled(c)), classify_extension(shift.scaled(c))
            ok &= (s_fn.status, s_fn.reason) == (base_fn.status, base_fn.reason)
            ok &= (s_ext.kind, s_ext.reason) == (base_ext.kind, base_ext.reason)
            if base_ext.alpha is not None:
                ok &= abs(s_ext.alpha - abs(c) * base_ext.alpha) < 1e-12 * (1 + s_ext.alpha)
            if base_ext.theta is not None:
                ok &= abs(s_ext.theta - base_ext.theta) < 1e-12
            if base_fn.modulus is not None:
                ok &= abs(s_fn.modulus - abs(c) * base_fn.modulus) < 1e-12 * (1 + s_fn.modulus)
    return ok, f"{len(bundled_specs())} specs, gauge + 3 scalings"


def criterion_8_determinism():
    paths = [str(p) for p in sorted(bundled_specs())]
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for i in range(2):
            out = Path(tmp) / f"run{i}.json"
            subprocess.run([sys.executable, "-m", "treeshift.cli", "classify", *paths, "--json", str(out)],
                           check=True, capture_output=True)
            outs.append(out.read_bytes())
    return outs[0] == outs[1], f"{len(outs[0])} bytes per report"


CRITERIA = [
    criterion_1_norm_formula,
    criterion_2_adjoint_pairing,
    criterion_3_formal_normality,
    criterion_4_trichotomy,
    criterion_5_extension_model,
    criterion_6_moment_bound,
    criterion_7_invariance,
    criterion_8_determinism,
]


def line(number: int) -> str:
    passed, detail = RESULTS[number]
    name = CRITERIA[number - 1].__name__.split("_", 2)[2].replace("_", " ")
    return f"{'PASS' if passed else 'FAIL'} criterion {number} ({name}): {detail}"


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number):
    RESULTS[number] = CRITERIA[number - 1]()
    assert RESULTS[number][0], line(number)


if __name__ == "__main__":
    for i, fn in enumerate(CRITERIA, 1):
        RESULTS[i] = fn()
        print(line(i))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
