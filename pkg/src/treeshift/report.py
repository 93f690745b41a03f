"""Per-shift classification reports combining symbolic verdicts with numeric oracles."""

from __future__ import annotations

import json
import math

from .classify import (
    ExtensionKind,
    classify_extension,
    commutator_defect,
    decompose_normal,
    formal_normality,
    separating_window,
)
from .errors import WindowError
from .moments import DEFAULT_COUNT, delta1_check, stieltjes_check
from .shift import WeightedShift, operator_norm, to_dense
from .tree import Window, path_shape, truncate

DEFAULT_WINDOW = Window(32, 32)
DEFAULT_TOL = 1e-9


def fmt(x: float) -> float | str:
    """Round to 12 significant digits so reports are byte-stable."""
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.12g}")


def _check_window(shift: WeightedShift, window: Window) -> None:
    if not shift.is_profile:
        return
    need = separating_window(shift)
    short_stem = shift.tree.stem and window.stem_depth < need.stem_depth
    if short_stem or window.ray_length < need.ray_length:
        raise WindowError(
            f"window ({window.stem_depth},{window.ray_length}) does not reach past the weight prefixes; "
            f"use --window {max(window.stem_depth, need.stem_depth)},{max(window.ray_length, need.ray_length)} or larger"
        )


def run_classify(shift: WeightedShift, window: Window = DEFAULT_WINDOW, tol: float = DEFAULT_TOL,
                 name: str = "", moment_count: int = DEFAULT_COUNT) -> dict:
    """Full report for one shift.  ``report["agreement"]["all"]`` is what ``--strict`` inspects."""
    _check_window(shift, window)
    alpha_sq = shift.norm_sq_bound()
    finite, boundary = truncate(shift.tree, window)
    dense_norm = operator_norm(to_dense(shift, finite))
    norm_gap = abs(dense_norm ** 2 - alpha_sq)

    fn = formal_normality(shift)
    fn_doc = {"status": fn.status.value, "reason": fn.reason.value if fn.reason else None,
              "vertex": str(fn.vertex) if fn.vertex is not None else None,
              "modulus": fmt(fn.modulus)}
    if fn.is_normal:
        dec = decompose_normal(shift, fn, window)
        fn_doc["path"] = {"core": [str(v) for v in fn.path.core_path], "ray": fn.path.ray}
        fn_doc["zero_part"] = {"core": [str(v) for v in sorted(dec.zero_core)], "rays": list(dec.zero_rays)}

    ext = classify_extension(shift)
    ext_doc = {"verdict": ext.label(), "kind": ext.kind.value, "alpha": fmt(ext.alpha), "theta": fmt(ext.theta),
               "reason": ext.reason.value if ext.reason else None,
               "vertex": str(ext.vertex) if ext.vertex is not None else None,
               "moment_check": ext.moment_check, "note": ext.note}

    base = shift.tree.root if shift.tree.root is not None else shift.tree.core.root
    moments = shift.moment_sequence(base, moment_count)
    st = stieltjes_check(moments)
    moments_doc = {"vertex": str(base), "count": moment_count, "values": [fmt(x) for x in moments[:8]],
                   "stieltjes": {"passes": st.passes, "order": st.order, "min_eig_H": fmt(st.min_eig_H),
                                 "min_eig_H_shifted": fmt(st.min_eig_H_shifted), "tol": st.tol}}
    if ext.kind == ExtensionKind.PERTURBED_UNILATERAL:
        # one step up the half line the moments, divided by alpha^(2n), are all 1
        nxt = path_shape(shift.tree).enumeration.vertex(1)
        seq = shift.moment_sequence(nxt, moment_count)
        normed = [x / ext.alpha ** (2 * n) for n, x in enumerate(seq)]
        moments_doc["delta1_next_vertex"] = {"vertex": str(nxt), "passes": delta1_check(normed, tol)}

    defect = commutator_defect(shift, window if shift.is_profile else None, tol)
    defect_scale = tol * (1.0 + alpha_sq)
    numerically_normal = defect.max_interior_defect <= defect_scale
    structurally_normal = fn.is_normal or shift.is_zero()
    norm_agrees = norm_gap <= defect_scale

    return {
        "name": name,
        "tree": "profile" if shift.is_profile else "finite",
        "window": [window.stem_depth, window.ray_length] if shift.is_profile else None,
        "tol": tol,
        "norm": {"norm_sq_bound": fmt(alpha_sq), "truncation_operator_norm_sq": fmt(dense_norm ** 2),
                 "gap": fmt(norm_gap), "truncated_vertices": len(finite), "boundary": sorted(map(str, boundary))},
        "injective": shift.is_injective(),
        "formal_normality": fn_doc,
        "extension": ext_doc,
        "moments": moments_doc,
        "commutator_defect": {"max_interior": fmt(defect.max_interior_defect),
                              "worst_vertex": str(defect.worst_vertex) if defect.worst_vertex else None,
                              "interior_vertices": len(defect.interior), "threshold": fmt(defect_scale)},
        "agreement": {"normality": numerically_normal == structurally_normal, "norm": norm_agrees,
                      "all": numerically_normal == structurally_normal and norm_agrees},
    }


def dumps(report) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
