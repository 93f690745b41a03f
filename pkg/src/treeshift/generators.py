"""Tree and weight generators used by the test-suite and the acceptance run."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .shift import Tail, WeightedShift, WeightFamily
from .tree import FiniteTree, TreeProfile, VertexId


def level_sequences(n: int):
    """Yield canonical level sequences of all rooted trees with ``n`` vertices, one per isomorphism class."""
    if n < 1:
        return
    levels = list(range(n))
    while True:
        yield tuple(levels)
        p = max((i for i in range(n) if levels[i] > 1), default=None)
        if p is None:
            return
        q = max(i for i in range(p) if levels[i] == levels[p] - 1)
        for i in range(p, n):
            levels[i] = levels[i - (p - q)]


def tree_from_levels(levels) -> FiniteTree:
    pmap = {}
    last_at_level: dict[int, int] = {}
    for i, lev in enumerate(levels):
        if i:
            pmap[str(i)] = str(last_at_level[lev - 1])
        last_at_level[lev] = i
    return FiniteTree([str(i) for i in range(len(levels))], pmap, "0")


def rooted_trees(n: int):
    """All rooted trees with ``n`` vertices up to isomorphism, vertices named ``"0".."n-1"``."""
    for levels in level_sequences(n):
        yield tree_from_levels(levels)


def random_tree(n: int, rng: np.random.Generator) -> FiniteTree:
    """Random recursive tree: vertex ``i`` picks a uniformly random earlier parent."""
    pmap = {str(i): str(int(rng.integers(0, i))) for i in range(1, n)}
    return FiniteTree([str(i) for i in range(n)], pmap, "0")


def disk_weight(rng: np.random.Generator) -> complex:
    """Uniform sample from the closed unit disk."""
    r = math.sqrt(rng.random())
    return cmath.rect(r, 2 * math.pi * rng.random())


def random_shift(tree: FiniteTree, rng: np.random.Generator) -> WeightedShift:
    return WeightedShift(tree, {v: disk_weight(rng) for v in tree.vertices if v != tree.root})


def random_branching_profile(rng: np.random.Generator, max_core: int = 8) -> WeightedShift:
    """Random profile with at least one branching vertex and every weight nonzero."""
    while True:
        n = int(rng.integers(2, max_core + 1))
        core = random_tree(n, rng)
        stem = bool(rng.integers(0, 2))
        leaves = [v for v in core.vertices if not core.children(v)]
        rays = [(v, f"r{chr(97 + i)}") for i, v in enumerate(leaves) if rng.random() < 0.7]
        extra = core.vertices[int(rng.integers(0, n))]
        rays.append((extra, "x"))
        profile = TreeProfile(core, stem=stem, rays=rays)
        if any(len(profile.children(v)) >= 2 for v in core.vertices):
            break

    def nz() -> complex:
        return cmath.rect(rng.uniform(0.2, 2.0), rng.uniform(0, 2 * math.pi))

    explicit = {v: nz() for v in core.vertices if v != core.root or stem}
    stem_w = Tail(tuple(nz() for _ in range(int(rng.integers(0, 3)))), rng.uniform(0.2, 2.0)) if stem else None
    ray_w = {name: Tail(tuple(nz() for _ in range(int(rng.integers(0, 3)))), rng.uniform(0.2, 2.0))
             for _, name in rays}
    return WeightedShift(profile, WeightFamily(explicit, stem_w, ray_w))


def unilateral_shift(weights, tail_modulus: float = 1.0) -> WeightedShift:
    """Shift on the half line with ``weights`` as ``lambda_1, lambda_2, ...`` then a constant tail."""
    profile = TreeProfile(FiniteTree(["0"], {}, "0"), rays=[("0", "")])
    return WeightedShift(profile, WeightFamily({}, None, {"": Tail(tuple(weights), tail_modulus)}))


def bilateral_shift(modulus: float = 1.0, core_weight: complex | None = None,
                    stem_prefix=(), ray_prefix=()) -> WeightedShift:
    """Shift on the integer line with constant tails of ``modulus`` and optional perturbed prefixes."""
    profile = TreeProfile(FiniteTree(["0"], {}, "0"), stem=True, rays=[("0", "")])
    w0 = modulus if core_weight is None else core_weight
    return WeightedShift(profile, WeightFamily({VertexId.core("0"): w0}, Tail(tuple(stem_prefix), modulus),
                                               {"": Tail(tuple(ray_prefix), modulus)}))
