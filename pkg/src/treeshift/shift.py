"""Weighted shifts on directed trees and their sparse / dense realisations."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import DomainError, WindowError
from .tree import FiniteTree, Kind, TreeProfile, VertexId, Window, in_window, is_leafless, truncate

MODULUS_RTOL = 1e-9


def moduli_equal(a: float, b: float, rtol: float = MODULUS_RTOL) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


class SparseVector:
    """Finitely supported function on vertices; zero entries are never stored."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[VertexId, complex] | Iterable = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        self._entries = {v: complex(x) for v, x in items if x != 0}

    @classmethod
    def basis(cls, u: VertexId) -> SparseVector:
        return cls({u: 1.0})

    @property
    def entries(self) -> dict[VertexId, complex]:
        return dict(self._entries)

    def support(self) -> frozenset[VertexId]:
        return frozenset(self._entries)

    def __getitem__(self, v: VertexId) -> complex:
        return self._entries.get(v, 0j)

    def __iter__(self):
        return iter(sorted(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def __add__(self, other: SparseVector) -> SparseVector:
        out = dict(self._entries)
        for v, x in other._entries.items():
            out[v] = out.get(v, 0j) + x
        return SparseVector(out)

    def __sub__(self, other: SparseVector) -> SparseVector:
        return self + (-1) * other

    def __mul__(self, c: complex) -> SparseVector:
        return SparseVector({v: c * x for v, x in self._entries.items()})

    __rmul__ = __mul__

    def inner(self, other: SparseVector) -> complex:
        """``<self, other>``, linear in ``self``."""
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        total = 0j
        for v in small._entries:
            if v in big._entries:
                total += self._entries[v] * other._entries[v].conjugate()
        return total

    def norm_sq(self) -> float:
        return sum(abs(x) ** 2 for x in self._entries.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self) -> str:
        body = ", ".join(f"{v}: {self._entries[v]:.6g}" for v in sorted(self._entries))
        return f"SparseVector({{{body}}})"


@dataclass(frozen=True)
class Tail:
    """Weights along a stem or ray: an explicit prefix then a constant positive modulus.

    ``prefix[k - 1]`` is the weight of the ``k``-th vertex counted away from the core.
    """

    prefix: tuple[complex, ...] = ()
    tail_modulus: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(complex(x) for x in self.prefix))
        t = float(self.tail_modulus)
        if not math.isfinite(t) or t < 0:
            raise DomainError(f"tail modulus must be a finite nonnegative number, got {self.tail_modulus}")
        object.__setattr__(self, "tail_modulus", t)

    def at(self, k: int) -> complex:
        return self.prefix[k - 1] if k <= len(self.prefix) else complex(self.tail_modulus)

    def map(self, fn: Callable[[complex], complex], scale: float = 1.0) -> Tail:
        return Tail(tuple(fn(x) for x in self.prefix), self.tail_modulus * scale)


@dataclass(frozen=True)
class WeightFamily:
    """Weights on the non-root vertices.

    ``explicit`` covers every finite vertex (for a profile: the core vertices other
    than the root, plus the core root itself when a stem hangs below it).
    """

    explicit: Mapping[VertexId, complex] = field(default_factory=dict)
    stem: Tail | None = None
    rays: Mapping[str, Tail] = field(default_factory=dict)

    def __post_init__(self):
        explicit = {k if isinstance(k, VertexId) else VertexId.core(k): complex(v) for k, v in self.explicit.items()}
        object.__setattr__(self, "explicit", explicit)
        object.__setattr__(self, "rays", dict(self.rays))


class WeightedShift:
    """The weighted shift ``S`` with ``(S f)(v) = weight(v) * f(parent(v))``."""

    def __init__(self, tree: FiniteTree | TreeProfile, weights: WeightFamily | Mapping):
        if not isinstance(weights, WeightFamily):
            weights = WeightFamily(weights)
        self.tree = tree
        self.weights = weights
        self._validate()

    def _validate(self):
        tree, w = self.tree, self.weights
        if isinstance(tree, FiniteTree):
            expected = set(tree.vertices) - {tree.root}
            if w.stem is not None or w.rays:
                raise DomainError("finite trees take explicit weights only")
        else:
            expected = set(tree.core.vertices)
            if not tree.stem:
                expected.discard(tree.core.root)
            if tree.stem != (w.stem is not None):
                raise DomainError("stem weights must be given exactly when the profile has a stem")
            if set(w.rays) != set(tree.ray_names):
                raise DomainError(f"ray weights {sorted(w.rays)} do not match rays {list(tree.ray_names)}")
        got = set(w.explicit)
        if got != expected:
            extra = sorted(map(str, got - expected))
            missing = sorted(map(str, expected - got))
            raise DomainError(f"weights must cover exactly the non-root vertices (extra={extra}, missing={missing})")
        for v, x in w.explicit.items():
            if not cmath.isfinite(x):
                raise DomainError(f"weight at {v} is not finite")

    @property
    def is_profile(self) -> bool:
        return isinstance(self.tree, TreeProfile)

    def weight(self, v: VertexId) -> complex:
        if not self.tree.contains(v):
            raise DomainError(f"unknown vertex {v!s}")
        if v.kind == Kind.STEM:
            return self.weights.stem.at(-v.index)
        if v.kind == Kind.RAY:
            return self.weights.rays[v.name].at(v.index)
        try:
            return self.weights.explicit[v]
        except KeyError:
            raise DomainError(f"vertex {v} is the root and carries no weight") from None

    def distinct_window(self) -> Window:
        """Smallest window outside of which every vertex looks like a tail vertex."""
        if not self.is_profile:
            return Window(0, 0)
        stem = len(self.weights.stem.prefix) + 2 if self.weights.stem else 0
        ray = max((len(t.prefix) for t in self.weights.rays.values()), default=0) + 1
        return Window(stem, ray)

    def finite_vertices(self) -> tuple[VertexId, ...]:
        """Vertices whose basis norms realise every value of ``basis_norm_sq``."""
        if not self.is_profile:
            return self.tree.vertices
        return truncate(self.tree, self.distinct_window())[0].vertices

    def apply(self, f: SparseVector) -> SparseVector:
        out: dict[VertexId, complex] = {}
        for u, x in f.entries.items():
            for v in self.tree.children(u):
                out[v] = out.get(v, 0j) + self.weight(v) * x
        return SparseVector(out)

    def apply_adjoint(self, f: SparseVector) -> SparseVector:
        out: dict[VertexId, complex] = {}
        for u, x in f.entries.items():
            p = self.tree.parent(u)
            if p is not None:
                out[p] = out.get(p, 0j) + self.weight(u).conjugate() * x
        return SparseVector(out)

    def basis_norm_sq(self, u: VertexId) -> float:
        # empty sum over a leaf is 0
        return float(sum(abs(self.weight(v)) ** 2 for v in self.tree.children(u)))

    def norm_sq_bound(self) -> float:
        """``sup_u ||S e_u||^2``, which equals ``||S||^2``; exact on profiles."""
        return max(self.basis_norm_sq(u) for u in self.finite_vertices())

    def is_zero(self) -> bool:
        return self.norm_sq_bound() == 0.0

    def is_injective(self) -> bool:
        return is_leafless(self.tree) and all(self.basis_norm_sq(u) > 0 for u in self.finite_vertices())

    def power_apply(self, u: VertexId, n: int, window: Window | None = None) -> SparseVector:
        if n < 0:
            raise DomainError("power must be nonnegative")
        if not self.tree.contains(u):
            raise DomainError(f"unknown vertex {u!s}")
        f = SparseVector.basis(u)
        for k in range(n):
            f = self.apply(f)
            if window is not None and not all(in_window(self.tree, v, window) for v in f.support()):
                raise WindowError(f"S^{k + 1} e_{u} leaves {window}; enlarge the window")
        return f

    def moment_sequence(self, u: VertexId, count: int, window: Window | None = None) -> list[float]:
        """``[||S^n e_u||^2 for n in range(count)]`` by repeated sparse application."""
        if count < 1:
            raise DomainError("count must be positive")
        if not self.tree.contains(u):
            raise DomainError(f"unknown vertex {u!s}")
        f = SparseVector.basis(u)
        out = [f.norm_sq()]
        for k in range(1, count):
            f = self.apply(f)
            if window is not None and not all(in_window(self.tree, v, window) for v in f.support()):
                raise WindowError(f"S^{k} e_{u} leaves {window}; enlarge the window")
            out.append(f.norm_sq())
        return out

    def map_weights(self, fn: Callable[[VertexId, complex], complex], tail_scale: float = 1.0) -> WeightedShift:
        """New shift with ``fn`` applied to every explicit weight; tails scaled by ``tail_scale``."""
        w = self.weights
        explicit = {v: fn(v, x) for v, x in w.explicit.items()}
        stem = None
        if w.stem is not None:
            stem = Tail(tuple(fn(VertexId.stem(-k), x) for k, x in enumerate(w.stem.prefix, 1)),
                        w.stem.tail_modulus * tail_scale)
        rays = {
            name: Tail(tuple(fn(VertexId.ray(name, k), x) for k, x in enumerate(t.prefix, 1)),
                       t.tail_modulus * tail_scale)
            for name, t in w.rays.items()
        }
        return WeightedShift(self.tree, WeightFamily(explicit, stem, rays))

    def scaled(self, c: complex) -> WeightedShift:
        return self.map_weights(lambda v, x: c * x, tail_scale=abs(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedShift):
            return NotImplemented
        return self.tree == other.tree and self.weights == other.weights

    __hash__ = None

    def __repr__(self) -> str:
        return f"WeightedShift({self.tree!r})"


@dataclass(frozen=True)
class DenseOperator:
    """Matrix of a shift on a finite tree; column ``u`` holds the coordinates of ``S e_u``."""

    basis: tuple[VertexId, ...]
    matrix: np.ndarray

    @property
    def index(self) -> dict[VertexId, int]:
        return {v: i for i, v in enumerate(self.basis)}

    def column(self, u: VertexId) -> SparseVector:
        j = self.index[u]
        return SparseVector({self.basis[i]: x for i, x in enumerate(self.matrix[:, j])})

    def adjoint_column(self, u: VertexId) -> SparseVector:
        j = self.index[u]
        col = self.matrix.conj().T[:, j]
        return SparseVector({self.basis[i]: x for i, x in enumerate(col)})


def to_dense(shift: WeightedShift, finite: FiniteTree | None = None) -> DenseOperator:
    """Materialise ``shift`` on ``finite`` (defaults to the shift's own finite tree).

    Only edges of ``finite`` are kept, so an artificial root created by
    truncation loses its weight.
    """
    if finite is None:
        if shift.is_profile:
            raise DomainError("profiles must be truncated before materialising")
        finite = shift.tree
    basis = finite.vertices
    idx = {v: i for i, v in enumerate(basis)}
    m = np.zeros((len(basis), len(basis)), dtype=complex)
    for v, p in finite.parent_map.items():
        m[idx[v], idx[p]] = shift.weight(v)
    return DenseOperator(basis, m)


def operator_norm(op: DenseOperator | np.ndarray) -> float:
    """Largest singular value."""
    m = op.matrix if isinstance(op, DenseOperator) else np.asarray(op)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))
