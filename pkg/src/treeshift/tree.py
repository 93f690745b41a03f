"""Directed trees: finite trees, finitely described infinite profiles, and their combinatorics.

A :class:`TreeProfile` describes a possibly infinite directed tree by a finite
core plus an optional downward *stem* (a copy of the negative integers hanging
below the core root) and any number of upward *rays* (copies of the positive
integers glued at core vertices).  This covers the integer line, the half line
and the line with a leaf glued at the origin, as well as finite trees with
infinite tails.

Every operation works on both :class:`FiniteTree` and :class:`TreeProfile`
through the shared ``children`` / ``parent`` / ``contains`` protocol.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import DomainError, WindowError

__all__ = [
    "Kind",
    "VertexId",
    "Window",
    "FiniteTree",
    "TreeProfile",
    "Shape",
    "PathEnumeration",
    "PathShape",
    "children",
    "parent",
    "iter_parent",
    "chi_n",
    "descendants",
    "is_leafless",
    "branching_vertices",
    "path_shape",
    "truncate",
    "in_window",
    "common_ancestor",
    "resolve_vertex",
    "z_profile",
    "zplus_profile",
    "zhat_profile",
]


class Kind(enum.IntEnum):
    STEM = 0
    CORE = 1
    RAY = 2


_RAY_NAME = re.compile(r"^(|.*\D)$")
_NEG_INT = re.compile(r"^-\d+$")
_RAY_LABEL = re.compile(r"^(.*?)(\d+)$")


@dataclass(frozen=True, order=True)
class VertexId:
    """Vertex identifier; the field order gives the canonical basis ordering."""

    kind: Kind
    name: str = ""
    index: int = 0

    def __post_init__(self):
        if self.kind == Kind.STEM and (self.index > 0 or self.name):
            raise DomainError(f"stem vertices need index <= 0 and no name, got {self!r}")
        if self.kind == Kind.RAY and self.index < 1:
            raise DomainError(f"ray vertices need index >= 1, got {self!r}")
        if self.kind == Kind.CORE and (self.index != 0 or not self.name):
            raise DomainError(f"core vertices need a nonempty name, got {self!r}")

    @classmethod
    def core(cls, name: str) -> VertexId:
        return cls(Kind.CORE, str(name), 0)

    @classmethod
    def stem(cls, index: int) -> VertexId:
        return cls(Kind.STEM, "", int(index))

    @classmethod
    def ray(cls, name: str, index: int) -> VertexId:
        return cls(Kind.RAY, name, int(index))

    def __str__(self) -> str:
        if self.kind == Kind.CORE:
            return self.name
        if self.kind == Kind.STEM:
            return str(self.index)
        return f"{self.name}{self.index}"

    def __repr__(self) -> str:
        return f"VertexId({self.kind.name.lower()}:{self})"


@dataclass(frozen=True)
class Window:
    """How far a profile's stem and rays are expanded when truncating."""

    stem_depth: int = 0
    ray_length: int = 0

    def __post_init__(self):
        if self.stem_depth < 0 or self.ray_length < 0:
            raise DomainError(f"window sizes must be nonnegative, got {self}")

    @classmethod
    def parse(cls, text: str) -> Window:
        """Parse ``"H,R"`` (or a single ``"N"`` for both)."""
        parts = [p.strip() for p in str(text).split(",")]
        try:
            if len(parts) == 1:
                return cls(int(parts[0]), int(parts[0]))
            if len(parts) == 2:
                return cls(int(parts[0]), int(parts[1]))
        except ValueError:
            pass
        raise DomainError(f"cannot parse window {text!r}; expected 'H,R'")


def _as_vertex(v) -> VertexId:
    return v if isinstance(v, VertexId) else VertexId.core(v)


class FiniteTree:
    """A finite rooted directed tree given by its parent map."""

    def __init__(self, vertices: Iterable, parent_map: Mapping, root):
        verts = frozenset(_as_vertex(v) for v in vertices)
        if not verts:
            raise DomainError("a directed tree needs at least one vertex")
        if root is None:
            raise DomainError("a finite directed tree must have a root")
        root = _as_vertex(root)
        if root not in verts:
            raise DomainError(f"root {root} is not a vertex")
        pmap = {_as_vertex(k): _as_vertex(v) for k, v in parent_map.items()}
        if set(pmap) != verts - {root}:
            raise DomainError("parent map must be defined exactly on the non-root vertices")
        for v, p in pmap.items():
            if p not in verts:
                raise DomainError(f"parent {p} of {v} is not a vertex")
        kids: dict[VertexId, list[VertexId]] = {v: [] for v in verts}
        for v, p in pmap.items():
            kids[p].append(v)
        # every vertex must reach the root, i.e. no cycles and connected
        seen = {root}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in kids[u]:
                seen.add(w)
                queue.append(w)
        if seen != verts:
            raise DomainError("parent map contains a cycle or a disconnected part")
        self._vertices = tuple(sorted(verts))
        self._vset = verts
        self._parent = pmap
        self._children = {v: tuple(sorted(c)) for v, c in kids.items()}
        self.root = root

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], root=None) -> FiniteTree:
        """Build from ``(parent, child)`` pairs; the root is inferred when omitted."""
        edges = [(_as_vertex(a), _as_vertex(b)) for a, b in edges]
        pmap: dict[VertexId, VertexId] = {}
        for a, b in edges:
            if b in pmap:
                raise DomainError(f"vertex {b} has two parents")
            pmap[b] = a
        verts = {a for a, _ in edges} | {b for _, b in edges}
        if root is not None:
            verts.add(_as_vertex(root))
        if root is None:
            roots = verts - set(pmap)
            if len(roots) != 1:
                raise DomainError(f"cannot infer a unique root (candidates: {sorted(map(str, roots))})")
            root = roots.pop()
        return cls(verts, pmap, root)

    @property
    def vertices(self) -> tuple[VertexId, ...]:
        return self._vertices

    @property
    def parent_map(self) -> dict[VertexId, VertexId]:
        return dict(self._parent)

    def __len__(self) -> int:
        return len(self._vertices)

    def __iter__(self) -> Iterator[VertexId]:
        return iter(self._vertices)

    def contains(self, u) -> bool:
        return u in self._vset

    __contains__ = contains

    def _check(self, u) -> VertexId:
        if u not in self._vset:
            raise DomainError(f"unknown vertex {u!s}")
        return u

    def children(self, u: VertexId) -> tuple[VertexId, ...]:
        return self._children[self._check(u)]

    def parent(self, u: VertexId) -> VertexId | None:
        return self._parent.get(self._check(u))

    def edges(self) -> list[tuple[VertexId, VertexId]]:
        return sorted((p, v) for v, p in self._parent.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteTree):
            return NotImplemented
        return self.root == other.root and self._parent == other._parent and self._vset == other._vset

    def __hash__(self) -> int:
        return hash((self.root, self._vset))

    def __repr__(self) -> str:
        return f"FiniteTree({len(self)} vertices, root={self.root})"


class TreeProfile:
    """Finite core plus optional stem below the core root and rays glued at core vertices."""

    def __init__(self, core: FiniteTree, stem: bool = False, rays: Sequence[tuple] = ()):
        if any(v.kind != Kind.CORE for v in core.vertices):
            raise DomainError("profile cores may only contain core vertices")
        self.core = core
        self.stem = bool(stem)
        ray_list = []
        names = set()
        for attach, name in rays:
            attach = _as_vertex(attach)
            if attach not in core:
                raise DomainError(f"ray {name!r} attaches to unknown vertex {attach}")
            if name in names:
                raise DomainError(f"duplicate ray name {name!r}")
            if not _RAY_NAME.match(name):
                raise DomainError(f"ray name {name!r} must not end in a digit")
            names.add(name)
            ray_list.append((attach, name))
        self.rays = tuple(ray_list)
        self._ray_attach = {name: attach for attach, name in self.rays}
        self._rays_at: dict[VertexId, tuple[str, ...]] = {}
        for attach, name in sorted(self.rays, key=lambda r: r[1]):
            self._rays_at[attach] = self._rays_at.get(attach, ()) + (name,)
        for v in core.vertices:
            if _NEG_INT.match(v.name) or any(
                (m := _RAY_LABEL.match(v.name)) and m.group(1) == name and int(m.group(2)) >= 1
                for name in names
            ):
                raise DomainError(f"core vertex name {v.name!r} collides with a stem or ray label")

    @property
    def root(self) -> VertexId | None:
        return None if self.stem else self.core.root

    @property
    def ray_names(self) -> tuple[str, ...]:
        return tuple(sorted(self._ray_attach))

    def ray_attach(self, name: str) -> VertexId:
        return self._ray_attach[name]

    def rays_at(self, u: VertexId) -> tuple[str, ...]:
        return self._rays_at.get(u, ())

    def contains(self, u) -> bool:
        if not isinstance(u, VertexId):
            return False
        if u.kind == Kind.CORE:
            return u in self.core
        if u.kind == Kind.STEM:
            return self.stem and u.index <= -1
        return u.name in self._ray_attach

    __contains__ = contains

    def _check(self, u) -> VertexId:
        if not self.contains(u):
            raise DomainError(f"unknown vertex {u!s}")
        return u

    def children(self, u: VertexId) -> tuple[VertexId, ...]:
        self._check(u)
        if u.kind == Kind.STEM:
            return (self.core.root,) if u.index == -1 else (VertexId.stem(u.index + 1),)
        if u.kind == Kind.RAY:
            return (VertexId.ray(u.name, u.index + 1),)
        own = self.core.children(u)
        return tuple(sorted(own + tuple(VertexId.ray(n, 1) for n in self.rays_at(u))))

    def parent(self, u: VertexId) -> VertexId | None:
        self._check(u)
        if u.kind == Kind.STEM:
            return VertexId.stem(u.index - 1)
        if u.kind == Kind.RAY:
            return self._ray_attach[u.name] if u.index == 1 else VertexId.ray(u.name, u.index - 1)
        if u == self.core.root:
            return VertexId.stem(-1) if self.stem else None
        return self.core.parent(u)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TreeProfile):
            return NotImplemented
        return self.core == other.core and self.stem == other.stem and sorted(self.rays) == sorted(other.rays)

    def __hash__(self) -> int:
        return hash((self.core, self.stem, tuple(sorted(self.rays))))

    def __repr__(self) -> str:
        rays = ", ".join(f"{n or '<ray>'}@{a}" for a, n in self.rays)
        return f"TreeProfile(core={len(self.core)}, stem={self.stem}, rays=[{rays}])"


Tree = Union[FiniteTree, TreeProfile]


def zplus_profile() -> TreeProfile:
    """The half line 0 -> 1 -> 2 -> ..."""
    return TreeProfile(FiniteTree(["0"], {}, "0"), stem=False, rays=[("0", "")])


def z_profile() -> TreeProfile:
    """The integer line ... -> -1 -> 0 -> 1 -> ..."""
    return TreeProfile(FiniteTree(["0"], {}, "0"), stem=True, rays=[("0", "")])


def zhat_profile(leaf: str = "omega") -> TreeProfile:
    """The integer line with one extra leaf glued at 0."""
    core = FiniteTree.from_edges([("0", leaf)], root="0")
    return TreeProfile(core, stem=True, rays=[("0", "")])


def resolve_vertex(tree: Tree, text: str) -> VertexId:
    """Map a printed label back to the vertex of ``tree`` that prints that way."""
    if isinstance(text, VertexId):
        return tree_check(tree, text)
    text = str(text)
    candidates = [VertexId.core(text)] if text else []
    if _NEG_INT.match(text):
        candidates.append(VertexId.stem(int(text)))
    m = _RAY_LABEL.match(text)
    if m and int(m.group(2)) >= 1:
        candidates.append(VertexId.ray(m.group(1), int(m.group(2))))
    for v in candidates:
        if tree.contains(v):
            return v
    # truncations carry stem/ray ids, so also scan explicit vertex lists
    if isinstance(tree, FiniteTree):
        for v in tree.vertices:
            if str(v) == text:
                return v
    raise DomainError(f"unknown vertex {text!r}")


def tree_check(tree: Tree, u: VertexId) -> VertexId:
    if not tree.contains(u):
        raise DomainError(f"unknown vertex {u!s}")
    return u


def children(tree: Tree, u: VertexId) -> frozenset[VertexId]:
    return frozenset(tree.children(u))


def parent(tree: Tree, u: VertexId) -> VertexId | None:
    return tree.parent(u)


def iter_parent(tree: Tree, u: VertexId, n: int) -> VertexId | None:
    """``par^n(u)``, or ``None`` once the chain leaves the tree through the root."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    tree_check(tree, u)
    for _ in range(n):
        u = tree.parent(u)
        if u is None:
            return None
    return u


def in_window(tree: Tree, u: VertexId, window: Window | None) -> bool:
    if window is None or isinstance(tree, FiniteTree):
        return True
    if u.kind == Kind.STEM:
        return u.index >= -window.stem_depth
    if u.kind == Kind.RAY:
        return u.index <= window.ray_length
    return True


def chi_n(tree: Tree, u: VertexId, n: int, window: Window | None = None) -> frozenset[VertexId]:
    """The ``n``-th generation below ``u``; optionally clipped to a window."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    tree_check(tree, u)
    level = {u}
    for _ in range(n):
        level = {w for v in level for w in tree.children(v) if in_window(tree, w, window)}
    return frozenset(level)


def descendants(tree: Tree, u: VertexId, window: Window | None = None) -> frozenset[VertexId]:
    """All descendants of ``u`` (``u`` included) inside ``window``.

    Profiles with rays below ``u`` have infinitely many descendants, so a
    window is mandatory there.
    """
    tree_check(tree, u)
    if not in_window(tree, u, window):
        raise WindowError(f"vertex {u} lies outside {window}")
    if isinstance(tree, TreeProfile) and window is None:
        raise WindowError("descendants on a profile need a window")
    out = {u}
    queue = deque([u])
    while queue:
        v = queue.popleft()
        for w in tree.children(v):
            if in_window(tree, w, window):
                out.add(w)
                queue.append(w)
    return frozenset(out)


def is_leafless(tree: Tree) -> bool:
    # stem and ray vertices always have a child, so only core vertices matter
    verts = tree.core.vertices if isinstance(tree, TreeProfile) else tree.vertices
    return all(tree.children(v) for v in verts)


def branching_vertices(tree: Tree) -> frozenset[VertexId]:
    verts = tree.core.vertices if isinstance(tree, TreeProfile) else tree.vertices
    return frozenset(v for v in verts if len(tree.children(v)) >= 2)


class Shape(enum.Enum):
    Z_PLUS_PATH = "ZPlusPath"
    Z_PATH = "ZPath"
    NOT_A_PATH = "NotAPath"


@dataclass(frozen=True)
class PathEnumeration:
    """Order isomorphism from the integers (or nonnegative integers) onto a path in a profile.

    Position 0 is the core root; the stem occupies negative positions, then the
    core segment ``core_path`` and finally the ray ``ray``.
    """

    core_path: tuple[VertexId, ...]
    ray: str
    bilateral: bool

    def vertex(self, n: int) -> VertexId:
        if n < 0:
            if not self.bilateral:
                raise DomainError(f"position {n} is before the root")
            return VertexId.stem(n)
        if n < len(self.core_path):
            return self.core_path[n]
        return VertexId.ray(self.ray, n - len(self.core_path) + 1)

    def position(self, v: VertexId) -> int | None:
        if v.kind == Kind.STEM:
            return v.index if self.bilateral else None
        if v.kind == Kind.RAY:
            return len(self.core_path) + v.index - 1 if v.name == self.ray else None
        try:
            return self.core_path.index(v)
        except ValueError:
            return None

    def __contains__(self, v) -> bool:
        return self.position(v) is not None

    def vertices(self, lo: int, hi: int) -> list[VertexId]:
        """Vertices at positions ``lo..hi`` inclusive."""
        return [self.vertex(n) for n in range(lo, hi + 1)]

    @property
    def first_tail_position(self) -> int:
        return len(self.core_path)


@dataclass(frozen=True)
class PathShape:
    kind: Shape
    enumeration: PathEnumeration | None = None


def path_shape(profile: TreeProfile) -> PathShape:
    """Decide whether a profile is a copy of the integers, the half line, or neither."""
    if not is_leafless(profile) or branching_vertices(profile) or len(profile.rays) != 1:
        return PathShape(Shape.NOT_A_PATH)
    core_path = [profile.core.root]
    while profile.core.children(core_path[-1]):
        (nxt,) = profile.core.children(core_path[-1])
        core_path.append(nxt)
    attach, name = profile.rays[0]
    if attach != core_path[-1]:
        return PathShape(Shape.NOT_A_PATH)
    kind = Shape.Z_PATH if profile.stem else Shape.Z_PLUS_PATH
    return PathShape(kind, PathEnumeration(tuple(core_path), name, profile.stem))


def truncate(profile: Tree, window: Window) -> tuple[FiniteTree, frozenset[VertexId]]:
    """Expand stem and rays to the window; also report the cut (boundary) vertices.

    A rootless profile gets an artificial root at the deepest kept stem vertex.
    """
    if isinstance(profile, FiniteTree):
        return profile, frozenset()
    pmap = dict(profile.core.parent_map)
    root = profile.core.root
    if profile.stem and window.stem_depth > 0:
        pmap[root] = VertexId.stem(-1)
        for k in range(1, window.stem_depth):
            pmap[VertexId.stem(-k)] = VertexId.stem(-k - 1)
        root = VertexId.stem(-window.stem_depth)
    for attach, name in profile.rays:
        prev = attach
        for i in range(1, window.ray_length + 1):
            v = VertexId.ray(name, i)
            pmap[v] = prev
            prev = v
    verts = set(pmap) | {root}
    finite = FiniteTree(verts, pmap, root)
    boundary = set()
    for v in finite.vertices:
        p = profile.parent(v)
        if (p is not None and p not in finite) or any(c not in finite for c in profile.children(v)):
            boundary.add(v)
    return finite, frozenset(boundary)


def common_ancestor(tree: FiniteTree, u1: VertexId, u2: VertexId) -> VertexId:
    """Deepest vertex having both ``u1`` and ``u2`` among its descendants."""
    chain = []
    v = tree_check(tree, u1)
    while v is not None:
        chain.append(v)
        v = tree.parent(v)
    ancestors = set(chain)
    v = tree_check(tree, u2)
    while v not in ancestors:
        v = tree.parent(v)
    return v
