"""Finite Stieltjes tests for moment sequences ``s_n = ||S^n e_u||^2``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .shift import WeightedShift, moduli_equal
from .tree import Shape, TreeProfile, Window, path_shape

DEFAULT_COUNT = 20
PSD_TOL = 1e-10


@dataclass(frozen=True)
class MomentSequence:
    values: tuple[float, ...]
    source: tuple[str, str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def scaled(self, c: float) -> MomentSequence:
        return MomentSequence(tuple(c * x for x in self.values), self.source)


@dataclass(frozen=True)
class StieltjesReport:
    passes: bool
    order: int
    min_eig_H: float
    min_eig_H_shifted: float
    minors_H: tuple[float, ...]
    minors_H_shifted: tuple[float, ...]
    tol: float


def _values(s) -> tuple[float, ...]:
    return s.values if isinstance(s, MomentSequence) else tuple(float(x) for x in s)


def hankel(values: Sequence[float], order: int, shift: int = 0) -> np.ndarray:
    """``H[i, j] = values[i + j + shift]`` for ``0 <= i, j < order``."""
    v = np.asarray(values, dtype=float)
    i = np.arange(order)
    return v[i[:, None] + i[None, :] + shift]


def _equilibrate(h: np.ndarray) -> np.ndarray:
    # congruence by a positive diagonal keeps the inertia, and evens out
    # geometrically growing moments before the tolerance is applied
    d = np.sqrt(np.diag(h).clip(min=0))
    d[d < np.sqrt(np.finfo(float).tiny)] = 1.0
    return h / np.outer(d, d)


def _leading_minors(h: np.ndarray) -> tuple[float, ...]:
    return tuple(float(np.linalg.det(h[:k, :k])) for k in range(1, h.shape[0] + 1))


def stieltjes_check(s, tol: float = PSD_TOL) -> StieltjesReport:
    """Positivity of ``(s_{i+j})`` and ``(s_{i+j+1})`` at the largest order the data allows.

    Passing is necessary (not sufficient) for ``s`` to be a Stieltjes moment sequence.
    """
    values = _values(s)
    n = len(values)
    if n < 2:
        raise DomainError("a Stieltjes check needs at least two moments")
    order = (n - 1) // 2 + 1
    h = hankel(values, order)
    h1 = hankel(values, n // 2, shift=1)
    g, g1 = _equilibrate(h), _equilibrate(h1)
    e0, e1 = float(np.linalg.eigvalsh(g).min()), float(np.linalg.eigvalsh(g1).min())
    scale = 1.0 + max(np.abs(g).max(), np.abs(g1).max())
    passes = e0 >= -tol * scale and e1 >= -tol * scale
    return StieltjesReport(bool(passes), order, e0, e1, _leading_minors(h), _leading_minors(h1), tol)


def delta1_check(s, tol: float = 1e-9) -> bool:
    """Whether ``s`` coincides with the moments of the point mass at 1 (all equal to 1)."""
    values = _values(s)
    if not values:
        raise DomainError("empty moment sequence")
    return all(abs(x - 1.0) <= tol for x in values)


def unilateral_tail_modulus(shift: WeightedShift) -> float:
    """Common modulus of the weights at positions >= 2 of a half-line shift.

    Raises :class:`PreconditionError` when the shift is not on a half line or
    those moduli are not constant.
    """
    if not isinstance(shift.tree, TreeProfile):
        raise PreconditionError("expected a shift on a half-line profile")
    shape = path_shape(shift.tree)
    if shape.kind != Shape.Z_PLUS_PATH:
        raise PreconditionError(f"expected a half-line profile, got {shape.kind.value}")
    enum = shape.enumeration
    alpha = shift.weights.rays[enum.ray].tail_modulus
    last = enum.first_tail_position + len(shift.weights.rays[enum.ray].prefix)
    for n in range(2, last + 1):
        if not moduli_equal(abs(shift.weight(enum.vertex(n))), alpha):
            raise PreconditionError(f"weight modulus at position {n} differs from the tail modulus {alpha}")
    return alpha


def lambda1_bound_check(shift: WeightedShift, window: Window | None = None,
                        tol: float = PSD_TOL, count: int = DEFAULT_COUNT) -> bool:
    """Stieltjes test of the root moments of a half-line shift with constant tail from position 2.

    For such a shift the root moments are ``1, |l1|^2, |l1|^2 a^2, ...``, which
    pass exactly when ``|l1| <= a``.
    """
    unilateral_tail_modulus(shift)
    moments = shift.moment_sequence(shift.tree.core.root, count, window)
    return stieltjes_check(moments, tol).passes
