"""Digit-wise partition of an index interval into shift-aligned pieces.

For ``[a, b)`` the pieces are the plain intervals ``J_j = [b_j, b_{j-1})``
(``j < t``), based at ``b``, and the tilde intervals ``~J_0 = {a}``, ``~J_j``
(``1 <= j <= t``), based at ``a``.  Subtracting the base (in the Vilenkin
group) maps each piece onto a union of blocks ``delta_{j,l}``, ``l`` in the
piece's ``lam`` set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .martingale import block_range
from .mixed_radix import RadixSequence, group_add_array, group_neg

TILDE = "tilde"
PLAIN = "plain"


@dataclass(frozen=True)
class IntervalPiece:
    lo: int
    hi: int
    kind: str
    level: int
    lam: tuple[int, ...]
    base: int

    @property
    def label(self) -> str:
        return f"~J{self.level}" if self.kind == TILDE else f"J{self.level}"

    def __len__(self) -> int:
        return self.hi - self.lo

    def indices(self) -> range:
        return range(self.lo, self.hi)


@dataclass(frozen=True)
class IntervalPartition:
    a: int
    b: int
    t: int
    pieces: tuple[IntervalPiece, ...]
    empty: tuple[str, ...] = ()
    excluded: str = ""

    def __iter__(self) -> Iterator[IntervalPiece]:
        return iter(self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def __getitem__(self, i: int) -> IntervalPiece:
        return self.pieces[i]


def _digits(n: int, radices: Sequence[int]) -> list[int]:
    out = []
    for p in radices:
        n, d = divmod(n, p)
        out.append(d)
    if n:
        raise ValueError("number does not fit the radix sequence")
    return out


def partition_interval(a: int, b: int, radix: RadixSequence) -> IntervalPartition:
    if not 0 <= a < b:
        raise ValueError(f"need 0 <= a < b, got [{a}, {b})")
    if b > radix.size:
        raise ValueError(f"b = {b} exceeds P_N = {radix.size}")
    radices = list(radix.radices)
    if b == radix.size:
        # b = P_N needs one extra digit; that level only feeds J_t (dropped) and an empty ~J_t
        radices.append(2)
    P = [1]
    for p in radices:
        P.append(P[-1] * p)
    beta = _digits(b, radices)
    alpha = _digits(a, radices)
    K = max(k + 1 for k, d in enumerate(beta) if d)  # number of digits of b
    # beta[j-1], alpha[j-1] are the j-th digits; b_j zeroes the j lowest digits
    b_j = [sum(beta[i] * P[i] for i in range(j, K)) for j in range(K + 1)]
    a_j = [sum(alpha[i] * P[i] for i in range(j, K)) for j in range(K + 1)]
    t = max(j for j in range(1, K + 1) if alpha[j - 1] != beta[j - 1])

    pieces: list[IntervalPiece] = []
    empty: list[str] = []

    def add(piece: IntervalPiece) -> None:
        if piece.hi > piece.lo:
            pieces.append(piece)
        else:
            empty.append(piece.label)

    for j in range(1, t):
        p = radices[j - 1]
        lam = tuple(range(p - beta[j - 1], p))
        add(IntervalPiece(b_j[j], b_j[j - 1], PLAIN, j, lam, b))
    add(IntervalPiece(a, a + 1, TILDE, 0, (0,), a))
    for j in range(1, t + 1):
        p = radices[j - 1]
        top = p if j < t else beta[t - 1]
        lo = a_j[j] + (alpha[j - 1] + 1) * P[j - 1]
        hi = a_j[j] + top * P[j - 1]
        add(IntervalPiece(lo, max(lo, hi), TILDE, j, tuple(range(1, top - alpha[j - 1])), a))
    # J_t contains a; its part above a is covered by the tilde pieces
    return IntervalPartition(a, b, t, tuple(pieces), tuple(empty), f"J{t}")


def verify_shift_property(piece: IntervalPiece, base: int, radix: RadixSequence) -> bool:
    """Brute force: ``{x (-) base : x in piece}`` equals ``U_{l in lam} delta_{level,l}``."""
    if len(piece) == 0:
        return True
    shifted = group_add_array(np.arange(piece.lo, piece.hi), group_neg(base, radix), radix)
    spans = []
    for l in piece.lam:
        try:
            spans.append(np.arange(*block_range(piece.level, l, radix)))
        except ValueError:
            return False
    blocks = np.unique(np.concatenate(spans)) if spans else np.empty(0, dtype=np.int64)
    return np.array_equal(np.unique(shifted), blocks) and len(np.unique(shifted)) == len(piece)


# -- rectangles -------------------------------------------------------------------------

@dataclass(frozen=True)
class Rectangle:
    """Product of half-open integer intervals ``[lo_d, hi_d)``."""

    bounds: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        bounds = tuple((int(lo), int(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", bounds)

    @property
    def dims(self) -> int:
        return len(self.bounds)

    @property
    def size(self) -> int:
        out = 1
        for lo, hi in self.bounds:
            out *= max(hi - lo, 0)
        return out

    def is_empty(self) -> bool:
        return self.size == 0

    def contains(self, idx: Sequence[int]) -> bool:
        return all(lo <= i < hi for i, (lo, hi) in zip(idx, self.bounds))

    def intersects(self, other: "Rectangle") -> bool:
        return all(max(a0, b0) < min(a1, b1) for (a0, a1), (b0, b1) in zip(self.bounds, other.bounds))

    def indices(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(lo, hi) for lo, hi in self.bounds))

    def corner(self, choice: Sequence[str]) -> tuple[int, ...]:
        """Vertex picking ``lo`` (``'a'``) or the exclusive ``hi`` (``'b'``) per dimension."""
        return tuple(lo if c == "a" else hi for c, (lo, hi) in zip(choice, self.bounds))

    def inclusive_corners(self) -> list[tuple[int, ...]]:
        """The ``2^D`` corners ``{lo_d, hi_d - 1}`` of the rectangle as a set of indices."""
        return [tuple(c) for c in itertools.product(*((lo, hi - 1) for lo, hi in self.bounds))]


@dataclass(frozen=True)
class RectPiece:
    sides: tuple[IntervalPiece, ...]
    corner: tuple[str, ...]

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(s.base for s in self.sides)

    @property
    def level(self) -> tuple[int, ...]:
        return tuple(s.level for s in self.sides)

    @property
    def lam(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.product(*(s.lam for s in self.sides)))

    @property
    def rect(self) -> Rectangle:
        return Rectangle(tuple((s.lo, s.hi) for s in self.sides))


@dataclass(frozen=True)
class RectanglePartition:
    rect: Rectangle
    pieces: tuple[RectPiece, ...]
    sides: tuple[IntervalPartition, ...] = field(repr=False, default=())

    def __iter__(self) -> Iterator[RectPiece]:
        return iter(self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)


def partition_rectangle(rect: Rectangle, radices: Sequence[RadixSequence]) -> RectanglePartition:
    """All products of the per-dimension pieces, labelled by corner (``'a'`` tilde, ``'b'`` plain)."""
    if rect.dims != len(radices):
        raise ValueError("rectangle dimension mismatch")
    for lo, hi in rect.bounds:
        if lo >= hi:
            raise ValueError(f"degenerate side [{lo}, {hi})")
    sides = tuple(partition_interval(lo, hi, r) for (lo, hi), r in zip(rect.bounds, radices))
    pieces = []
    for combo in itertools.product(*(s.pieces for s in sides)):
        corner = tuple("a" if s.kind == TILDE else "b" for s in combo)
        pieces.append(RectPiece(tuple(combo), corner))
    return RectanglePartition(rect, tuple(pieces), sides)
