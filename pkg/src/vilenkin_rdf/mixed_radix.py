"""Mixed-radix digit arithmetic and the Vilenkin group operation on indices.

An index ``n`` is written ``n = sum_k n_k * P_{k-1}`` with ``0 <= n_k < p_k``
(least-significant digit first).  A point ``x = j / P_N`` of the finest grid
is written ``x = sum_k x_k / P_k``, so ``x_1`` is the *most* significant digit
of the grid index ``j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_CAP = 16


class CapacityError(ValueError):
    """An index does not fit below ``P_N`` of the radix sequence."""


@dataclass(frozen=True)
class RadixSequence:
    """A bounded prefix ``p_1..p_N`` of a mixed-radix system."""

    radices: tuple[int, ...]
    cap: int = DEFAULT_CAP
    cumulative: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        radices = tuple(int(p) for p in self.radices)
        if not radices:
            raise ValueError("radix sequence must have depth >= 1")
        for p in radices:
            if p < 2:
                raise ValueError(f"radix {p} < 2")
            if p > self.cap:
                raise ValueError(f"radix {p} exceeds boundedness cap {self.cap}")
        cum = [1]
        for p in radices:
            cum.append(cum[-1] * p)
        object.__setattr__(self, "radices", radices)
        object.__setattr__(self, "cumulative", tuple(cum))

    @classmethod
    def uniform(cls, p: int, depth: int, cap: int = DEFAULT_CAP) -> "RadixSequence":
        return cls((p,) * depth, cap=cap)

    @classmethod
    def parse(cls, text: str, depth: int | None = None, cap: int = DEFAULT_CAP) -> "RadixSequence":
        """Parse ``uniform:<p>:<N>``, ``<p>:<N>`` or a JSON array such as ``[2,3,2]``.

        ``depth`` overrides ``N`` in the uniform forms.
        """
        text = text.strip()
        if text.startswith("["):
            radices = json.loads(text)
            if not isinstance(radices, list):
                raise ValueError(f"bad radix descriptor {text!r}")
            return cls(tuple(radices), cap=cap)
        parts = text.split(":")
        if parts[0] == "uniform":
            parts = parts[1:]
        if len(parts) == 1 and depth is not None:
            parts.append(str(depth))
        if len(parts) != 2:
            raise ValueError(f"bad radix descriptor {text!r}")
        p, n = int(parts[0]), int(parts[1])
        if depth is not None:
            n = depth
        return cls.uniform(p, n, cap=cap)

    @property
    def depth(self) -> int:
        return len(self.radices)

    @property
    def size(self) -> int:
        """``P_N``, the number of indices (and grid cells)."""
        return self.cumulative[-1]

    def P(self, k: int) -> int:
        """``P_k`` with the convention ``P_{-1} = 0``."""
        if k < 0:
            return 0
        return self.cumulative[k]

    def p(self, k: int) -> int:
        """``p_k`` for ``1 <= k <= N``."""
        return self.radices[k - 1]

    def descriptor(self) -> str:
        if len(set(self.radices)) == 1:
            return f"uniform:{self.radices[0]}:{self.depth}"
        return json.dumps(list(self.radices), separators=(",", ":"))

    def truncated(self, depth: int) -> "RadixSequence":
        return RadixSequence(self.radices[:depth], cap=self.cap)

    def check_index(self, n: int) -> None:
        if n < 0:
            raise ValueError(f"negative index {n}")
        if n >= self.size:
            raise CapacityError(f"index {n} >= P_N = {self.size}; truncation depth too small")


@dataclass(frozen=True)
class DigitVec:
    """Digits ``n_1..n_N`` of an index, least-significant first."""

    digits: tuple[int, ...]
    radix: RadixSequence

    def __post_init__(self) -> None:
        if len(self.digits) > self.radix.depth:
            raise ValueError("more digits than the radix depth")
        for d, p in zip(self.digits, self.radix.radices):
            if not 0 <= d < p:
                raise ValueError(f"digit {d} out of range for radix {p}")

    def __iter__(self):
        return iter(self.digits)

    def __len__(self) -> int:
        return len(self.digits)


def digits_of_int(n: int, radix: RadixSequence) -> DigitVec:
    radix.check_index(n)
    digits = []
    for p in radix.radices:
        n, d = divmod(n, p)
        digits.append(d)
    return DigitVec(tuple(digits), radix)


def int_of_digits(d: DigitVec) -> int:
    return sum(digit * d.radix.cumulative[k] for k, digit in enumerate(d.digits))


def group_add(n: int, m: int, radix: RadixSequence) -> int:
    a = digits_of_int(n, radix).digits
    b = digits_of_int(m, radix).digits
    return int_of_digits(DigitVec(tuple((x + y) % p for x, y, p in zip(a, b, radix.radices)), radix))


def group_neg(n: int, radix: RadixSequence) -> int:
    a = digits_of_int(n, radix).digits
    return int_of_digits(DigitVec(tuple((-x) % p for x, p in zip(a, radix.radices)), radix))


def group_sub(n: int, m: int, radix: RadixSequence) -> int:
    return group_add(n, group_neg(m, radix), radix)


def multi_group_add(n: Sequence[int], m: Sequence[int], radices: Sequence[RadixSequence]) -> tuple[int, ...]:
    if not (len(n) == len(m) == len(radices)):
        raise ValueError("dimension mismatch")
    return tuple(group_add(a, b, r) for a, b, r in zip(n, m, radices))


def multi_group_sub(n: Sequence[int], m: Sequence[int], radices: Sequence[RadixSequence]) -> tuple[int, ...]:
    if not (len(n) == len(m) == len(radices)):
        raise ValueError("dimension mismatch")
    return tuple(group_sub(a, b, r) for a, b, r in zip(n, m, radices))


# -- vectorized helpers -------------------------------------------------------

def index_digits(n: np.ndarray | Iterable[int], radix: RadixSequence) -> np.ndarray:
    """Digit table of indices: shape ``(..., N)``, column ``k-1`` holds ``n_k``."""
    n = np.asarray(n, dtype=np.int64)
    if n.size and (n.min() < 0 or n.max() >= radix.size):
        raise CapacityError(f"indices outside [0, {radix.size})")
    cols = []
    for p in radix.radices:
        n, d = np.divmod(n, p)
        cols.append(d)
    return np.stack(cols, axis=-1)


def point_digits(j: np.ndarray | Iterable[int], radix: RadixSequence) -> np.ndarray:
    """Digits ``x_1..x_N`` of grid points ``x = j / P_N``; shape ``(..., N)``."""
    j = np.asarray(j, dtype=np.int64)
    if j.size and (j.min() < 0 or j.max() >= radix.size):
        raise CapacityError(f"grid indices outside [0, {radix.size})")
    return np.stack(np.unravel_index(j, radix.radices), axis=-1)


def group_add_array(n, m, radix: RadixSequence) -> np.ndarray:
    """Elementwise ``n (+) m`` for integer arrays (broadcasting)."""
    a = index_digits(n, radix)
    b = index_digits(m, radix)
    p = np.asarray(radix.radices, dtype=np.int64)
    s = (a + b) % p
    return s @ np.asarray(radix.cumulative[:-1], dtype=np.int64)


def group_neg_array(n, radix: RadixSequence) -> np.ndarray:
    a = index_digits(n, radix)
    p = np.asarray(radix.radices, dtype=np.int64)
    return ((-a) % p) @ np.asarray(radix.cumulative[:-1], dtype=np.int64)
