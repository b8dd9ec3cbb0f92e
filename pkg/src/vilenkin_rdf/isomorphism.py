"""Digit interleaving between a D-parameter Vilenkin system and a one-parameter one.

Position ``m`` of the derived radix sequence is the pair ``(k, d)`` taken in
round-robin order ``(1,1), (1,2), .., (1,D), (2,1), ..``; dimensions whose
depth is exhausted are skipped.  ``psi`` moves index digits, ``phi`` moves
point digits, and ``v_{psi(n)}(phi(x)) = v_n(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .mixed_radix import CapacityError, RadixSequence, point_digits
from .partition import Rectangle
from .pipeline import SpectralFamily
from .transform import GridFunction


@dataclass(frozen=True)
class InterleavingMap:
    radices: tuple[RadixSequence, ...]
    positions: tuple[tuple[int, int], ...] = field(init=False, repr=False)
    derived: RadixSequence = field(init=False, repr=False)

    def __post_init__(self) -> None:
        radices = tuple(self.radices)
        depth = max(r.depth for r in radices)
        positions = tuple((k, d) for k in range(depth) for d, r in enumerate(radices) if k < r.depth)
        cap = max(r.cap for r in radices)
        derived = RadixSequence(tuple(radices[d].radices[k] for k, d in positions), cap=cap)
        object.__setattr__(self, "radices", radices)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "derived", derived)

    @property
    def dims(self) -> int:
        return len(self.radices)

    def _check(self, n: Sequence[int]) -> tuple[int, ...]:
        n = tuple(int(v) for v in n)
        if len(n) != self.dims:
            raise ValueError("multi-index dimension mismatch")
        for v, r in zip(n, self.radices):
            if not 0 <= v < r.size:
                raise CapacityError(f"coordinate {v} outside [0, {r.size})")
        return n

    def psi_index(self, n: Sequence[int]) -> int:
        """Interleave index digits: digit ``k`` of coordinate ``d`` goes to the position of ``(k, d)``."""
        n = self._check(n)
        digits = [[] for _ in range(self.dims)]
        for d, (v, r) in enumerate(zip(n, self.radices)):
            for p in r.radices:
                v, x = divmod(v, p)
                digits[d].append(x)
        P = self.derived.cumulative
        return sum(digits[d][k] * P[m] for m, (k, d) in enumerate(self.positions))

    def psi_inverse(self, m: int) -> tuple[int, ...]:
        self.derived.check_index(m)
        out = [0] * self.dims
        for pos, (k, d) in enumerate(self.positions):
            m, x = divmod(m, self.derived.radices[pos])
            out[d] += x * self.radices[d].cumulative[k]
        return tuple(out)

    def phi_point(self, grid_indices: Sequence[int]) -> int:
        """Interleave point digits ``x^{(d)}_k`` into one grid index of the derived system."""
        j = self._check(grid_indices)
        digits = [point_digits(v, r) for v, r in zip(j, self.radices)]
        total = self.derived.size
        P = self.derived.cumulative
        return int(sum(int(digits[d][k]) * (total // P[m + 1]) for m, (k, d) in enumerate(self.positions)))

    def phi_grid(self) -> np.ndarray:
        """``phi`` on every point of the D-parameter grid (array of derived grid indices)."""
        total = self.derived.size
        P = self.derived.cumulative
        out = np.zeros(tuple(r.size for r in self.radices), dtype=np.int64)
        digits = [point_digits(np.arange(r.size), r) for r in self.radices]
        for m, (k, d) in enumerate(self.positions):
            shape = [1] * self.dims
            shape[d] = self.radices[d].size
            out = out + (digits[d][:, k] * (total // P[m + 1])).reshape(shape)
        return out

    def transport(self, f: GridFunction) -> GridFunction:
        """The one-parameter function ``g`` with ``g(phi(x)) = f(x)``."""
        if f.radices != self.radices:
            raise ValueError("function lives on a different grid")
        out = np.empty(self.derived.size, dtype=complex)
        out[self.phi_grid().reshape(-1)] = f.values.reshape(-1)
        return GridFunction(out, (self.derived,))

    def transport_family(self, family: SpectralFamily) -> tuple[list[set[int]], SpectralFamily]:
        """Functions moved by ``phi`` and index sets by ``psi``.

        The returned family carries placeholder full-range rectangles; the
        exotic index sets returned alongside are the true spectral supports.
        """
        sets = [exotic_interval(rect, self) for rect in family.rects]
        full = Rectangle(((0, self.derived.size),))
        moved = SpectralFamily((self.derived,), [(full, self.transport(f)) for f in family.functions])
        return sets, moved


def exotic_interval(rect: Rectangle, imap: InterleavingMap) -> set[int]:
    """``{psi(n) : n in rect}``."""
    if rect.dims != imap.dims:
        raise ValueError("rectangle dimension mismatch")
    return {imap.psi_index(n) for n in rect.indices()}
