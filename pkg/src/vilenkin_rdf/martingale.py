"""Vilenkin filtration operators, square functions and martingale norms.

Conditional expectations are computed by averaging over the atoms of the
filtration; the modified differences use the identity

    Delta_{n,l} f = R * E_{n-1}(conj(R) * f),   R = prod_{d: n_d >= 1} r_{n_d}(x_d)^{l_d},

so every operator here acts locally on filtration atoms and produces exact
zeros wherever its input vanishes on a whole atom of ``F_{n-1}``.  The
spectral counterparts (coefficient masking) are kept as independent routes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .mixed_radix import RadixSequence
from .transform import GridFunction, forward_values, grid_shape, inverse_values


def _check_level(n: Sequence[int], radices: Sequence[RadixSequence]) -> tuple[int, ...]:
    n = tuple(int(v) for v in n)
    if len(n) != len(radices):
        raise ValueError("filtration index dimension mismatch")
    for nd, r in zip(n, radices):
        if not 0 <= nd <= r.depth:
            raise ValueError(f"level {nd} outside 0..{r.depth}")
    return n


def levels(radices: Sequence[RadixSequence]) -> Iterator[tuple[int, ...]]:
    """All filtration indices ``n`` with ``0 <= n_d <= N_d``."""
    return itertools.product(*(range(r.depth + 1) for r in radices))


def lower(n: Sequence[int]) -> tuple[int, ...]:
    """``n - 1`` with each coordinate floored at 0."""
    return tuple(max(v - 1, 0) for v in n)


# -- conditional expectation ---------------------------------------------------

def average_values(values: np.ndarray, n: Sequence[int], radices: Sequence[RadixSequence]) -> np.ndarray:
    shape = []
    for nd, r in zip(n, radices):
        shape += [r.P(nd), r.size // r.P(nd)]
    v = values.reshape(shape)
    m = v.mean(axis=tuple(range(1, 2 * len(radices), 2)), keepdims=True)
    return np.broadcast_to(m, shape).reshape(values.shape)


def cond_expectation(f: GridFunction, n: Sequence[int]) -> GridFunction:
    """``E_n f``: the mean of ``f`` over each atom of ``F_n``."""
    n = _check_level(n, f.radices)
    return f.like(average_values(f.values, n, f.radices))


def level_mask(n: Sequence[int], radices: Sequence[RadixSequence]) -> np.ndarray:
    """Indicator of the index box ``prod_d [0, P_{n_d})``."""
    mask = np.ones((), dtype=bool)
    for d, (nd, r) in enumerate(zip(n, radices)):
        axis = np.arange(r.size) < r.P(nd)
        shape = [1] * len(radices)
        shape[d] = r.size
        mask = mask & axis.reshape(shape)
    return np.broadcast_to(mask, grid_shape(radices))


def cond_expectation_spectral(f: GridFunction, n: Sequence[int]) -> GridFunction:
    """``E_n f`` as a Vilenkin-Fourier partial sum."""
    n = _check_level(n, f.radices)
    c = forward_values(f.values, f.radices)
    return f.like(inverse_values(c * level_mask(n, f.radices), f.radices))


# -- martingale differences ------------------------------------------------------

def diff_from_expectations(E: dict, n: Sequence[int], shape) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    for eps in itertools.product((0, 1), repeat=len(n)):
        m = tuple(v - e for v, e in zip(n, eps))
        if min(m) < 0:
            continue
        sign = -1 if sum(eps) % 2 else 1
        out += sign * E[m]
    return out


def diff(f: GridFunction, n: Sequence[int]) -> GridFunction:
    """``Delta_n f`` by the alternating sum of expectations (``E`` at level -1 is 0)."""
    n = _check_level(n, f.radices)
    E = {}
    for eps in itertools.product((0, 1), repeat=len(n)):
        m = tuple(v - e for v, e in zip(n, eps))
        if min(m) >= 0:
            E[m] = average_values(f.values, m, f.radices)
    return f.like(diff_from_expectations(E, n, f.values.shape))


def delta_range(level: int, radix: RadixSequence) -> tuple[int, int]:
    """``delta_n = [P_{n-1}, P_n)`` with ``P_{-1} = 0``."""
    return radix.P(level - 1), radix.P(level)


def diff_spectral(f: GridFunction, n: Sequence[int]) -> GridFunction:
    n = _check_level(n, f.radices)
    c = forward_values(f.values, f.radices)
    mask = _box_mask([delta_range(nd, r) for nd, r in zip(n, f.radices)], f.radices)
    return f.like(inverse_values(c * mask, f.radices))


def _box_mask(bounds, radices) -> np.ndarray:
    mask = np.ones((), dtype=bool)
    for d, ((lo, hi), r) in enumerate(zip(bounds, radices)):
        axis = np.zeros(r.size, dtype=bool)
        axis[lo:hi] = True
        shape = [1] * len(radices)
        shape[d] = r.size
        mask = mask & axis.reshape(shape)
    return np.broadcast_to(mask, grid_shape(radices))


# -- modified differences ----------------------------------------------------------

def block_values(level: int, radix: RadixSequence) -> range:
    """Admissible ``l`` at a level: ``1..p_n-1``, or the single sentinel ``0`` at level 0."""
    if level == 0:
        return range(0, 1)
    return range(1, radix.p(level))


def block_range(level: int, l: int, radix: RadixSequence) -> tuple[int, int]:
    """One side of ``delta_{n,l}``: ``[l P_{n-1}, (l+1) P_{n-1})``; level 0 gives ``{0}``."""
    if level == 0:
        if l != 0:
            raise ValueError("level 0 has only the trivial block l = 0")
        return 0, 1
    if not 1 <= l < radix.p(level):
        raise ValueError(f"block index {l} outside [1, {radix.p(level)})")
    step = radix.P(level - 1)
    return l * step, (l + 1) * step


@dataclass(frozen=True)
class DeltaBlock:
    """The index rectangle ``delta_{n,l}``; ``l_d = 0`` marks the trivial block at ``n_d = 0``."""

    n: tuple[int, ...]
    l: tuple[int, ...]

    def bounds(self, radices: Sequence[RadixSequence]) -> tuple[tuple[int, int], ...]:
        if len(self.n) != len(radices) or len(self.l) != len(radices):
            raise ValueError("block dimension mismatch")
        return tuple(block_range(nd, ld, r) for nd, ld, r in zip(self.n, self.l, radices))


def blocks_at(n: Sequence[int], radices: Sequence[RadixSequence]) -> Iterator[DeltaBlock]:
    n = tuple(n)
    for l in itertools.product(*(block_values(nd, r) for nd, r in zip(n, radices))):
        yield DeltaBlock(n, l)


def all_blocks(radices: Sequence[RadixSequence]) -> Iterator[DeltaBlock]:
    for n in levels(radices):
        yield from blocks_at(n, radices)


def rademacher_power(level: int, l: int, radix: RadixSequence) -> np.ndarray:
    """``r_level(x)^l`` on the one-parameter grid."""
    if level == 0 or l == 0:
        return np.ones(radix.size, dtype=complex)
    p = radix.p(level)
    digit = (np.arange(radix.size) // (radix.size // radix.P(level))) % p
    return np.exp(2j * np.pi * ((l * digit) % p) / p)


def block_modulation(block: DeltaBlock, radices: Sequence[RadixSequence]) -> np.ndarray:
    out = np.ones((), dtype=complex)
    for d, (nd, ld, r) in enumerate(zip(block.n, block.l, radices)):
        shape = [1] * len(radices)
        shape[d] = r.size
        out = out * rademacher_power(nd, ld, r).reshape(shape)
    return out


def modified_diff_values(values: np.ndarray, block: DeltaBlock, radices: Sequence[RadixSequence]) -> np.ndarray:
    block.bounds(radices)  # validates the l range
    R = block_modulation(block, radices)
    return R * average_values(np.conj(R) * values, lower(block.n), radices)


def modified_diff(f: GridFunction, block: DeltaBlock) -> GridFunction:
    """``Delta_{n,l} f``: the part of ``f`` with spectrum in ``delta_{n,l}``."""
    _check_level(block.n, f.radices)
    return f.like(modified_diff_values(f.values, block, f.radices))


def modified_diff_spectral(f: GridFunction, block: DeltaBlock) -> GridFunction:
    c = forward_values(f.values, f.radices)
    return f.like(inverse_values(c * _box_mask(block.bounds(f.radices), f.radices), f.radices))


# -- square functions and norms ---------------------------------------------------------

def _family(f) -> list[GridFunction]:
    if isinstance(f, GridFunction):
        return [f]
    return list(f)


def _square_sum(f: GridFunction) -> np.ndarray:
    E = {n: average_values(f.values, n, f.radices) for n in levels(f.radices)}
    total = np.zeros(f.values.shape)
    for n in E:
        total += np.abs(diff_from_expectations(E, n, f.values.shape)) ** 2
    return total


def square_function(f) -> GridFunction:
    """``S f = (sum_n |Delta_n f|^2)^{1/2}``; for a family also summed over members."""
    family = _family(f)
    if not family:
        raise ValueError("empty family")
    total = sum(_square_sum(g) for g in family)
    return family[0].like(np.sqrt(total))


def modified_square_function(f) -> GridFunction:
    """``S_m f = (sum_n sum_l |Delta_{n,l} f|^2)^{1/2}``; for a family also summed over members."""
    family = _family(f)
    if not family:
        raise ValueError("empty family")
    radices = family[0].radices
    total = np.zeros(grid_shape(radices))
    blocks = list(all_blocks(radices))
    for g in family:
        for block in blocks:
            total += np.abs(modified_diff_values(g.values, block, radices)) ** 2
    return family[0].like(np.sqrt(total))


def _check_p(p: float) -> None:
    if not p > 0:
        raise ValueError(f"exponent p must be positive, got {p}")


def lp_norm(f: GridFunction | np.ndarray, p: float) -> float:
    """Discrete ``L^p`` norm ``(mean |f|^p)^{1/p}`` with respect to the grid measure."""
    _check_p(p)
    values = f.values if isinstance(f, GridFunction) else np.asarray(f)
    return float(np.mean(np.abs(values) ** p) ** (1.0 / p))


def lp_l2_norm(family, p: float) -> float:
    """``|| (sum_k |f_k|^2)^{1/2} ||_{L^p}``."""
    _check_p(p)
    family = _family(family)
    if not family:
        return 0.0
    return lp_norm(np.sqrt(sum(np.abs(g.values) ** 2 for g in family)), p)


def hardy_norm(f, p: float) -> float:
    """``||S f||_{L^p}`` (for a family, ``S`` of the l2-valued martingale)."""
    _check_p(p)
    family = _family(f)
    if not family:
        return 0.0
    return lp_norm(square_function(family), p)
