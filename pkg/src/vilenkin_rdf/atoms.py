"""Simple p-atoms, Gundy-type support checks and quasi-locality integrals."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .martingale import (
    average_values,
    diff_from_expectations,
    levels,
    lower,
    modified_diff_values,
    blocks_at,
)
from .mixed_radix import RadixSequence
from .transform import GridFunction, grid_shape

SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class VilenkinInterval:
    """``[index / P_level, (index + 1) / P_level)``."""

    level: int
    index: int
    radix: RadixSequence

    def __post_init__(self) -> None:
        if not 0 <= self.level <= self.radix.depth:
            raise ValueError(f"level {self.level} outside 0..{self.radix.depth}")
        if not 0 <= self.index < self.radix.P(self.level):
            raise ValueError(f"index {self.index} outside [0, {self.radix.P(self.level)})")

    @property
    def measure(self) -> float:
        return 1.0 / self.radix.P(self.level)

    def cells(self) -> tuple[int, int]:
        width = self.radix.size // self.radix.P(self.level)
        return self.index * width, (self.index + 1) * width

    def mask(self) -> np.ndarray:
        lo, hi = self.cells()
        m = np.zeros(self.radix.size, dtype=bool)
        m[lo:hi] = True
        return m

    def expand(self, r: int = 1) -> "VilenkinInterval":
        """``I^{(r)}``: the Vilenkin interval ``r`` levels up that contains ``I``; capped at ``[0,1)``."""
        if r < 0:
            raise ValueError("r must be nonnegative")
        level = max(self.level - r, 0)
        return VilenkinInterval(level, self.index // (self.radix.P(self.level) // self.radix.P(level)), self.radix)


def as_vilenkin_interval(mask: np.ndarray, radix: RadixSequence) -> VilenkinInterval | None:
    """The Vilenkin interval whose cell set is ``mask``, if there is one."""
    cells = np.flatnonzero(mask)
    if cells.size == 0:
        return None
    for level in range(radix.depth + 1):
        width = radix.size // radix.P(level)
        if cells.size == width and cells[0] % width == 0 and cells[-1] - cells[0] == width - 1:
            return VilenkinInterval(level, int(cells[0] // width), radix)
    return None


@dataclass(frozen=True, eq=False)
class SimpleAtom:
    """``a`` supported on ``I_1 x .. x I_j x A`` in the permuted coordinates ``perm``.

    Canonical coordinate ``i`` lives on array axis ``perm[i]``; ``A`` is a
    boolean mask over the axes ``perm[j:]`` (in that order).
    """

    function: GridFunction
    intervals: tuple[VilenkinInterval, ...]
    A: np.ndarray
    p0: float
    perm: tuple[int, ...]

    @property
    def j(self) -> int:
        return len(self.intervals)

    @property
    def radices(self) -> tuple[RadixSequence, ...]:
        return self.function.radices

    def support_measure(self) -> float:
        m = float(np.mean(self.A))
        for iv in self.intervals:
            m *= iv.measure
        return m

    def _embed(self, canonical: np.ndarray) -> np.ndarray:
        """Move an array in canonical axis order onto the atom's grid axes."""
        return np.transpose(canonical, np.argsort(self.perm))

    def region(self, interval_masks: Sequence[np.ndarray], tail: np.ndarray | None = None) -> np.ndarray:
        """Indicator of ``M_1 x .. x M_j x tail`` (tail defaults to the full cube)."""
        D = len(self.perm)
        out = np.ones((), dtype=bool)
        for i, m in enumerate(interval_masks):
            shape = [1] * D
            shape[i] = m.size
            out = out & m.reshape(shape)
        if tail is not None:
            out = out & tail.reshape((1,) * self.j + tail.shape)
        canonical_shape = tuple(self.radices[self.perm[i]].size for i in range(D))
        return self._embed(np.broadcast_to(out, canonical_shape))

    def support_mask(self) -> np.ndarray:
        return self.region([iv.mask() for iv in self.intervals], self.A)

    def A_interval(self) -> VilenkinInterval | None:
        if self.A.ndim != 1:
            return None
        return as_vilenkin_interval(self.A, self.radices[self.perm[-1]])

    def marginal_means(self) -> float:
        """Largest absolute value of the interval and A marginal integrals."""
        v = np.transpose(self.function.values, self.perm)
        worst = 0.0
        for i, iv in enumerate(self.intervals):
            lo, hi = iv.cells()
            sl = np.take(v, np.arange(lo, hi), axis=i)
            worst = max(worst, float(np.abs(sl.sum(axis=i)).max()) / v.shape[i])
        tail_axes = tuple(range(self.j, v.ndim))
        masked = v * self.A.reshape((1,) * self.j + self.A.shape)
        n_tail = int(np.prod([v.shape[a] for a in tail_axes]))
        worst = max(worst, float(np.abs(masked.sum(axis=tail_axes)).max()) / n_tail)
        return worst

    def check(self, tol: float = 1e-9) -> None:
        """Raise ``ValueError`` when a defining property fails."""
        values = self.function.values
        scale = max(1.0, float(np.abs(values).max()))
        if np.abs(values[~self.support_mask()]).max(initial=0.0) > 0:
            raise ValueError("atom is not supported in I_1 x .. x I_j x A")
        l2 = float(np.sqrt(np.mean(np.abs(values) ** 2)))
        bound = self.support_measure() ** (0.5 - 1.0 / self.p0)
        if l2 > bound * (1 + tol):
            raise ValueError(f"L2 norm {l2} exceeds bound {bound}")
        if self.marginal_means() > tol * scale:
            raise ValueError("marginal means do not vanish")


def _remove_means(v: np.ndarray, support: Sequence[np.ndarray], tail: np.ndarray, j: int) -> np.ndarray:
    # the support is a product set, so the per-factor mean removals commute
    for i, m in enumerate(support):
        idx = np.flatnonzero(m)
        sub = np.take(v, idx, axis=i)
        mean = sub.mean(axis=i, keepdims=True)
        shape = [1] * v.ndim
        shape[i] = m.size
        v = v - mean * m.reshape(shape)
    tail_axes = tuple(range(j, v.ndim))
    tmask = tail.reshape((1,) * j + tail.shape)
    mean = (v * tmask).sum(axis=tail_axes, keepdims=True) / tail.sum()
    return (v - mean) * tmask


def make_simple_atom(
    intervals: Sequence[VilenkinInterval],
    A: np.ndarray,
    p0: float,
    seed,
    radices: Sequence[RadixSequence],
    perm: Sequence[int] | None = None,
    init: str | Callable = "normal",
    max_tries: int = 8,
) -> SimpleAtom:
    """Random function on the support with every marginal mean removed, scaled so the L2 bound holds with equality.

    ``init="constant"`` starts from the constant function (which mean removal
    annihilates) so the first draw is always resampled.
    """
    radices = tuple(radices)
    D = len(radices)
    j = len(intervals)
    if not 1 <= j <= D - 1:
        raise ValueError(f"need 1 <= j <= D-1 intervals, got {j} for D={D}")
    perm = tuple(range(D)) if perm is None else tuple(perm)
    if sorted(perm) != list(range(D)):
        raise ValueError("perm must be a permutation of the axes")
    for i, iv in enumerate(intervals):
        if iv.radix != radices[perm[i]]:
            raise ValueError(f"interval {i} uses the wrong radix for axis {perm[i]}")
    A = np.asarray(A, dtype=bool)
    tail_shape = tuple(radices[perm[i]].size for i in range(j, D))
    if A.shape != tail_shape:
        raise ValueError(f"A has shape {A.shape}, expected {tail_shape}")
    if not A.any():
        raise ValueError("A must be nonempty")
    if not 0 < p0 <= 1:
        raise ValueError("p0 must lie in (0, 1]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    canonical_shape = tuple(radices[perm[i]].size for i in range(D))
    masks = [iv.mask() for iv in intervals]

    for attempt in range(max_tries):
        if attempt == 0 and init == "constant":
            v = np.ones(canonical_shape, dtype=complex)
        elif callable(init) and attempt == 0:
            v = np.asarray(init(canonical_shape), dtype=complex)
        else:
            v = rng.standard_normal(canonical_shape) + 1j * rng.standard_normal(canonical_shape)
        for i, m in enumerate(masks):
            shape = [1] * D
            shape[i] = m.size
            v = v * m.reshape(shape)
        v = _remove_means(v, masks, A, j)
        l2 = float(np.sqrt(np.mean(np.abs(v) ** 2)))
        if l2 > 1e-9 * max(1.0, float(np.abs(v).max(initial=0.0))) and l2 > 0:
            break
    else:
        raise ValueError("mean removal annihilates every draw; the support is too small")

    measure = float(np.mean(A))
    for iv in intervals:
        measure *= iv.measure
    v = v * (measure ** (0.5 - 1.0 / p0) / l2)
    values = np.transpose(v, np.argsort(perm))
    atom = SimpleAtom(GridFunction(values, radices), tuple(intervals), A, float(p0), perm)
    return atom


def random_simple_atom(rng: np.random.Generator, radices: Sequence[RadixSequence], p0: float = 1.0) -> SimpleAtom:
    """Random ``j``, permutation, interval levels (at least two cells wide) and set ``A``."""
    radices = tuple(radices)
    D = len(radices)
    j = int(rng.integers(1, D))
    perm = tuple(int(x) for x in rng.permutation(D))
    intervals = []
    for i in range(j):
        r = radices[perm[i]]
        level = int(rng.integers(0, r.depth))
        intervals.append(VilenkinInterval(level, int(rng.integers(0, r.P(level))), r))
    tail_shape = tuple(radices[perm[i]].size for i in range(j, D))
    if D - j == 1 and rng.random() < 0.5:
        r = radices[perm[-1]]
        level = int(rng.integers(0, r.depth))
        A = VilenkinInterval(level, int(rng.integers(0, r.P(level))), r).mask()
    else:
        while True:
            A = rng.random(tail_shape) < rng.uniform(0.05, 0.9)
            if A.sum() >= 2:
                break
    return make_simple_atom(intervals, A, p0, rng, radices, perm)


# -- support relations --------------------------------------------------------------------

def _atom_level(atom: SimpleAtom) -> tuple[int, ...]:
    """Minimal ``N`` with ``I_1 x .. x I_j x [0,1)^{D-j}`` an atom of ``F_N`` (grid axis order)."""
    N = [0] * len(atom.perm)
    for i, iv in enumerate(atom.intervals):
        N[atom.perm[i]] = iv.level
    return tuple(N)


def delta_support_leak(atom: SimpleAtom) -> float:
    """Largest ``int |Delta_n a|`` outside the support each ``Delta_n a`` is claimed to have."""
    f = atom.function
    radices = f.radices
    N = _atom_level(atom)
    interval_axes = [atom.perm[i] for i in range(atom.j)]
    strip = atom.region([iv.mask() for iv in atom.intervals])
    A_iv = atom.A_interval() if atom.j == len(radices) - 1 else None
    allowed = atom.support_mask() if A_iv is not None else strip
    E = {n: average_values(f.values, n, radices) for n in levels(radices)}
    worst = 0.0
    for n in E:
        d = diff_from_expectations(E, n, f.values.shape)
        active = all(n[ax] > N[ax] for ax in interval_axes)
        outside = ~allowed if active else np.ones(d.shape, dtype=bool)
        worst = max(worst, float(np.mean(np.abs(d) * outside)))
    return worst


def verify_delta_support(atom: SimpleAtom, tol: float = SUPPORT_TOL) -> bool:
    """``Delta_n a`` lives in ``I_1 x .. x I_j x [0,1)^{D-j}`` (or in ``I_1 x .. x I_D`` when ``A``
    is a Vilenkin interval and ``j = D-1``) once ``n_d > N_d`` on the interval axes, and vanishes otherwise."""
    return delta_support_leak(atom) <= tol


# -- Gundy condition --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GundyMartingale:
    """``f`` with ``Delta_n f = 1_{e_n} Delta_n f`` and each ``e_n`` a union of atoms of ``F_{n-1}``."""

    function: GridFunction
    e: dict

    def union(self) -> np.ndarray:
        out = np.zeros(self.function.values.shape, dtype=bool)
        for n, mask in self.e.items():
            if any(n):
                out |= mask
        return out

    def check(self, tol: float = SUPPORT_TOL, modified: bool = False) -> None:
        f = self.function
        radices = f.radices
        scale = max(1.0, float(np.abs(f.values).max()))
        E = {n: average_values(f.values, n, radices) for n in levels(radices)}
        if np.abs(E[(0,) * f.dims]).max() > tol * scale:
            raise ValueError("level-0 part does not vanish")
        for n in E:
            if not any(n):
                continue
            mask = self.e.get(n, np.zeros(f.values.shape, dtype=bool))
            as_float = mask.astype(float)
            if np.any(average_values(as_float, lower(n), radices) != as_float):
                raise ValueError(f"e_{n} is not F_(n-1) measurable")
            if modified:
                pieces = [modified_diff_values(f.values, b, radices) for b in blocks_at(n, radices)]
            else:
                pieces = [diff_from_expectations(E, n, f.values.shape)]
            for d in pieces:
                if np.abs(d[~mask]).max(initial=0.0) > tol * scale:
                    raise ValueError(f"Delta_{n} f is not supported in e_{n}")


def random_measurable_set(rng: np.random.Generator, n: Sequence[int], radices: Sequence[RadixSequence], density: float) -> np.ndarray:
    """Random union of atoms of ``F_n``."""
    coarse = rng.random(tuple(r.P(nd) for nd, r in zip(n, radices))) < density
    out = coarse
    for d, (nd, r) in enumerate(zip(n, radices)):
        out = np.repeat(out, r.size // r.P(nd), axis=d)
    return out


def random_gundy_martingale(
    rng: np.random.Generator, radices: Sequence[RadixSequence], density: float = 0.3, e=None
) -> GundyMartingale:
    """``f = sum_{n != 0} 1_{e_n} Delta_n g_n`` for random ``g_n`` and random ``F_{n-1}``-measurable ``e_n``."""
    radices = tuple(radices)
    shape = grid_shape(radices)
    if e is None:
        e = {n: random_measurable_set(rng, lower(n), radices, density) for n in levels(radices) if any(n)}
    g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    E = {n: average_values(g, n, radices) for n in levels(radices)}
    total = np.zeros(shape, dtype=complex)
    for n, mask in e.items():
        total += mask * diff_from_expectations(E, n, shape)
    return GundyMartingale(GridFunction(total, radices), dict(e))


def gundy_check(m: GundyMartingale, Vf: GridFunction, tol: float = SUPPORT_TOL) -> bool:
    """``{|V f| > tol} subset U_{n != 0} e_n``; the martingale's own invariants are checked first."""
    m.check()
    return not np.any((np.abs(Vf.values) > tol) & ~m.union())


# -- quasi-locality --------------------------------------------------------------------------------

def quasi_locality_integral(Tf: GridFunction, atom: SimpleAtom, r: Sequence[int], p0: float | None = None) -> float:
    """``int |T a|^{p0}`` over ``(I_1^{(r_1)})^c x .. x (I_j^{(r_j)})^c x A``.

    When ``j = D-1`` and ``A`` is a Vilenkin interval ``I_D``, the integral over
    ``(I_1^{(r_1)})^c x .. x (I_{D-1}^{(r_{D-1})})^c x I_D^c`` is added.
    """
    p0 = atom.p0 if p0 is None else p0
    r = tuple(int(x) for x in r)
    if len(r) != atom.j:
        raise ValueError(f"need {atom.j} expansion orders, got {len(r)}")
    if any(x < 1 for x in r):
        raise ValueError("expansion orders must be positive")
    for iv, rr in zip(atom.intervals, r):
        if rr > iv.radix.depth:
            raise ValueError(f"expansion order {rr} exceeds depth {iv.radix.depth}")
    complements = [~iv.expand(rr).mask() for iv, rr in zip(atom.intervals, r)]
    weight = np.abs(Tf.values) ** p0
    total = float(np.mean(weight * atom.region(complements, atom.A)))
    if atom.j == len(atom.radices) - 1 and atom.A_interval() is not None:
        total += float(np.mean(weight * atom.region(complements, ~atom.A)))
    return total


def quasi_locality_profile(Tf: GridFunction, atom: SimpleAtom, p0: float | None = None) -> dict:
    """All integrals for ``r`` in ``{1..N}^j`` (orders beyond the interval level give empty regions)."""
    depths = [iv.level for iv in atom.intervals]
    orders = itertools.product(*(range(1, max(dl, 1) + 1) for dl in depths))
    return {r: quasi_locality_integral(Tf, atom, r, p0) for r in orders}


def fit_decay(profile: dict) -> float | None:
    """Least-squares slope of ``-log2(integral)`` against ``sum(r)``; ``None`` when fewer than two positive values."""
    pts = [(sum(r), v) for r, v in profile.items() if v > 0]
    if len(pts) < 2 or len({x for x, _ in pts}) < 2:
        return None
    x = np.array([p[0] for p in pts], dtype=float)
    y = -np.log2(np.array([p[1] for p in pts]))
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)
