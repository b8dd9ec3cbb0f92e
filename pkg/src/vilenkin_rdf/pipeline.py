"""The auxiliary operator G, the corner decomposition of spectral families, and
numerical evaluation of both sides of the Rubio de Francia inequality."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .martingale import (
    DeltaBlock,
    block_range,
    hardy_norm,
    lp_l2_norm,
    lp_norm,
    modified_diff_values,
)
from .mixed_radix import CapacityError, RadixSequence, group_add_array
from .partition import Rectangle, partition_rectangle
from .transform import (
    SPECTRAL_TOL,
    GridFunction,
    forward_values,
    grid_shape,
    inverse_values,
    rect_mask,
    vilenkin_grid,
)

MAX_CELLS = 2**20


@dataclass
class SpectralFamily:
    """Functions ``f_k`` with spectra inside pairwise disjoint rectangles ``I_k``."""

    radices: tuple[RadixSequence, ...]
    entries: list[tuple[Rectangle, GridFunction]] = field(default_factory=list)

    @property
    def dims(self) -> int:
        return len(self.radices)

    @property
    def rects(self) -> list[Rectangle]:
        return [r for r, _ in self.entries]

    @property
    def functions(self) -> list[GridFunction]:
        return [f for _, f in self.entries]

    def total(self) -> GridFunction:
        out = GridFunction.zeros(self.radices)
        for _, f in self.entries:
            out = out + f
        return out

    def validate(self, tol: float = 1e-10) -> None:
        """Raise ``ValueError`` if rectangles overlap or a spectrum leaks out of its rectangle."""
        rects = self.rects
        for i, j in itertools.combinations(range(len(rects)), 2):
            if rects[i].intersects(rects[j]):
                raise ValueError(f"rectangles {i} and {j} intersect")
        for k, (rect, f) in enumerate(self.entries):
            if f.radices != self.radices:
                raise ValueError(f"function {k} lives on a different grid")
            leak = spectral_leak(f, rect)
            if leak > tol:
                raise ValueError(f"function {k} has spectral mass {leak:.3e} outside its rectangle")


def spectral_leak(f: GridFunction, rect: Rectangle) -> float:
    c = forward_values(f.values, f.radices)
    outside = np.abs(c[~rect_mask(rect, f.radices)])
    return float(outside.max()) if outside.size else 0.0


# -- operator G ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GEntry:
    h: GridFunction
    shift: tuple[int, ...]
    level: tuple[int, ...]
    lam: tuple[tuple[int, ...], ...]
    k: int = 0
    corner: tuple[str, ...] = ()


@dataclass
class GInput:
    radices: tuple[RadixSequence, ...]
    entries: list[GEntry] = field(default_factory=list)

    def block_cover(self) -> np.ndarray:
        """How many shifted blocks ``a (+) delta_{n,l}`` cover each index."""
        count = np.zeros(grid_shape(self.radices), dtype=np.int64)
        for e in self.entries:
            for l in e.lam:
                axes = []
                for nd, ld, ad, r in zip(e.level, l, e.shift, self.radices):
                    lo, hi = block_range(nd, ld, r)
                    axes.append(group_add_array(np.arange(lo, hi), ad, r))
                count[np.ix_(*axes)] += 1
        return count

    def check(self) -> None:
        for e in self.entries:
            if e.h.radices != self.radices:
                raise ValueError("entry lives on a different grid")
            if len(e.shift) != len(self.radices) or len(e.level) != len(self.radices):
                raise ValueError("entry dimension mismatch")
            for ad, r in zip(e.shift, self.radices):
                if not 0 <= ad < r.size:
                    raise CapacityError(f"shift {ad} outside [0, {r.size})")
        if np.any(self.block_cover() > 1):
            raise ValueError("shifted blocks a (+) delta_{n,l} are not pairwise disjoint")


def apply_G(inp: GInput, check: bool = True) -> GridFunction:
    """``G h = sum_{(k,n), l in Lambda_{k,n}} v_{a_{k,n}} * Delta_{n,l} h_{k,n}``."""
    if check:
        inp.check()
    out = np.zeros(grid_shape(inp.radices), dtype=complex)
    for e in inp.entries:
        acc = np.zeros_like(out)
        for l in e.lam:
            acc += modified_diff_values(e.h.values, DeltaBlock(e.level, l), inp.radices)
        out += vilenkin_grid(e.shift, inp.radices).values * acc
    return GridFunction(out, inp.radices)


def rdf_decompose(family: SpectralFamily, tol: float = 1e-10) -> GInput:
    """Split each ``f_k`` over the pieces of its rectangle and demodulate each piece by its base vertex.

    Pieces carrying no spectrum (relative floor ``SPECTRAL_TOL``) are skipped.
    """
    radices = family.radices
    entries = []
    for k, (rect, f) in enumerate(family.entries):
        c = forward_values(f.values, radices)
        leak = np.abs(c[~rect_mask(rect, radices)])
        if leak.size and leak.max() > tol:
            raise ValueError(f"function {k} leaks spectral mass {leak.max():.3e} outside its rectangle")
        floor = SPECTRAL_TOL * max(1.0, float(np.abs(c).max(initial=0.0)))
        for piece in partition_rectangle(rect, radices):
            c_piece = c * rect_mask(piece.rect, radices)
            if not np.abs(c_piece).max(initial=0.0) > floor:
                continue  # no spectrum on this piece; it would only add a zero term
            f_piece = inverse_values(c_piece, radices)
            g = np.conj(vilenkin_grid(piece.base, radices).values) * f_piece
            entries.append(GEntry(GridFunction(g, radices), piece.base, piece.level, piece.lam, k, piece.corner))
    return GInput(radices, entries)


def corner_square_sums(inp: GInput) -> dict[tuple[int, tuple[str, ...]], np.ndarray]:
    """``sum_j sum_{l in Lambda} |Delta_{j,l} g_{k,j}|^2`` for every (k, corner) class."""
    out: dict[tuple[int, tuple[str, ...]], np.ndarray] = {}
    for e in inp.entries:
        key = (e.k, e.corner)
        acc = out.setdefault(key, np.zeros(grid_shape(inp.radices)))
        for l in e.lam:
            acc += np.abs(modified_diff_values(e.h.values, DeltaBlock(e.level, l), inp.radices)) ** 2
    return out


# -- inequality sides ----------------------------------------------------------------------

class InequalityResult(NamedTuple):
    lhs: float
    rhs: float
    ratio: float
    supported: bool = True


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == 0:
        return 0.0 if lhs == 0 else float("inf")
    return lhs / rhs


def verify_main_inequality(family: SpectralFamily, p: float) -> InequalityResult:
    """Both sides of ``||sum f_k||_p <= C ||(sum |f_k|^2)^{1/2}||_p``.

    ``supported`` is False outside ``1 < p <= 2``, the range the inequality covers.
    """
    if not p > 0:
        raise ValueError(f"invalid exponent {p}")
    if not family.entries:
        return InequalityResult(0.0, 0.0, 0.0, 1 < p <= 2)
    lhs = lp_norm(family.total(), p)
    rhs = lp_l2_norm(family.functions, p)
    return InequalityResult(lhs, rhs, _ratio(lhs, rhs), 1 < p <= 2)


def verify_weak_inequality(family: SpectralFamily, p: float) -> InequalityResult:
    """``||sum f_k||_p`` against ``sum_a ||{conj(v_{tau_{a,k}}) f_k}_k||_{H^p(l^2)}`` for ``p <= 1``.

    ``tau_{a,k}`` runs over the ``2^D`` corners of ``I_k`` taken as index sets,
    i.e. each side contributes ``lo`` or ``hi - 1``.
    """
    if not 0 < p <= 1:
        raise ValueError(f"weak inequality needs 0 < p <= 1, got {p}")
    if not family.entries:
        return InequalityResult(0.0, 0.0, 0.0)
    lhs = lp_norm(family.total(), p)
    rhs = 0.0
    for a in range(2 ** family.dims):
        demod = [
            f * np.conj(vilenkin_grid(rect.inclusive_corners()[a], family.radices).values)
            for rect, f in family.entries
        ]
        rhs += hardy_norm(demod, p)
    return InequalityResult(lhs, rhs, _ratio(lhs, rhs))


# -- random families and tensor products --------------------------------------------------------

def random_rectangles(
    rng: np.random.Generator, radices: Sequence[RadixSequence], max_rects: int, min_rects: int = 1
) -> list[Rectangle]:
    """Recursive axis-aligned splitting of the full index box, stopped at a random leaf count."""
    if not 1 <= min_rects <= max_rects:
        raise ValueError("need 1 <= min_rects <= max_rects")
    leaves = [tuple((0, r.size) for r in radices)]
    target = int(rng.integers(min_rects, max_rects + 1))
    while len(leaves) < target:
        splittable = [i for i, b in enumerate(leaves) if any(hi - lo > 1 for lo, hi in b)]
        if not splittable:
            break
        bounds = list(leaves.pop(int(rng.choice(splittable))))
        d = int(rng.choice([d for d, (lo, hi) in enumerate(bounds) if hi - lo > 1]))
        lo, hi = bounds[d]
        cut = int(rng.integers(lo + 1, hi))
        left, right = list(bounds), list(bounds)
        left[d], right[d] = (lo, cut), (cut, hi)
        leaves += [tuple(left), tuple(right)]
    return [Rectangle(b) for b in leaves]


def random_coefficients(rng: np.random.Generator, shape, law: str = "gaussian") -> np.ndarray:
    if law == "gaussian":
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    if law == "rademacher":
        return rng.choice([-1.0, 1.0], size=shape).astype(complex)
    raise ValueError(f"unknown coefficient law {law!r}")


def random_family(
    seed,
    radices: Sequence[RadixSequence],
    max_rects: int = 8,
    coeff_law: str = "gaussian",
    min_rects: int = 1,
) -> SpectralFamily:
    """Deterministic random family: disjoint rectangles and i.i.d. coefficients inside each."""
    radices = tuple(radices)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rects = random_rectangles(rng, radices, max_rects, min_rects)
    coeffs = random_coefficients(rng, grid_shape(radices), coeff_law)
    entries = [
        (rect, GridFunction(inverse_values(coeffs * rect_mask(rect, radices), radices), radices))
        for rect in rects
    ]
    return SpectralFamily(radices, entries)


def tensor_amplify(family_1d: SpectralFamily, D: int) -> SpectralFamily:
    """The ``N^D`` products ``f_k1(x_1) ... f_kD(x_D)`` with product rectangles."""
    if family_1d.dims != 1:
        raise ValueError("base family must be one-parameter")
    if D < 1:
        raise ValueError("D must be >= 1")
    radix = family_1d.radices[0]
    if radix.size**D > MAX_CELLS:
        raise CapacityError(f"{radix.size}^{D} cells exceeds the limit {MAX_CELLS}")
    radices = (radix,) * D
    entries = []
    for combo in itertools.product(family_1d.entries, repeat=D):
        values = np.ones((), dtype=complex)
        for d, (_, f) in enumerate(combo):
            shape = [1] * D
            shape[d] = radix.size
            values = values * f.values.reshape(shape)
        rect = Rectangle(tuple(r.bounds[0] for r, _ in combo))
        entries.append((rect, GridFunction(np.broadcast_to(values, grid_shape(radices)).copy(), radices)))
    return SpectralFamily(radices, entries)


# -- family file format ------------------------------------------------------------------

def family_to_json(family: SpectralFamily, tol: float = 1e-12) -> list:
    doc = []
    for rect, f in family.entries:
        c = forward_values(f.values, family.radices)
        coeffs = [
            [[int(i) for i in idx], float(c[tuple(idx)].real), float(c[tuple(idx)].imag)]
            for idx in np.argwhere(np.abs(c) > tol)
        ]
        doc.append({"rect": [[lo, hi] for lo, hi in rect.bounds], "coeffs": coeffs})
    return doc


def family_from_json(doc: list, radices: Sequence[RadixSequence]) -> SpectralFamily:
    radices = tuple(radices)
    entries = []
    for item in doc:
        rect = Rectangle(tuple(tuple(side) for side in item["rect"]))
        c = np.zeros(grid_shape(radices), dtype=complex)
        for idx, re, im in item["coeffs"]:
            c[tuple(idx)] = complex(re, im)
        entries.append((rect, GridFunction(inverse_values(c, radices), radices)))
    return SpectralFamily(radices, entries)


def save_family(family: SpectralFamily, path: str | Path) -> None:
    Path(path).write_text(json.dumps(family_to_json(family)))


def load_family(path: str | Path, radices: Sequence[RadixSequence]) -> SpectralFamily:
    return family_from_json(json.loads(Path(path).read_text()), radices)
