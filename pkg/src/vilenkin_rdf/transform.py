"""Rademacher and Vilenkin functions and the multi-parameter Vilenkin-Fourier transform.

Functions on ``[0,1)^D`` are stored by their values on the finest Vilenkin
grid; grid index ``j_d`` stands for the point ``x_d = j_d / P^{(d)}_{N_d}``.
The coefficient array has the same shape, entry ``l`` holding ``<f, v_l>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .mixed_radix import (
    CapacityError,
    RadixSequence,
    group_add_array,
    index_digits,
    point_digits,
)

SPECTRAL_TOL = 1e-12


def _as_radices(radices) -> tuple[RadixSequence, ...]:
    if isinstance(radices, RadixSequence):
        return (radices,)
    return tuple(radices)


def grid_shape(radices: Sequence[RadixSequence]) -> tuple[int, ...]:
    return tuple(r.size for r in radices)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex values of a function on the finest Vilenkin grid of ``[0,1)^D``."""

    values: np.ndarray
    radices: tuple[RadixSequence, ...]

    def __post_init__(self) -> None:
        radices = _as_radices(self.radices)
        values = np.asarray(self.values, dtype=complex)
        if values.shape != grid_shape(radices):
            raise ValueError(f"shape {values.shape} does not match grid {grid_shape(radices)}")
        object.__setattr__(self, "radices", radices)
        object.__setattr__(self, "values", values)

    @property
    def dims(self) -> int:
        return len(self.radices)

    @classmethod
    def zeros(cls, radices) -> "GridFunction":
        radices = _as_radices(radices)
        return cls(np.zeros(grid_shape(radices), dtype=complex), radices)

    @classmethod
    def constant(cls, c: complex, radices) -> "GridFunction":
        radices = _as_radices(radices)
        return cls(np.full(grid_shape(radices), c, dtype=complex), radices)

    def like(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(values, self.radices)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return self.like(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self.like(self.values - other.values)

    def __mul__(self, other) -> "GridFunction":
        if isinstance(other, GridFunction):
            return self.like(self.values * other.values)
        return self.like(self.values * other)

    __rmul__ = __mul__

    def conj(self) -> "GridFunction":
        return self.like(np.conj(self.values))


@dataclass(frozen=True, eq=False)
class SpectrumCoeffs:
    """Vilenkin-Fourier coefficients ``c_l`` on the truncated index box."""

    values: np.ndarray
    radices: tuple[RadixSequence, ...]

    def __post_init__(self) -> None:
        radices = _as_radices(self.radices)
        values = np.asarray(self.values, dtype=complex)
        if values.shape != grid_shape(radices):
            raise ValueError(f"shape {values.shape} does not match index box {grid_shape(radices)}")
        object.__setattr__(self, "radices", radices)
        object.__setattr__(self, "values", values)

    @property
    def dims(self) -> int:
        return len(self.radices)


# -- point evaluation -----------------------------------------------------------

def rademacher_eval(k: int, grid_index, radix: RadixSequence):
    """``r_k(x) = exp(2 pi i x_k / p_k)`` at ``x = grid_index / P_N``."""
    if not 1 <= k <= radix.depth:
        raise ValueError(f"Rademacher index {k} outside 1..{radix.depth}")
    x = point_digits(grid_index, radix)[..., k - 1]
    out = np.exp(2j * np.pi * x / radix.p(k))
    return complex(out) if np.ndim(out) == 0 else out


def vilenkin_eval(n: int, grid_index, radix: RadixSequence):
    """``v_n(x) = prod_k r_k(x)^{n_k}``, built from the Rademacher factors."""
    radix.check_index(n)
    nd = index_digits(n, radix)
    out = np.ones(np.shape(grid_index), dtype=complex)
    for k in range(1, radix.depth + 1):
        if nd[k - 1]:
            out = out * rademacher_eval(k, grid_index, radix) ** int(nd[k - 1])
    return complex(out) if np.ndim(out) == 0 else out


def vilenkin_row(n: int, radix: RadixSequence) -> np.ndarray:
    """``v_n`` on the whole one-parameter grid, via the digit phase (exact roots of unity)."""
    radix.check_index(n)
    x = point_digits(np.arange(radix.size), radix)
    nd = index_digits(n, radix)
    # phase as an exact fraction of a full turn, reduced mod 1 before exponentiating
    num = np.zeros(radix.size, dtype=np.int64)
    P = radix.size
    for k, p in enumerate(radix.radices):
        num = (num + x[:, k] * int(nd[k]) * (P // p)) % P
    return np.exp(2j * np.pi * num / P)


def vilenkin_grid(n: Sequence[int], radices) -> GridFunction:
    """The tensor character ``v_n(x) = prod_d v^{(d)}_{n_d}(x_d)`` on the grid."""
    radices = _as_radices(radices)
    n = tuple(int(v) for v in n)
    if len(n) != len(radices):
        raise ValueError("multi-index dimension mismatch")
    out = np.ones((), dtype=complex)
    for d, (nd, r) in enumerate(zip(n, radices)):
        row = vilenkin_row(nd, r)
        shape = [1] * len(radices)
        shape[d] = r.size
        out = out * row.reshape(shape)
    return GridFunction(np.broadcast_to(out, grid_shape(radices)).copy(), radices)


# -- fast transform -------------------------------------------------------------

def _kernel(p: int, sign: int) -> np.ndarray:
    k = np.arange(p)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / p)


def _forward_axis(x: np.ndarray, axis: int, radix: RadixSequence) -> np.ndarray:
    N = radix.depth
    x = np.moveaxis(x, axis, 0)
    rest = x.shape[1:]
    # axis k of the reshaped array holds the point digit x_{k+1}
    x = x.reshape(radix.radices + rest)
    for k, p in enumerate(radix.radices):
        x = np.moveaxis(np.tensordot(_kernel(p, -1) / p, x, axes=([1], [k])), 0, k)
    # axis k now holds the index digit n_{k+1}; least significant first -> reverse for C order
    x = np.transpose(x, tuple(reversed(range(N))) + tuple(range(N, N + len(rest))))
    x = x.reshape((radix.size,) + rest)
    return np.moveaxis(x, 0, axis)


def _inverse_axis(c: np.ndarray, axis: int, radix: RadixSequence) -> np.ndarray:
    N = radix.depth
    c = np.moveaxis(c, axis, 0)
    rest = c.shape[1:]
    c = c.reshape(tuple(reversed(radix.radices)) + rest)
    c = np.transpose(c, tuple(reversed(range(N))) + tuple(range(N, N + len(rest))))
    for k, p in enumerate(radix.radices):
        c = np.moveaxis(np.tensordot(_kernel(p, 1), c, axes=([1], [k])), 0, k)
    c = c.reshape((radix.size,) + rest)
    return np.moveaxis(c, 0, axis)


def forward_values(values: np.ndarray, radices: Sequence[RadixSequence]) -> np.ndarray:
    """Coefficient array of a grid array (leading axes are the grid, extra trailing axes batch)."""
    out = np.asarray(values, dtype=complex)
    for d, r in enumerate(radices):
        out = _forward_axis(out, d, r)
    return out


def inverse_values(coeffs: np.ndarray, radices: Sequence[RadixSequence]) -> np.ndarray:
    out = np.asarray(coeffs, dtype=complex)
    for d, r in enumerate(radices):
        out = _inverse_axis(out, d, r)
    return out


def forward_transform(f: GridFunction) -> SpectrumCoeffs:
    """``c_l = mean_j f(j) conj(v_l(j))``, one dense ``p_k``-point stage per digit."""
    if not isinstance(f, GridFunction):
        raise TypeError("forward_transform expects a GridFunction")
    return SpectrumCoeffs(forward_values(f.values, f.radices), f.radices)


def inverse_transform(c: SpectrumCoeffs) -> GridFunction:
    if not isinstance(c, SpectrumCoeffs):
        raise TypeError("inverse_transform expects SpectrumCoeffs")
    return GridFunction(inverse_values(c.values, c.radices), c.radices)


# -- naive oracle ---------------------------------------------------------------

def naive_matrix(radix: RadixSequence, rows: slice | None = None) -> np.ndarray:
    """Matrix ``M[l, j] = v_l(j)`` evaluated straight from the digit definitions."""
    ls = np.arange(radix.size)[rows] if rows is not None else np.arange(radix.size)
    ld = index_digits(ls, radix)
    xd = point_digits(np.arange(radix.size), radix)
    P = radix.size
    # phase sum_k l_k x_k / p_k as an integer multiple of 1/P_N
    num = np.zeros((len(ls), P), dtype=np.int64)
    for k, p in enumerate(radix.radices):
        num += np.outer(ld[:, k] * (P // p), xd[:, k])
        num %= P
    roots = np.exp(2j * np.pi * np.arange(P) / P)
    return roots[num]


def naive_forward_values(values: np.ndarray, radix: RadixSequence, chunk: int = 1024) -> np.ndarray:
    """Quadratic one-parameter transform; ``values`` may carry a trailing batch axis."""
    values = np.asarray(values, dtype=complex)
    out = np.empty(values.shape, dtype=complex)
    for start in range(0, radix.size, chunk):
        sl = slice(start, min(start + chunk, radix.size))
        out[sl] = np.conj(naive_matrix(radix, sl)) @ values / radix.size
    return out


def naive_forward_transform(f: GridFunction) -> SpectrumCoeffs:
    out = f.values
    for d, r in enumerate(f.radices):
        moved = np.moveaxis(out, d, 0)
        shape = moved.shape
        res = naive_forward_values(moved.reshape(shape[0], -1), r).reshape(shape)
        out = np.moveaxis(res, 0, d)
    return SpectrumCoeffs(out, f.radices)


# -- spectral operations ----------------------------------------------------------

def spectral_project(f: GridFunction, rect) -> GridFunction:
    """Keep the coefficients inside ``rect`` (a Rectangle or per-dim ``(lo, hi)`` pairs)."""
    c = forward_values(f.values, f.radices)
    return f.like(inverse_values(c * rect_mask(rect, f.radices), f.radices))


def rect_mask(rect, radices: Sequence[RadixSequence]) -> np.ndarray:
    bounds = getattr(rect, "bounds", rect)
    if len(bounds) != len(radices):
        raise ValueError("rectangle dimension mismatch")
    mask = np.ones((), dtype=bool)
    for d, ((lo, hi), r) in enumerate(zip(bounds, radices)):
        if lo < 0 or hi > r.size:
            raise CapacityError(f"rectangle side [{lo},{hi}) exceeds capacity {r.size}")
        axis = np.zeros(r.size, dtype=bool)
        axis[lo:hi] = True
        shape = [1] * len(radices)
        shape[d] = r.size
        mask = mask & axis.reshape(shape)
    return np.broadcast_to(mask, grid_shape(radices))


def spectrum_of(f: GridFunction, tol: float = SPECTRAL_TOL) -> set[tuple[int, ...]]:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    c = forward_values(f.values, f.radices)
    return {tuple(int(i) for i in idx) for idx in np.argwhere(np.abs(c) > tol)}


def shift_spectrum(c: np.ndarray, a: Sequence[int], radices: Sequence[RadixSequence]) -> np.ndarray:
    """Coefficients of ``v_a * f`` from those of ``f``: entry ``a (+) m`` receives ``c_m``."""
    out = np.asarray(c)
    for d, (ad, r) in enumerate(zip(a, radices)):
        if ad == 0:
            continue
        target = group_add_array(np.arange(r.size), ad, r)
        moved = np.empty_like(np.moveaxis(out, d, 0))
        moved[target] = np.moveaxis(out, d, 0)
        out = np.moveaxis(moved, 0, d)
    return out


# -- file format ------------------------------------------------------------------

def to_json(obj: GridFunction | SpectrumCoeffs) -> dict:
    kind = "spectrum" if isinstance(obj, SpectrumCoeffs) else "grid"
    flat = obj.values.reshape(-1)
    return {
        "kind": kind,
        "dims": obj.dims,
        "radices": [list(r.radices) for r in obj.radices],
        "depth": [r.depth for r in obj.radices],
        "values": [[float(z.real), float(z.imag)] for z in flat],
    }


def from_json(doc: dict) -> GridFunction | SpectrumCoeffs:
    radices = tuple(RadixSequence(tuple(r)) for r in doc["radices"])
    if doc.get("dims", len(radices)) != len(radices):
        raise ValueError("dims does not match radices")
    for r, depth in zip(radices, doc.get("depth", [r.depth for r in radices])):
        if r.depth != depth:
            raise ValueError("depth does not match radices")
    pairs = np.asarray(doc["values"], dtype=float).reshape(-1, 2)
    values = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(grid_shape(radices))
    cls = SpectrumCoeffs if doc.get("kind") == "spectrum" else GridFunction
    return cls(values, radices)


def save(obj: GridFunction | SpectrumCoeffs, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_json(obj)))


def load(path: str | Path) -> GridFunction | SpectrumCoeffs:
    return from_json(json.loads(Path(path).read_text()))
