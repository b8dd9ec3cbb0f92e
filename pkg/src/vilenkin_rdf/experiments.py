"""Seeded experiment suites and their CSV sink.

Trial ``i`` of a suite draws from ``numpy.random.default_rng(seed + i)``
(PCG64 seeded through ``SeedSequence``), so every trial owns an independent,
reproducible stream and the output does not depend on scheduling.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .atoms import (
    delta_support_leak,
    quasi_locality_profile,
    random_simple_atom,
)
from .martingale import modified_square_function
from .mixed_radix import RadixSequence
from .partition import partition_interval, verify_shift_property
from .pipeline import (
    random_family,
    tensor_amplify,
    verify_main_inequality,
    verify_weak_inequality,
)

RNG_NOTE = "rng=numpy.random.PCG64 via SeedSequence; trial i uses seed base+i"
PARSEVAL_TOL = 1e-10
TENSOR_TOL = 1e-9
SUPPORT_TOL = 1e-12


@dataclass
class ExperimentRecord:
    experiment: str
    seed: int
    D: int
    radix: str
    depth: int
    p: float
    n_rects: int
    lhs: float
    rhs: float
    ratio: float
    wall_ms: float = 0.0
    detail: str = ""


@dataclass
class ExperimentConfig:
    trials: int = 20
    seed: int = 0
    p_grid: tuple[float, ...] = (1.1, 1.5, 2.0)
    depths: tuple[int, ...] = (4,)
    radix_profiles: tuple[str, ...] = ("uniform:2",)
    dims: int = 2
    max_rects: int = 8
    min_rects: int = 1
    coeff_law: str = "gaussian"
    tensor_dims: tuple[int, ...] = (2, 3)
    atoms: int = 500
    p0: float = 1.0
    fuzz_cases: int = 1000
    out: str | None = None
    jobs: int = 1
    record_timing: bool = False

    def __post_init__(self) -> None:
        if self.trials < 0 or self.trials > 10**3:
            raise ValueError("trials must lie in [0, 1000]")
        if any(not p > 0 for p in self.p_grid):
            raise ValueError("every p must be positive")
        if not 1 <= self.dims <= 3:
            raise ValueError("dims must lie in 1..3")
        for profile in self.radix_profiles:
            for depth in self.depths:
                cells = self.radices(profile, depth)[0].size ** self.dims
                if cells > 2**20:
                    raise ValueError(f"{profile} at depth {depth} gives {cells} cells > 2^20")

    def radices(self, profile: str, depth: int) -> tuple[RadixSequence, ...]:
        return (RadixSequence.parse(profile, depth=depth),) * self.dims


@dataclass
class SuiteResult:
    name: str
    records: list[ExperimentRecord] = field(default_factory=list)
    checks: int = 0
    failures: int = 0
    max_violation: float = 0.0
    summary: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def as_dict(self) -> dict:
        return {
            "suite": self.name,
            "checks": self.checks,
            "failures": self.failures,
            "max_violation": self.max_violation,
            "ok": self.ok,
            "summary": self.summary,
        }


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def records_to_csv(records: Iterable[ExperimentRecord]) -> str:
    buf = io.StringIO()
    buf.write(f"# vilenkin_rdf {__version__}; {RNG_NOTE}\n")
    writer = csv.writer(buf, lineterminator="\n")
    names = [f.name for f in dataclasses.fields(ExperimentRecord)]
    writer.writerow(names)
    for rec in records:
        writer.writerow([_fmt(getattr(rec, n)) for n in names])
    return buf.getvalue()


def write_csv(records: Iterable[ExperimentRecord], path: str | Path) -> None:
    Path(path).write_text(records_to_csv(records))


def _map(fn: Callable, tasks: list, jobs: int) -> list:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _clock(timing: bool) -> Callable[[], float]:
    start = time.perf_counter()
    return lambda: (time.perf_counter() - start) * 1e3 if timing else 0.0


# -- main inequality -------------------------------------------------------------------------

def _rdf_trial(task) -> list[ExperimentRecord]:
    name, seed, profile, depth, dims, p_grid, (min_rects, max_rects), law, timing, weak = task
    elapsed = _clock(timing)
    radices = (RadixSequence.parse(profile, depth=depth),) * dims
    family = random_family(seed, radices, max_rects, law, min_rects)
    out = []
    for p in p_grid:
        res = verify_weak_inequality(family, p) if weak else verify_main_inequality(family, p)
        detail = "" if weak or res.supported else "p outside (1,2]"
        out.append(ExperimentRecord(
            name, seed, dims, radices[0].descriptor(), radices[0].depth, float(p), len(family.entries),
            res.lhs, res.rhs, res.ratio, elapsed(), detail,
        ))
    return out


def _inequality_suite(name: str, config: ExperimentConfig, p_grid, weak: bool) -> SuiteResult:
    tasks = [
        (name, config.seed + i, profile, depth, config.dims, tuple(p_grid),
         (config.min_rects, config.max_rects), config.coeff_law, config.record_timing, weak)
        for profile in config.radix_profiles
        for depth in config.depths
        for i in range(config.trials)
    ]
    result = SuiteResult(name)
    for recs in _map(_rdf_trial, tasks, config.jobs):
        result.records.extend(recs)
    maxima: dict = {}
    for rec in result.records:
        key = f"{rec.radix} depth={rec.depth} p={rec.p:g}"
        maxima[key] = max(maxima.get(key, 0.0), rec.ratio)
        result.checks += 1
        if not np.isfinite(rec.ratio):
            result.failures += 1
        elif not weak and rec.p == 2.0:
            dev = abs(rec.ratio - 1.0) if rec.rhs > 0 else 0.0
            result.max_violation = max(result.max_violation, dev)
            if dev > PARSEVAL_TOL:
                result.failures += 1
    result.summary["max_ratio"] = maxima
    return result


def run_rdf_suite(config: ExperimentConfig) -> SuiteResult:
    """Random families against the main inequality over the p grid; p = 2 must give ratio 1."""
    return _inequality_suite("rdf", config, config.p_grid, weak=False)


def run_weak_suite(config: ExperimentConfig) -> SuiteResult:
    p_grid = tuple(p for p in config.p_grid if p <= 1) or (1.0,)
    return _inequality_suite("weak", config, p_grid, weak=True)


def run_plancherel(config: ExperimentConfig) -> SuiteResult:
    """The p = 2 case alone: ``|ratio - 1|`` must stay below 1e-10."""
    result = _inequality_suite("plancherel", config, (2.0,), weak=False)
    return result


# -- tensor amplification ----------------------------------------------------------------------

def _tensor_trial(task) -> list[ExperimentRecord]:
    seed, profile, depth, tensor_dims, p_grid, max_rects, law, timing = task
    elapsed = _clock(timing)
    radix = RadixSequence.parse(profile, depth=depth)
    base = random_family(seed, (radix,), max_rects, law)
    r1s = {p: verify_main_inequality(base, p).ratio for p in p_grid}
    out = []
    for D in (1,) + tuple(d for d in tensor_dims if d != 1):
        fam = base if D == 1 else tensor_amplify(base, D)
        for p in p_grid:
            r1 = r1s[p]
            res = verify_main_inequality(fam, p)
            gap = abs(res.ratio - r1**D)
            out.append(ExperimentRecord(
                "tensor", seed, D, radix.descriptor(), radix.depth, float(p), len(fam.entries),
                res.lhs, res.rhs, res.ratio, elapsed(),
                f"ratio_1={r1:.17g};gap={gap:.17g}",
            ))
    return out


def run_tensor_suite(config: ExperimentConfig) -> SuiteResult:
    """``ratio_D`` against ``ratio_1^D`` for tensor powers of random one-parameter bases."""
    tasks = [
        (config.seed + i, profile, depth, tuple(config.tensor_dims), tuple(config.p_grid),
         config.max_rects, config.coeff_law, config.record_timing)
        for profile in config.radix_profiles
        for depth in config.depths
        for i in range(config.trials)
    ]
    result = SuiteResult("tensor")
    for recs in _map(_tensor_trial, tasks, config.jobs):
        result.records.extend(recs)
    for rec in result.records:
        gap = float(rec.detail.split("gap=")[1])
        result.checks += 1
        result.max_violation = max(result.max_violation, gap)
        if not gap <= TENSOR_TOL:
            result.failures += 1
    return result


# -- atoms ----------------------------------------------------------------------------------------

def _gundy_trial(task) -> ExperimentRecord:
    seed, profile, depth, dims, p0, timing = task
    elapsed = _clock(timing)
    radices = (RadixSequence.parse(profile, depth=depth),) * dims
    atom = random_simple_atom(np.random.default_rng(seed), radices, p0)
    atom.check()
    leak = delta_support_leak(atom)
    profile_ql = quasi_locality_profile(modified_square_function(atom.function), atom)
    ql = max(profile_ql.values(), default=0.0)
    kind = "interval" if atom.A_interval() is not None else "set"
    return ExperimentRecord(
        "gundy", seed, dims, radices[0].descriptor(), radices[0].depth, float(p0), atom.j,
        leak, ql, max(leak, ql), elapsed(),
        f"perm={'-'.join(map(str, atom.perm))};A={kind}",
    )


def run_gundy_suite(config: ExperimentConfig) -> SuiteResult:
    """Random simple atoms: support relations of ``Delta_n a`` and ``S_m`` quasi-locality integrals."""
    tasks = [
        (config.seed + i, profile, depth, config.dims, config.p0, config.record_timing)
        for profile in config.radix_profiles
        for depth in config.depths
        for i in range(config.atoms)
    ]
    result = SuiteResult("gundy")
    result.records = _map(_gundy_trial, tasks, config.jobs)
    for rec in result.records:
        result.checks += 1
        result.max_violation = max(result.max_violation, rec.ratio)
        if rec.ratio > SUPPORT_TOL:
            result.failures += 1
    result.summary["max_leak"] = max((r.lhs for r in result.records), default=0.0)
    result.summary["max_quasi_local"] = max((r.rhs for r in result.records), default=0.0)
    return result


# -- partition fuzz -------------------------------------------------------------------------------

DECIMAL_CASE = {
    "J1": (1230, 1234), "J2": (1200, 1230), "J3": (1000, 1200),
    "~J0": (567, 568), "~J1": (568, 570), "~J2": (570, 600), "~J3": (600, 1000),
}


def check_partition(a: int, b: int, radix: RadixSequence) -> bool:
    part = partition_interval(a, b, radix)
    covered = np.sort(np.concatenate([np.arange(piece.lo, piece.hi) for piece in part]))
    if not np.array_equal(covered, np.arange(a, b)):
        return False
    return all(verify_shift_property(piece, piece.base, radix) for piece in part)


def decimal_case_ok() -> bool:
    part = partition_interval(567, 1234, RadixSequence.uniform(10, 4))
    return {p.label: (p.lo, p.hi) for p in part} == DECIMAL_CASE and part.excluded == "J4"


def run_partition_fuzz(
    config: ExperimentConfig,
    exhaustive: Sequence[Sequence[int]] = ((2, 3, 4), (2, 2, 2)),
    random_profiles: Sequence[Sequence[int]] = ((10, 10, 10, 10), (3, 5, 7, 2, 4), (16, 16, 16), (2,) * 14),
) -> SuiteResult:
    """Exhaustive small-radix intervals, randomized large ones, and the pinned decimal case [567, 1234)."""
    result = SuiteResult("partition")
    elapsed = _clock(config.record_timing)
    ok = decimal_case_ok()
    result.checks += 1
    result.failures += 0 if ok else 1
    result.records.append(ExperimentRecord(
        "partition", config.seed, 1, "uniform:10:4", 4, 0.0, 1, 0.0 if ok else 1.0, 1.0,
        0.0 if ok else 1.0, elapsed(), "decimal-567-1234",
    ))
    for rad in exhaustive:
        radix = RadixSequence(tuple(rad))
        cases = [(a, b) for a in range(radix.size) for b in range(a + 1, radix.size + 1)]
        bad = sum(not check_partition(a, b, radix) for a, b in cases)
        result.checks += len(cases)
        result.failures += bad
        result.records.append(ExperimentRecord(
            "partition", config.seed, 1, radix.descriptor(), radix.depth, 0.0, len(cases),
            float(bad), float(len(cases)), bad / len(cases), elapsed(), "exhaustive",
        ))
    rng = np.random.default_rng(config.seed)
    for rad in random_profiles:
        radix = RadixSequence(tuple(rad))
        bad = 0
        n = max(1, config.fuzz_cases // len(random_profiles))
        for _ in range(n):
            a, b = sorted(int(x) for x in rng.integers(0, radix.size + 1, size=2))
            if a == b:
                b = a + 1 if a < radix.size else a
                a = b - 1
            bad += not check_partition(a, b, radix)
        result.checks += n
        result.failures += bad
        result.records.append(ExperimentRecord(
            "partition", config.seed, 1, radix.descriptor(), radix.depth, 0.0, n,
            float(bad), float(n), bad / n, elapsed(), "random",
        ))
    return result


SUITES = {
    "rdf": run_rdf_suite,
    "weak": run_weak_suite,
    "plancherel": run_plancherel,
    "tensor": run_tensor_suite,
    "gundy": run_gundy_suite,
    "partition": run_partition_fuzz,
}


def max_ratio_drift(records: Sequence[ExperimentRecord], p: float, depth_lo: int, depth_hi: int) -> tuple[float, float, float]:
    """Max ratio at two depths and their relative change."""
    lo = max(r.ratio for r in records if r.p == p and r.depth == depth_lo)
    hi = max(r.ratio for r in records if r.p == p and r.depth == depth_hi)
    return lo, hi, abs(hi - lo) / lo
