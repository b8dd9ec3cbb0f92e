"""Acceptance gate: ten numbered criteria, each with a pinned tolerance and time budget.

Run under pytest (one test per criterion) or directly with
``python tests/test_acceptance.py``; either way one PASS/FAIL line is printed
per criterion.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import sys
import time

import numpy as np
import pytest

from vilenkin_rdf.cli import main as cli_main
from vilenkin_rdf.experiments import (
    ExperimentConfig,
    max_ratio_drift,
    run_gundy_suite,
    run_partition_fuzz,
    run_rdf_suite,
    run_tensor_suite,
)
from vilenkin_rdf.martingale import (
    average_values,
    blocks_at,
    diff,
    levels,
    lower,
    modified_diff,
)
from vilenkin_rdf.mixed_radix import RadixSequence
from vilenkin_rdf.pipeline import apply_G, random_family, rdf_decompose, verify_main_inequality
from vilenkin_rdf.transform import (
    GridFunction,
    forward_values,
    inverse_values,
    naive_forward_values,
)

CRITERIA: dict[int, tuple[str, float, object]] = {}


def criterion(number: int, title: str, budget_s: float):
    def register(fn):
        CRITERIA[number] = (title, budget_s, fn)
        return fn

    return register


def _cli(*argv: str) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(list(argv))
    return code, buf.getvalue()


# -- 1 ------------------------------------------------------------------------------------------

DECIMAL_ROWS = [
    ("J1", "[1230,1234)"), ("J2", "[1200,1230)"), ("J3", "[1000,1200)"),
    ("~J0", "{567}"), ("~J1", "[568,570)"), ("~J2", "[570,600)"), ("~J3", "[600,1000)"),
]


@criterion(1, "interval partition of [567,1234) in base 10", 1.0)
def decimal_partition():
    code, out = _cli("partition", "--a", "567", "--b", "1234", "--radix", "uniform:10:4")
    rows = [tuple(line.split()[:2]) for line in out.splitlines()[1:] if line.split()[0].startswith(("J", "~J"))]
    ok = code == 0 and rows == DECIMAL_ROWS and "excluded: J4" in out
    return ok, f"{len(rows)} pieces"


# -- 2 ------------------------------------------------------------------------------------------

@criterion(2, "exotic interval of [3,6]x{0}, D=2, p=2", 1.0)
def exotic():
    code, out = _cli("exotic", "--rect", "3:6,0:0", "--radix", "uniform:2:6")
    return code == 0 and out.strip() == "{5, 16, 17, 20}", out.strip()


# -- 3 ------------------------------------------------------------------------------------------

TRANSFORM_PROFILES = ["uniform:2:12", "uniform:3:8", "[2,3,4,5,2,3]", "uniform:10:4"]


@criterion(3, "transform roundtrip, Parseval and fast-vs-naive", 30.0)
def transform():
    rng = np.random.default_rng(3)
    worst = {"roundtrip": 0.0, "parseval": 0.0, "naive": 0.0}
    for text in TRANSFORM_PROFILES:
        r = RadixSequence.parse(text)
        batch = rng.standard_normal((r.size, 50)) + 1j * rng.standard_normal((r.size, 50))
        fast = forward_values(batch, (r,))
        back = inverse_values(fast, (r,))
        naive = naive_forward_values(batch, r)
        norms = np.abs(batch).max(axis=0)
        worst["roundtrip"] = max(worst["roundtrip"], float((np.abs(back - batch).max(axis=0) / norms).max()))
        energy = np.mean(np.abs(batch) ** 2, axis=0)
        defect = np.abs(np.sum(np.abs(fast) ** 2, axis=0) - energy) / energy
        worst["parseval"] = max(worst["parseval"], float(defect.max()))
        worst["naive"] = max(worst["naive"], float(np.abs(fast - naive).max()))
    ok = worst["roundtrip"] <= 1e-12 and worst["parseval"] <= 1e-12 and worst["naive"] <= 1e-10
    return ok, ", ".join(f"{k}={v:.1e}" for k, v in worst.items())


# -- 4 ------------------------------------------------------------------------------------------

@criterion(4, "partition shift property, exhaustive plus 1000 random", 30.0)
def partition_shift():
    cfg = ExperimentConfig(trials=0, seed=4, fuzz_cases=1000)
    res = run_partition_fuzz(cfg, exhaustive=((2, 3, 4), (2, 2, 2)))
    return res.ok, f"checks={res.checks} failures={res.failures}"


# -- 5 ------------------------------------------------------------------------------------------

@criterion(5, "main inequality is an identity at p=2", 60.0)
def parseval():
    worst = 0.0
    for D, radix in ((1, RadixSequence.uniform(2, 8)), (2, RadixSequence((2, 3, 2, 3)))):
        for seed in range(100):
            res = verify_main_inequality(random_family(seed, (radix,) * D), 2.0)
            worst = max(worst, abs(res.ratio - 1))
    return worst <= 1e-10, f"max |ratio-1|={worst:.1e}"


# -- 6 ------------------------------------------------------------------------------------------

RECON_PROFILES = {
    1: RadixSequence((2, 3, 4, 5, 2, 3)),
    2: RadixSequence.uniform(2, 5),
    3: RadixSequence((2, 3, 2)),
}


@criterion(6, "reconstruction apply_G(rdf_decompose(F)) = sum f_k", 120.0)
def reconstruction():
    worst = 0.0
    for D, radix in RECON_PROFILES.items():
        for seed in range(100):
            fam = random_family(seed, (radix,) * D, 8)
            err = np.abs(apply_G(rdf_decompose(fam), check=False).values - fam.total().values).max()
            worst = max(worst, float(err))
    return worst <= 1e-10, f"max cell error={worst:.1e}"


# -- 7 ------------------------------------------------------------------------------------------

STABILITY = [("uniform:2", 4), ("uniform:3", 2)]


@criterion(7, "Monte-Carlo max ratio stable across depth d -> d+1", 300.0)
def stability():
    ok, parts = True, []
    for profile, d in STABILITY:
        cfg = ExperimentConfig(
            trials=200, seed=7, p_grid=(1.1, 1.5), depths=(d, d + 1), radix_profiles=(profile,), dims=2,
            min_rects=2,  # a lone rectangle has ratio exactly 1 and would pin the maximum
        )
        records = run_rdf_suite(cfg).records
        for p in cfg.p_grid:
            lo, hi, drift = max_ratio_drift(records, p, d, d + 1)
            ok = ok and drift < 0.10 and max(lo, hi) <= 10
            parts.append(f"{profile} p={p}: {lo:.4f}->{hi:.4f}")
    return ok, "; ".join(parts)


# -- 8 ------------------------------------------------------------------------------------------

@criterion(8, "500 atoms: Delta_n support and S_m quasi-locality", 60.0)
def atoms():
    cfg = ExperimentConfig(trials=0, seed=8, atoms=500, depths=(6,), radix_profiles=("uniform:2",), dims=2)
    res = run_gundy_suite(cfg)
    ok = res.ok and res.summary["max_leak"] <= 1e-12 and res.summary["max_quasi_local"] <= 1e-12
    return ok, f"leak={res.summary['max_leak']:.1e} quasi-local={res.summary['max_quasi_local']:.1e}"


# -- 9 ------------------------------------------------------------------------------------------

@criterion(9, "modified differences sum to Delta_n and are atom-orthogonal", 30.0)
def block_identities():
    rng = np.random.default_rng(9)
    r = RadixSequence((2, 3, 4, 5))
    worst_sum = worst_inner = 0.0
    for radices in ((r,), (r, r)):
        for _ in range(5):
            shape = tuple(x.size for x in radices)
            f = GridFunction(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), radices)
            for n in levels(radices):
                if not all(n):
                    continue
                pieces = [modified_diff(f, b).values for b in blocks_at(n, radices)]
                worst_sum = max(worst_sum, float(np.abs(sum(pieces) - diff(f, n).values).max()))
                for a, b in itertools.combinations(pieces, 2):
                    # mean of a * conj(b) over every atom of F_{n-1}
                    local = average_values(a * np.conj(b), lower(n), radices)
                    worst_inner = max(worst_inner, float(np.abs(local).max()))
    ok = worst_sum <= 1e-12 and worst_inner <= 1e-12
    return ok, f"sum error={worst_sum:.1e} inner={worst_inner:.1e}"


# -- 10 -----------------------------------------------------------------------------------------

@criterion(10, "tensor amplification ratio_D = ratio_1^D", 60.0)
def tensor():
    cfg = ExperimentConfig(
        trials=50, seed=10, p_grid=(1.1, 1.5, 2.0), depths=(4,), radix_profiles=("uniform:2",),
        dims=1, tensor_dims=(2, 3),
    )
    res = run_tensor_suite(cfg)
    return res.ok and res.max_violation <= 1e-9, f"max gap={res.max_violation:.1e}"


# -- driver ---------------------------------------------------------------------------------------

def evaluate(number: int) -> tuple[bool, str]:
    title, budget, fn = CRITERIA[number]
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < budget
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail}; {elapsed:.2f}s / {budget:g}s)"
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
