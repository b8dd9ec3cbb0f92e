import csv
import io

import pytest

from vilenkin_rdf.experiments import (
    ExperimentConfig,
    decimal_case_ok,
    max_ratio_drift,
    records_to_csv,
    run_gundy_suite,
    run_partition_fuzz,
    run_plancherel,
    run_rdf_suite,
    run_tensor_suite,
    run_weak_suite,
)


def small(**kw):
    base = dict(trials=3, seed=5, depths=(3,), radix_profiles=("uniform:2",), dims=2, max_rects=5)
    base.update(kw)
    return ExperimentConfig(**base)


def test_single_trial_parseval():
    res = run_rdf_suite(small(trials=1, p_grid=(2.0,)))
    (rec,) = res.records
    assert abs(rec.ratio - 1) <= 1e-10 and res.ok


def test_csv_is_deterministic_and_well_formed():
    a = records_to_csv(run_rdf_suite(small()).records)
    b = records_to_csv(run_rdf_suite(small()).records)
    assert a == b
    lines = a.splitlines()
    assert lines[0].startswith("#") and "PCG64" in lines[0]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert len(rows) == 3 * 3
    assert list(rows[0])[:11] == ["experiment", "seed", "D", "radix", "depth", "p", "n_rects", "lhs", "rhs", "ratio", "wall_ms"]
    assert all(float(r["wall_ms"]) == 0 for r in rows)
    # 17 significant digits reproduce the float exactly
    rec = run_rdf_suite(small()).records[0]
    assert float(rows[0]["lhs"]) == rec.lhs


def test_parallel_order_matches_serial():
    serial = records_to_csv(run_rdf_suite(small(trials=4)).records)
    parallel = records_to_csv(run_rdf_suite(small(trials=4, jobs=2)).records)
    assert serial == parallel


def test_timing_is_opt_in():
    recs = run_rdf_suite(small(trials=1, record_timing=True)).records
    assert all(r.wall_ms > 0 for r in recs)


def test_tensor_suite():
    res = run_tensor_suite(small(dims=1, trials=4, tensor_dims=(2, 3)))
    assert res.ok and res.max_violation < 1e-9
    assert all("gap=0" in r.detail for r in res.records if r.D == 1)


def test_other_suites_have_no_failures():
    assert run_plancherel(small(trials=10)).ok
    assert run_weak_suite(small(p_grid=(0.5, 1.0))).ok
    gundy = run_gundy_suite(small(atoms=20, depths=(4,)))
    assert gundy.ok and len(gundy.records) == 20


def test_partition_fuzz_pins_decimal_case():
    res = run_partition_fuzz(small(fuzz_cases=40))
    assert decimal_case_ok()
    assert res.records[0].detail == "decimal-567-1234"
    assert res.ok and res.checks > 300


def test_drift_helper():
    res = run_rdf_suite(small(trials=5, depths=(3, 4), p_grid=(1.5,)))
    lo, hi, drift = max_ratio_drift(res.records, 1.5, 3, 4)
    assert 0 < lo and 0 < hi and drift >= 0


@pytest.mark.parametrize("kw", [dict(p_grid=(0.0,)), dict(dims=4), dict(trials=1001), dict(depths=(11,))])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        small(**kw)
