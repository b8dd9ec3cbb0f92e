"""Command line entry point (``vilenkin-rdf`` or ``python -m vilenkin_rdf``)."""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

import numpy as np

from . import __version__
from .experiments import (
    ExperimentConfig,
    SuiteResult,
    check_partition,
    run_gundy_suite,
    run_partition_fuzz,
    run_plancherel,
    run_rdf_suite,
    run_tensor_suite,
    run_weak_suite,
    write_csv,
)
from .isomorphism import InterleavingMap, exotic_interval
from .mixed_radix import RadixSequence
from .partition import Rectangle, partition_interval, verify_shift_property
from .pipeline import load_family, verify_main_inequality, verify_weak_inequality
from .transform import (
    GridFunction,
    SpectrumCoeffs,
    forward_transform,
    inverse_transform,
    load,
    naive_forward_transform,
    save,
)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v)


def _grid_radices(args) -> tuple[RadixSequence, ...]:
    """One radix per dimension; a single ``--radix`` is reused for every dimension."""
    texts = args.radix or ["uniform:2:6"]
    depths = args.depth or (None,)
    if len(texts) == 1:
        texts = texts * args.dims
    if len(texts) != args.dims:
        raise SystemExit(f"expected 1 or {args.dims} --radix values, got {len(texts)}")
    return tuple(RadixSequence.parse(t, depth=depths[0]) for t in texts)


def _config(args, **overrides) -> ExperimentConfig:
    profiles = tuple(args.radix or ["uniform:2"])
    depths = args.depth
    if depths is None:
        try:
            depths = (RadixSequence.parse(profiles[0]).depth,)
        except ValueError:
            depths = (6,)
    kw = dict(
        trials=args.trials,
        seed=args.seed,
        p_grid=args.p,
        depths=tuple(depths),
        radix_profiles=profiles,
        dims=args.dims,
        max_rects=getattr(args, "max_rects", 8),
        min_rects=getattr(args, "min_rects", 1),
        coeff_law=getattr(args, "law", "gaussian"),
        out=args.out,
        jobs=args.jobs,
        record_timing=args.timing,
    )
    kw.update(overrides)
    return ExperimentConfig(**kw)


def _emit(args, result: SuiteResult, lines: Sequence[str] = ()) -> int:
    if args.out:
        write_csv(result.records, args.out)
    if args.json:
        print(json.dumps(result.as_dict(), indent=2, sort_keys=True, default=str))
    else:
        for line in lines:
            print(line)
        status = "PASS" if result.ok else "FAIL"
        print(f"{result.name}: {status} checks={result.checks} failures={result.failures} "
              f"max_violation={result.max_violation:.3e}")
    return 0 if result.ok else 1


# -- subcommands --------------------------------------------------------------------------------

def cmd_transform(args) -> int:
    if args.input:
        obj = load(args.input)
    else:
        radices = _grid_radices(args)
        rng = np.random.default_rng(args.seed)
        shape = tuple(r.size for r in radices)
        obj = GridFunction(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), radices)
    if isinstance(obj, SpectrumCoeffs):
        out = inverse_transform(obj)
    else:
        out = forward_transform(obj)
    summary = {"input": type(obj).__name__, "output": type(out).__name__,
               "shape": list(out.values.shape)}
    ok = True
    if args.check:
        back = forward_transform(out) if isinstance(out, GridFunction) else inverse_transform(out)
        scale = max(np.abs(obj.values).max(), 1e-300)
        summary["roundtrip_error"] = float(np.abs(back.values - obj.values).max() / scale)
        ok = summary["roundtrip_error"] <= 1e-12
        if isinstance(obj, GridFunction) and obj.values.size <= 4096:
            naive = naive_forward_transform(obj)
            summary["naive_error"] = float(np.abs(naive.values - out.values).max())
            ok = ok and summary["naive_error"] <= 1e-10
    if args.output:
        save(out, args.output)
    summary["ok"] = ok
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        for k, v in summary.items():
            print(f"{k}: {v}")
    return 0 if ok else 1


def cmd_partition(args) -> int:
    if args.fuzz:
        cfg = ExperimentConfig(trials=0, seed=args.seed, out=args.out, record_timing=args.timing)
        return _emit(args, run_partition_fuzz(cfg))
    if args.a is None or args.b is None:
        raise SystemExit("partition needs --a and --b (or --fuzz)")
    radix = RadixSequence.parse((args.radix or ["uniform:10:4"])[0], depth=(args.depth or (None,))[0])
    part = partition_interval(args.a, args.b, radix)
    rows = []
    ok = True
    for piece in part:
        row = {"piece": piece.label, "lo": piece.lo, "hi": piece.hi, "base": piece.base,
               "lam": list(piece.lam)}
        if args.verify:
            row["shift_ok"] = verify_shift_property(piece, piece.base, radix)
            ok = ok and row["shift_ok"]
        rows.append(row)
    if args.verify:
        ok = ok and check_partition(args.a, args.b, radix)
    if args.json:
        print(json.dumps({"a": part.a, "b": part.b, "t": part.t, "pieces": rows,
                          "empty": list(part.empty), "excluded": part.excluded, "ok": ok}, indent=2))
    else:
        print(f"[{part.a}, {part.b}) over {radix.descriptor()}  t={part.t}")
        for row in rows:
            span = f"{{{row['lo']}}}" if row["hi"] - row["lo"] == 1 else f"[{row['lo']},{row['hi']})"
            extra = f"  shift={'ok' if row['shift_ok'] else 'FAIL'}" if args.verify else ""
            print(f"  {row['piece']:<5} {span:<14} base={row['base']:<6} lam={row['lam']}{extra}")
        if part.empty:
            print(f"  empty: {', '.join(part.empty)}")
        print(f"  excluded: {part.excluded}")
    return 0 if ok else 1


def _family_check(args, weak: bool) -> int:
    family = load_family(args.family, _grid_radices(args))
    rows, ok = [], True
    for p in args.p:
        res = verify_weak_inequality(family, p) if weak else verify_main_inequality(family, p)
        rows.append({"p": p, "lhs": res.lhs, "rhs": res.rhs, "ratio": res.ratio})
        ok = ok and bool(np.isfinite(res.ratio))
        if not weak and p == 2.0 and res.rhs > 0:
            ok = ok and abs(res.ratio - 1) <= 1e-10
    if args.json:
        print(json.dumps({"rows": rows, "ok": ok}, indent=2))
    else:
        for r in rows:
            print(f"p={r['p']:g} lhs={r['lhs']:.6e} rhs={r['rhs']:.6e} ratio={r['ratio']:.6f}")
    return 0 if ok else 1


def _ratio_lines(result: SuiteResult) -> list[str]:
    return [f"  max ratio {key}: {val:.6f}" for key, val in result.summary.get("max_ratio", {}).items()]


def cmd_rdf_verify(args) -> int:
    if args.family:
        return _family_check(args, weak=False)
    result = run_rdf_suite(_config(args))
    return _emit(args, result, _ratio_lines(result))


def cmd_weak_verify(args) -> int:
    if any(not 0 < p <= 1 for p in args.p):
        raise SystemExit("weak-verify needs 0 < p <= 1")
    if args.family:
        return _family_check(args, weak=True)
    result = run_weak_suite(_config(args))
    return _emit(args, result, _ratio_lines(result))


def cmd_plancherel(args) -> int:
    return _emit(args, run_plancherel(_config(args, p_grid=(2.0,))))


def cmd_tensor(args) -> int:
    result = run_tensor_suite(_config(args, dims=1, tensor_dims=args.tensor_dims))
    return _emit(args, result)


def cmd_gundy(args) -> int:
    result = run_gundy_suite(_config(args, atoms=args.atoms, p0=args.p0, trials=0))
    lines = [f"  atoms={len(result.records)} max_leak={result.summary['max_leak']:.3e} "
             f"max_quasi_local={result.summary['max_quasi_local']:.3e}"]
    return _emit(args, result, lines)


def _parse_rect(text: str) -> Rectangle:
    """``3:6,0:0`` with inclusive ends becomes ``[3,7) x [0,1)``."""
    bounds = []
    for side in text.split(","):
        lo, hi = (int(v) for v in side.split(":"))
        if hi < lo:
            raise SystemExit(f"empty side {side!r}")
        bounds.append((lo, hi + 1))
    return Rectangle(tuple(bounds))


def cmd_exotic(args) -> int:
    rect = _parse_rect(args.rect)
    args.dims = rect.dims
    imap = InterleavingMap(_grid_radices(args))
    image = sorted(exotic_interval(rect, imap))
    if args.json:
        print(json.dumps({"derived": imap.derived.descriptor(), "image": image}))
    else:
        print("{" + ", ".join(map(str, image)) + "}")
    return 0


# -- parser -----------------------------------------------------------------------------------

def _common(sp: argparse.ArgumentParser, trials: int = 20, p: str = "1.1,1.5,2", dims: int = 2) -> None:
    sp.add_argument("--radix", action="append",
                    help="radix descriptor: uniform:<p>:<N>, <p>:<N> or a JSON array; repeatable")
    sp.add_argument("--depth", type=_ints, help="truncation depth(s), comma separated")
    sp.add_argument("--dims", type=int, default=dims)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=trials)
    sp.add_argument("--p", type=_floats, default=_floats(p), help="comma separated exponents")
    sp.add_argument("--out", help="CSV output path")
    sp.add_argument("--json", action="store_true", help="machine-readable summary")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes for trials")
    sp.add_argument("--timing", action="store_true", help="record wall_ms (breaks byte-identical output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vilenkin-rdf", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("transform", help="forward/inverse Vilenkin transform of a JSON grid file")
    _common(sp, dims=1)
    sp.add_argument("--input", help="GridFunction or SpectrumCoeffs JSON; random function if omitted")
    sp.add_argument("--output")
    sp.add_argument("--check", action="store_true", help="roundtrip and naive-oracle comparison")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("partition", help="split [a, b) into shift-aligned pieces")
    _common(sp, dims=1)
    sp.add_argument("--a", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--verify", action="store_true", help="brute-force shift check per piece")
    sp.add_argument("--fuzz", action="store_true", help="run the partition fuzz suite instead")
    sp.set_defaults(func=cmd_partition)

    for name, func, p in (("rdf-verify", cmd_rdf_verify, "1.1,1.5,2"),
                          ("weak-verify", cmd_weak_verify, "0.5,1")):
        sp = sub.add_parser(name, help="random spectral families against the square-function bound")
        _common(sp, p=p)
        sp.add_argument("--max-rects", type=int, default=8)
        sp.add_argument("--min-rects", type=int, default=1)
        sp.add_argument("--law", choices=("gaussian", "rademacher"), default="gaussian")
        sp.add_argument("--family", help="check one saved family instead of random ones")
        sp.set_defaults(func=func)

    sp = sub.add_parser("tensor-amplify", help="ratio_D against ratio_1^D for tensor powers")
    _common(sp, trials=50)
    sp.add_argument("--tensor-dims", type=_ints, default=(2, 3))
    sp.add_argument("--max-rects", type=int, default=8)
    sp.set_defaults(func=cmd_tensor)

    sp = sub.add_parser("gundy-check", help="support and quasi-locality checks on random atoms")
    _common(sp, trials=0)
    sp.add_argument("--atoms", type=int, default=500)
    sp.add_argument("--p0", type=float, default=1.0)
    sp.set_defaults(func=cmd_gundy)

    sp = sub.add_parser("plancherel", help="exactness of the bound at p = 2")
    _common(sp, trials=100, p="2")
    sp.add_argument("--max-rects", type=int, default=8)
    sp.set_defaults(func=cmd_plancherel)

    sp = sub.add_parser("exotic", help="image of an index rectangle under digit interleaving")
    _common(sp)
    sp.add_argument("--rect", required=True, help="inclusive sides, e.g. 3:6,0:0")
    sp.set_defaults(func=cmd_exotic)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    code = args.func(args)
    if args.timing and not args.json:
        print(f"elapsed {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return code
