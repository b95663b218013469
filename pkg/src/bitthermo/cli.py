"""Command-line harness: every subcommand echoes its resolved config and writes CSV/JSON."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from importlib import resources
from typing import Any, Sequence

from .bitstring import (EnumerationCapError, derive_seed, generate_bernoulli, generate_exact,
                        read_text, write_packed, write_text)
from .complexity import (UnknownEstimatorError, delta_k_profile, entropy_bound_check,
                         get_estimator, structural_temperature)
from .equilibrium import (failure_rate_sweep, fit_exponential_decay, is_heat_bath,
                          zeroth_law_experiment)
from .processes import (InfeasibleError, carnot_run, check_first_law, check_second_law,
                        parse_table)
from .thermo import default_grid, statistical_temperature, temperature_curve

EXIT_OK, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_ESTIMATOR = 0, 2, 3, 4


class ValidationError(ValueError):
    pass


def load_defaults(path: str | None = None) -> dict:
    if path is None:
        text = resources.files("bitthermo").joinpath("data/defaults.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return json.loads(text)


def _plain(x: Any) -> Any:
    """JSON-safe copy: non-finite floats become strings, Fractions 'p/q'."""
    if isinstance(x, float):
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _dump_json(config: dict, result: Any) -> str:
    return json.dumps(_plain({"config": config, "result": result}), indent=2,
                      sort_keys=True) + "\n"


def _dump_csv(config: dict, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_plain(config), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _fraction_arg(text: str) -> float:
    t = float(text)
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"fraction {text} outside [0, 1]")
    return t


def _base_config(args, defaults: dict) -> dict:
    return {
        "command": args.command,
        "seed": args.seed,
        "estimator": args.estimator,
        "format": args.format,
        "defaults_version": defaults.get("version"),
        "defaults_file": args.defaults_file,
    }


# -- subcommands -----------------------------------------------------------

def cmd_generate(args, defaults):
    if (args.t is None) == (args.k is None):
        raise ValidationError("give exactly one of --t or --k")
    if args.n < 1 or args.count < 1:
        raise ValidationError("--n and --count must be positive")
    config = _base_config(args, defaults) | {"n": args.n, "t": args.t, "k": args.k,
                                               "count": args.count, "packed": args.packed}
    if args.t is not None:
        t = _fraction_arg(args.t)
        strings = [generate_bernoulli(args.n, t, derive_seed(args.seed, i))
                   for i in range(args.count)]
    else:
        if not 0 <= args.k <= args.n:
            raise ValidationError(f"--k {args.k} outside [0, {args.n}]")
        strings = [generate_exact(args.n, args.k, derive_seed(args.seed, i))
                   for i in range(args.count)]
    if args.packed:
        if args.out in (None, "-"):
            write_packed(strings, sys.stdout.buffer)
        else:
            with open(args.out, "wb") as fh:
                write_packed(strings, fh)
        return
    buf = io.StringIO()
    write_text(strings, buf, header=json.dumps(_plain(config), sort_keys=True))
    _emit(args, buf.getvalue())


def cmd_temp(args, defaults):
    with open(args.input) as fh:
        strings = read_text(fh)
    est = get_estimator(args.estimator)
    hb = defaults["heat_bath"]
    tol = hb["tolerance"] if args.tol is None else args.tol
    budget = defaults["probe_budget"] if args.probe_budget is None else args.probe_budget
    config = _base_config(args, defaults) | {"input": args.input, "tolerance": tol,
                                               "probe_budget": budget,
                                               "min_length": hb["min_length"]}
    if args.profile:
        positions = [int(x) for x in args.profile.split(",")]
        config["profile"] = positions
        rows = [[i, p, d] for i, s in enumerate(strings)
                for p, d in delta_k_profile(s, positions, est)]
        _emit(args, _dump_csv(config, ["index", "position", "deltaK_bits"], rows))
        return
    reports = []
    for i, s in enumerate(strings):
        seed = derive_seed(args.seed, i)
        stat = statistical_temperature(s.weight / s.length)
        rep = {"index": i, "n": s.length, "k": s.weight, "statistical": stat.as_dict(),
               "bound": entropy_bound_check(s, est).__dict__}
        if s.length >= hb["min_length"]:
            rep["equilibrium"] = is_heat_bath(s, est, tol, budget, seed,
                                              hb["min_length"]).as_dict()
            rep["structural"] = rep["equilibrium"]["structural"]
        else:
            rep["equilibrium"] = None
            rep["structural"] = structural_temperature(s, est, budget, seed).as_dict()
        reports.append(rep)
    if args.format == "csv":
        rows = []
        for r in reports:
            st, eq = r["structural"], r["equilibrium"]
            rows.append([r["index"], r["n"], r["k"], r["statistical"]["T_stat"],
                         r["statistical"]["inv_T_stat"], r["statistical"]["flag"],
                         st["inv_T_struc_per_symbol"], st["flag"],
                         "" if eq is None else eq["is_heat_bath"]])
        _emit(args, _dump_csv(config, ["index", "n", "k", "T_stat", "inv_T_stat", "stat_flag",
                                       "inv_T_struc_per_symbol", "struc_flag", "is_heat_bath"],
                              rows))
    else:
        _emit(args, _dump_json(config, reports))


def cmd_curve(args, defaults):
    c = defaults["curve"]
    points = c["points"] if args.points is None else args.points
    lo = c["lo"] if args.lo is None else args.lo
    hi = c["hi"] if args.hi is None else args.hi
    if not 0 < lo < hi < 1:
        raise ValidationError("need 0 < lo < hi < 1")
    config = _base_config(args, defaults) | {"points": points, "lo": lo, "hi": hi}
    rows = temperature_curve(default_grid(points, lo, hi))
    if args.format == "json":
        _emit(args, _dump_json(config, [r.__dict__ for r in rows]))
    else:
        _emit(args, _dump_csv(config, ["t", "T_stat", "inv_T_stat", "flag"],
                              [[r.t, r.T_stat, r.inv_T_stat, r.flag] for r in rows]))


def cmd_carnot(args, defaults):
    c = defaults["carnot"]
    n = c["n"] if args.n is None else args.n
    d1 = c["d1"] if args.d1 is None else args.d1
    mode = c["mode"] if args.mode is None else args.mode
    t1 = _fraction_arg(args.t1)
    if args.t2_grid:
        t2s = sorted(_fraction_arg(x) for x in args.t2_grid.split(","))
    elif args.t2 is not None:
        t2s = [_fraction_arg(args.t2)]
    else:
        raise ValidationError("give --t2 or --t2-grid")
    config = _base_config(args, defaults) | {"n": n, "t1": t1, "t2": t2s if args.t2_grid
                                               else t2s[0], "d1": d1, "mode": mode}
    out = [carnot_run(n, t1, t2, d1, mode).as_dict() for t2 in t2s]
    if args.format == "csv":
        keys = list(out[0])
        _emit(args, _dump_csv(config, keys, [[o[k] for k in keys] for o in out]))
    else:
        _emit(args, _dump_json(config, out if args.t2_grid else out[0]))


def cmd_laws(args, defaults):
    with open(args.table) as fh:
        tt = parse_table(fh)
    config = _base_config(args, defaults) | {"table": args.table, "entries": len(tt.entries)}
    first, second = check_first_law(tt), check_second_law(tt)
    _emit(args, _dump_json(config, {"first_law": first.as_dict(),
                                    "second_law": second.as_dict()}))


def cmd_zeroth(args, defaults):
    z = defaults["zeroth"]
    tol = defaults["pair"]["tolerance"] if args.tol is None else args.tol
    t = _fraction_arg(args.t) if args.t is not None else z["t"]
    est = get_estimator(args.estimator)
    if args.sweep:
        grid = ([int(x) for x in args.n_grid.split(",")] if args.n_grid else z["n_grid"])
        trials = z["trials"] if args.trials is None else args.trials
        config = _base_config(args, defaults) | {"t": t, "n_grid": sorted(grid),
                                                   "trials": trials, "tolerance": tol,
                                                   "duplicate": args.duplicate}
        rows = failure_rate_sweep(t, grid, trials, est, args.seed, tol, args.duplicate,
                                  args.workers)
        fit = fit_exponential_decay(rows)
        if args.format == "json":
            _emit(args, _dump_json(config, {"rows": [r.__dict__ for r in rows],
                                            "fit": fit.__dict__}))
        else:
            _emit(args, _dump_csv(config, ["n", "trials", "failures", "rate", "ci_low",
                                           "ci_high"],
                                  [[r.n, r.trials, r.failures, r.rate, r.ci_low, r.ci_high]
                                   for r in rows]))
        return
    n = args.n if args.n is not None else 2**14
    t_prime = _fraction_arg(args.t_prime) if args.t_prime is not None else t
    seeds = [derive_seed(args.seed, slot) for slot in range(3)]
    a = generate_bernoulli(n, t, seeds[0])
    b = generate_bernoulli(n, t_prime, seeds[1])
    c = a if args.duplicate else generate_bernoulli(n, t, seeds[2])
    config = _base_config(args, defaults) | {"n": n, "t": t, "t_prime": t_prime,
                                               "tolerance": tol, "duplicate": args.duplicate}
    rep = zeroth_law_experiment([a, b, c], est, tol)
    rep.seeds = seeds
    _emit(args, _dump_json(config, rep.as_dict()))


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit master seed")
    common.add_argument("--estimator", default=None, help="complexity estimator id")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--defaults-file", default=None, help="override the bundled defaults")

    p = argparse.ArgumentParser(prog="bitthermo", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write seeded bit strings")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--t", default=None, help="Bernoulli fraction")
    g.add_argument("--k", type=int, default=None, help="exact weight")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--packed", action="store_true", help="binary records instead of text")
    g.set_defaults(func=cmd_generate, default_format="json")

    t = sub.add_parser("temp", parents=[common], help="temperatures of strings in a file")
    t.add_argument("input")
    t.add_argument("--tol", type=float, default=None)
    t.add_argument("--probe-budget", type=int, default=None)
    t.add_argument("--profile", default=None,
                   help="comma-separated 1-based positions; emit the dK profile as CSV")
    t.set_defaults(func=cmd_temp, default_format="json")

    c = sub.add_parser("curve", parents=[common], help="T_stat against t")
    c.add_argument("--points", type=int, default=None)
    c.add_argument("--lo", type=float, default=None)
    c.add_argument("--hi", type=float, default=None)
    c.set_defaults(func=cmd_curve, default_format="csv")

    k = sub.add_parser("carnot", parents=[common], help="minimal-d2 Carnot search")
    k.add_argument("--n", type=int, default=None)
    k.add_argument("--t1", required=True)
    k.add_argument("--t2", default=None)
    k.add_argument("--t2-grid", default=None, help="comma-separated t2 values")
    k.add_argument("--d1", type=int, default=None)
    k.add_argument("--mode", choices=["exact", "asymptotic"], default=None)
    k.set_defaults(func=cmd_carnot, default_format="json")

    w = sub.add_parser("laws", parents=[common], help="first/second-law check of a table")
    w.add_argument("table")
    w.set_defaults(func=cmd_laws, default_format="json")

    z = sub.add_parser("zeroth", parents=[common], help="zeroth-law triple or sweep")
    z.add_argument("--n", type=int, default=None)
    z.add_argument("--t", default=None)
    z.add_argument("--t-prime", default=None, help="fraction of the middle string")
    z.add_argument("--tol", type=float, default=None)
    z.add_argument("--duplicate", action="store_true", help="third slot copies the first")
    z.add_argument("--sweep", action="store_true")
    z.add_argument("--n-grid", default=None, help="comma-separated lengths")
    z.add_argument("--trials", type=int, default=None)
    z.add_argument("--workers", type=int, default=1)
    z.set_defaults(func=cmd_zeroth, default_format="json")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        defaults = load_defaults(args.defaults_file)
        if args.seed is None:
            args.seed = defaults["seed"]
        if args.estimator is None:
            args.estimator = defaults["estimator"]
        if args.format is None:
            sweep = getattr(args, "sweep", False)
            args.format = "csv" if sweep else args.default_format
        get_estimator(args.estimator)
        args.func(args, defaults)
    except UnknownEstimatorError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_ESTIMATOR
    except (InfeasibleError, EnumerationCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
