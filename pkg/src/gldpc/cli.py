"""Command-line front end: bounds, finite-length curves, simulations, expurgation, graphs."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import __version__
from .bounds import (BoundConfig, ConditionError, NoRootError, alpha0, alphaR, best_c1,
                     compute_report, condition_check, default_c1, f_alpha)
from .bounds.exponent import condition_message
from .bounds.finite_length import check_blocklength, finite_length_bound
from .codes import CodeError, code_from_spec
from .decoder import DecoderConfig, decode
from .ensemble import (EnsembleParams, GraphFormatError, load_graph, sample_graph, sample_simple_graph,
                       save_graph)
from .partition import BudgetExceeded, expurgation_scan

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONDITION = 3
EXIT_BUDGET = 4

CSV_VERSION = "gldpc-csv v1"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# output helpers

def write_csv(path: Optional[str], kind: str, header: list[str], rows, meta: Optional[dict] = None):
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION} {kind}")
    if meta:
        buf.write(" " + " ".join(f"{k}={v}" for k, v in meta.items()))
    buf.write("\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    _emit(path, buf.getvalue())


def write_json(path: Optional[str], obj) -> None:
    _emit(path, json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n")


def _default(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return x


def _emit(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


def hamming_family_c(m: int) -> int:
    """Variable degree giving nominal rate closest to 1/2 with a length 2^m - 1 Hamming code."""
    d = (1 << m) - 1
    return round(d / (2 * m))


# ---------------------------------------------------------------------------
# bounds

def _resolve_code_args(args):
    """Fill d, t (and q) from --code when given."""
    code = None
    if getattr(args, "code", None):
        code = code_from_spec(args.code)
        for name, val in (("d", code.d), ("t", code.t), ("q", code.q)):
            cur = getattr(args, name, None)
            if cur is not None and cur != val:
                raise ConfigError(f"--{name} {cur} conflicts with code {args.code} ({name}={val})")
            setattr(args, name, val)
    return code


def _bound_kwargs(args) -> dict:
    kw = {}
    for name in ("grid_w", "grid_r", "alpha_min", "alpha_max"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    return kw


def cmd_bounds(args) -> int:
    if args.family:
        return _bounds_family(args)
    _resolve_code_args(args)
    for name in ("c", "d", "t"):
        if getattr(args, name) is None:
            raise ConfigError(f"--{name} is required")
    kw = _bound_kwargs(args)
    if args.c1 is None:
        c1, _ = best_c1(args.c, args.d, args.t, **kw)
        policy = "max-alpha0"
    else:
        c1, policy = args.c1, "given"
        if not condition_check(args.c, c1, args.t):
            raise ConditionError(condition_message(args.c, c1, args.t))
    cfg = BoundConfig(args.c, args.d, args.t, c1, **kw)
    report = compute_report(cfg, c1_policy=policy)
    sweep = []
    if args.sweep_points:
        for a in np.geomspace(cfg.alpha_min, min(10 * report.alpha0, 0.49), args.sweep_points):
            sweep.append((float(a), f_alpha(float(a), cfg).value))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_json(os.path.join(args.out, "report.json"), report.to_dict())
        if sweep:
            write_csv(os.path.join(args.out, "sweep.csv"), "f-sweep", ["alpha", "f_alpha"], sweep,
                      {"c": cfg.c, "d": cfg.d, "t": cfg.t, "c1": cfg.c1})
    if args.format == "json":
        write_json(None, report.to_dict() | ({"sweep": sweep} if sweep else {}))
    else:
        write_csv(None, "bounds", ["c", "d", "t", "c1", "alpha0", "alphaR"],
                  [(cfg.c, cfg.d, cfg.t, cfg.c1, report.alpha0, report.alphaR)],
                  {"c1_policy": policy})
    return EXIT_OK


def family_rows(m_values, c1_policy: str = "max-alpha0", progress=None, **kw):
    """(m, d, c, c1, alpha0, alphaR) for the Hamming family at nominal rate about 1/2."""
    rows = []
    for m in m_values:
        d = (1 << m) - 1
        c = hamming_family_c(m)
        if c1_policy == "max-alpha0":
            c1, root = best_c1(c, d, 1, **kw)
            if root is None:
                raise NoRootError(f"no admissible c1 has a root for d={d}")
        else:
            c1 = default_c1(c)
            root = alpha0(BoundConfig(c, d, 1, c1, **kw))
        cfg = BoundConfig(c, d, 1, c1, **kw)
        aR = alphaR(cfg, root.alpha0)
        rows.append((m, d, c, c1, root.alpha0, aR))
        if progress:
            progress(rows[-1])
    return rows


def _bounds_family(args) -> int:
    if args.family != "hamming":
        raise ConfigError(f"unknown family {args.family!r}")
    ms = range(args.m_min, args.m_max + 1)
    policy = "max-alpha0" if args.c1_policy == "max" else "ceil-half"
    rows = family_rows(ms, policy, **_bound_kwargs(args))
    if args.format == "json":
        write_json(args.out, [dict(zip(["m", "d", "c", "c1", "alpha0", "alphaR"], r)) for r in rows])
    else:
        write_csv(args.out, "family", ["d", "alpha0", "alphaR", "c", "c1"],
                  [(r[1], r[4], r[5], r[2], r[3]) for r in rows], {"c1_policy": policy})
    return EXIT_OK


# ---------------------------------------------------------------------------
# finite length

def cmd_finite_length(args) -> int:
    _resolve_code_args(args)
    for name in ("c", "d", "t", "N"):
        if getattr(args, name) is None:
            raise ConfigError(f"--{name} is required")
    c1 = args.c1 if args.c1 is not None else default_c1(args.c)
    if not condition_check(args.c, c1, args.t):
        raise ConditionError(condition_message(args.c, c1, args.t))
    try:
        check_blocklength(args.N, args.c, args.d)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    cfg = BoundConfig(args.c, args.d, args.t, c1)
    t0 = time.perf_counter()
    curve = finite_length_bound(args.N, args.i_max, cfg, eta=args.eta,
                                denominator=args.denominator, stop_at_one=True)
    rows = curve.rows(stop_at_one=True)
    meta = {"N": args.N, "c": cfg.c, "d": cfg.d, "t": cfg.t, "c1": c1, "eta": args.eta,
            "denominator": args.denominator}
    if args.format == "json":
        write_json(args.out, {"meta": meta, "rows": [dict(zip(["i", "pe_i", "cumulative"], r)) for r in rows],
                              "wall_time": time.perf_counter() - t0})
    else:
        write_csv(args.out, "finite-length", ["i", "pe_i", "cumulative"], rows, meta)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulation

@dataclass
class TrialRecord:
    trial: int
    seed: int
    weight: int
    iterations: int
    success: bool
    residual: int


def trial_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence([master, index]).generate_state(1, dtype=np.uint64)[0])


def read_patterns(path: str, N: int, q: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """One pattern per line: weight, then that many positions, then that many values."""
    pats = []
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            nums = [int(x) for x in line.replace(",", " ").split()]
            w = nums[0]
            if len(nums) != 1 + 2 * w:
                raise ConfigError(f"{path}:{ln}: expected {1 + 2 * w} numbers")
            pos, vals = np.array(nums[1:1 + w]), np.array(nums[1 + w:])
            if w and (pos.min() < 0 or pos.max() >= N or np.unique(pos).size != w):
                raise ConfigError(f"{path}:{ln}: bad positions")
            if w and (vals.min() < 1 or vals.max() >= q):
                raise ConfigError(f"{path}:{ln}: values must be nonzero field elements")
            pats.append((pos, vals))
    if not pats:
        raise ConfigError(f"{path}: no patterns")
    return pats


def _sampler(simple: bool):
    return sample_simple_graph if simple else sample_graph


def run_trials(code, N: int, c: int, c1: int, weight: int, trials: int, seed: int,
               error_model: str = "random", patterns=None, graph=None, T: int = 100,
               simple: bool = False):
    if weight > N:
        raise ConfigError("error weight exceeds N")
    params = EnsembleParams.for_code(N, c, code, c1)
    dcfg = DecoderConfig(c1, T, code.q)
    records = []
    zero = np.zeros(N, dtype=np.int64)
    for k in range(trials):
        s = trial_seed(seed, k)
        rng = np.random.default_rng(s)
        g = graph if graph is not None else _sampler(simple)(params, s)
        v = zero.copy()
        if error_model == "file":
            pos, vals = patterns[k % len(patterns)]
        else:
            pos = rng.choice(N, size=weight, replace=False)
            vals = rng.integers(1, code.q, size=weight)
        v[pos] = vals
        res = decode(g, code, v, dcfg)
        resid = int(np.count_nonzero(res.vector))
        records.append(TrialRecord(k, s, int(len(pos)), res.iterations, resid == 0, resid))
    return records


def cmd_simulate(args) -> int:
    code = _resolve_code_args(args)
    if code is None:
        raise ConfigError("--code is required")
    if args.N is None or args.c is None:
        raise ConfigError("--N and --c are required")
    c1 = args.c1 if args.c1 is not None else (args.c // 2 + 1 if code.q > 2 else default_c1(args.c))
    graph = load_graph(args.graph) if args.graph else None
    patterns = None
    if args.error_model == "file":
        if not args.patterns:
            raise ConfigError("--error-model file needs --patterns")
        patterns = read_patterns(args.patterns, args.N, code.q)
        weight = 0
    else:
        if args.weight is not None:
            weight = args.weight
        elif args.weight_frac is not None:
            weight = int(math.floor(args.weight_frac * args.N))
        else:
            raise ConfigError("--weight or --weight-frac is required")
    try:
        records = run_trials(code, args.N, args.c, c1, weight, args.trials, args.seed,
                             args.error_model, patterns, graph, args.T, args.simple)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    ok = sum(r.success for r in records)
    lo, hi = wilson_interval(ok, len(records))
    summary = {"code": args.code, "N": args.N, "c": args.c, "c1": c1, "seed": args.seed,
               "trials": len(records), "weight": weight, "error_model": args.error_model,
               "successes": ok, "success_rate": ok / max(len(records), 1), "wilson95": [lo, hi]}
    rows = [(r.trial, r.seed, r.weight, r.iterations, int(r.success), r.residual) for r in records]
    header = ["trial", "seed", "weight", "iterations", "success", "residual"]
    if args.format == "json":
        write_json(args.out, {"summary": summary, "trials": [asdict(r) for r in records]})
    else:
        write_csv(args.out, "trials", header, rows, {"code": args.code, "N": args.N, "seed": args.seed})
        if args.summary:
            write_json(args.summary, summary)
        else:
            sys.stderr.write(json.dumps(summary) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# expurgation and graphs

def cmd_expurgate(args) -> int:
    code = _resolve_code_args(args)
    fixed = load_graph(args.graph) if args.graph else None
    if fixed is not None:
        if args.resample:
            raise ConfigError("--resample cannot be combined with --graph")
        for name, val in (("N", fixed.N), ("c", fixed.c), ("d", fixed.d)):
            if getattr(args, name) not in (None, val):
                raise ConfigError(f"--{name} conflicts with the graph file ({name}={val})")
            setattr(args, name, val)
    if args.N is None or args.c is None or args.d is None or args.t is None:
        raise ConfigError("--N, --c and a code (or --d/--t) are required")
    c1 = args.c1 if args.c1 is not None else default_c1(args.c)
    if (args.N * args.c) % args.d:
        raise ConfigError(f"N*c = {args.N * args.c} is not divisible by d = {args.d}")
    seed = args.seed
    tries = []
    for attempt in range(args.max_tries if args.resample else 1):
        g = fixed if fixed is not None else _sampler(args.simple)((args.N, args.c, args.d), seed)
        bad = expurgation_scan(g, args.b_max, c1, args.t, budget=args.budget)
        tries.append({"seed": seed, "bad_sets": [list(b) for b in bad]})
        if not bad or not args.resample:
            break
        seed += 1
    clean = not tries[-1]["bad_sets"]
    report = {"N": args.N, "c": args.c, "d": args.d, "t": args.t, "c1": c1, "b_max": args.b_max,
              "code": args.code, "accepted_seed": seed if clean else None, "attempts": tries}
    if args.graph_out and clean:
        save_graph(g, args.graph_out)
    write_json(args.out, report)
    if args.resample and not clean:
        sys.stderr.write(f"no clean graph in {args.max_tries} attempts\n")
        return EXIT_BUDGET
    return EXIT_OK


def cmd_graph(args) -> int:
    if args.graph_cmd == "gen":
        if args.d is None:
            _resolve_code_args(args)
        if args.N is None or args.c is None or args.d is None:
            raise ConfigError("--N, --c and --d are required")
        if (args.N * args.c) % args.d:
            raise ConfigError(f"N*c = {args.N * args.c} is not divisible by d = {args.d}")
        g = _sampler(args.simple)((args.N, args.c, args.d), args.seed)
        if args.out in (None, "-"):
            from .ensemble import serialize_graph
            sys.stdout.write(serialize_graph(g).decode())
        else:
            save_graph(g, args.out)
        return EXIT_OK
    g = load_graph(args.path)
    vd, cd = g.degrees()
    info = {"N": g.N, "c": g.c, "d": g.d, "J": g.J, "simple": g.is_simple(),
            "regular": bool((vd == g.c).all() and (cd == g.d).all())}
    write_json(None, info)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gldpc", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def ensemble_flags(sp, need_N=False):
        sp.add_argument("--c", type=int)
        sp.add_argument("--d", type=int)
        sp.add_argument("--t", type=int)
        sp.add_argument("--c1", type=int)
        sp.add_argument("--q", type=int)
        sp.add_argument("--code", help="e.g. hamming:m=7 or rs:d=30,k=24,q=31")
        sp.add_argument("--N", type=int)
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--simple", action="store_true",
                        help="remove parallel edges from sampled graphs by edge switching")

    b = sub.add_parser("bounds", help="alpha0, alphaR and f sweeps")
    ensemble_flags(b)
    b.add_argument("--family", choices=["hamming"], help="sweep the Hamming family instead")
    b.add_argument("--m-min", type=int, default=7)
    b.add_argument("--m-max", type=int, default=11)
    b.add_argument("--c1-policy", choices=["max", "ceil-half"], default="max")
    b.add_argument("--sweep-points", type=int, default=0)
    b.add_argument("--grid-w", type=int)
    b.add_argument("--grid-r", type=int)
    b.add_argument("--alpha-min", type=float)
    b.add_argument("--alpha-max", type=float)
    b.set_defaults(func=cmd_bounds)

    f = sub.add_parser("finite-length", help="finite-N failure probability bound")
    ensemble_flags(f)
    f.add_argument("--i-max", type=int, default=25)
    f.add_argument("--eta", choices=["stirling", "entropy"], default="stirling")
    f.add_argument("--denominator", choices=["exact", "stirling"], default="exact")
    f.set_defaults(func=cmd_finite_length)

    s = sub.add_parser("simulate", help="Monte-Carlo decoding trials")
    ensemble_flags(s)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--weight", type=int)
    s.add_argument("--weight-frac", type=float)
    s.add_argument("--error-model", choices=["random", "file"], default="random")
    s.add_argument("--patterns", help="pattern file for --error-model file")
    s.add_argument("--graph", help="use this graph file for every trial")
    s.add_argument("--T", type=int, default=100)
    s.add_argument("--summary", help="summary JSON path (CSV mode)")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("expurgate", help="exhaustive scan for possibly bad sets")
    ensemble_flags(e)
    e.add_argument("--b-max", type=int, default=1)
    e.add_argument("--budget", type=int, default=50_000_000)
    e.add_argument("--resample", action="store_true")
    e.add_argument("--max-tries", type=int, default=100)
    e.add_argument("--graph", help="scan this graph file instead of sampling")
    e.add_argument("--graph-out")
    e.set_defaults(func=cmd_expurgate)

    g = sub.add_parser("graph", help="generate or check graph files")
    gsub = g.add_subparsers(dest="graph_cmd", required=True)
    gg = gsub.add_parser("gen")
    ensemble_flags(gg)
    gg.set_defaults(func=cmd_graph)
    gc = gsub.add_parser("check")
    gc.add_argument("path")
    gc.set_defaults(func=cmd_graph)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConditionError as e:
        sys.stderr.write(f"condition check failed: {e}\n")
        return EXIT_CONDITION
    except BudgetExceeded as e:
        sys.stderr.write(f"budget exhausted: {e}\n")
        return EXIT_BUDGET
    except NoRootError as e:
        sys.stderr.write(f"no root: {e}\n")
        return EXIT_CONFIG
    except (ConfigError, CodeError, GraphFormatError, OSError, ValueError) as e:
        sys.stderr.write(f"configuration error: {e}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
