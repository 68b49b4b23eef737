"""Command-line interface: ``drsubmax generate | solve | experiment | verify | report``.

Exit codes: 0 ok, 1 a check failed, 2 usage or input error, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import algorithms, verify
from .conic import verify_kalpha
from .exceptions import DrSubmaxError, LPInfeasibleError, NumericalError, SchemaError
from .instances import GENERATORS, GRID_MAX_N, brute_force_opt, generate, load_instance, save_instance
from .objectives import QuadraticObjective, estimate_lipschitz

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

ALGORITHMS = ("two-phase-fw", "nonmonotone-fw", "proj-grad")
M_RULES = {
    "half": lambda n: max(1, math.floor(0.5 * n)),
    "equal": lambda n: n,
    "one-and-half": lambda n: math.floor(1.5 * n),
}
SUITES = ("dr", "weak-dr", "lemma1", "key-claim", "lemma3", "growth", "qlb", "kalpha")
GRID_BUDGET = 5_000_000

DEFAULTS = {
    "seed": 0,
    "jobs": None,
    "generate": {"kind": "quad-uniform", "n": 8, "m": 4},
    "solve": {
        "algorithm": "two-phase-fw",
        "gamma": 0.01,
        "iterations": 100,
        "K1": 100,
        "K2": 100,
        "eps1": 1e-6,
        "eps2": 1e-6,
        "oracle": False,
    },
    "experiment": {"kind": "quad-uniform", "n_list": [4, 5, 6], "m_rule": "half", "repeats": 20, "oracle": True},
    "verify": {"suite": "all", "samples": 50},
}


class UsageError(DrSubmaxError):
    pass


@dataclass
class RunRecord:
    instance: str
    algorithm: str
    params: dict
    value: float
    oracle: float
    ratio: float
    wall_time: float
    iterations: int
    seed: int


def auto_grid(n):
    """Grid points per axis: 21, reduced so the grid stays under GRID_BUDGET points."""
    return int(min(21, math.floor(GRID_BUDGET ** (1.0 / n) + 1e-9)))


def ratio_of(value, oracle):
    if oracle is None or not oracle > 0:
        return None
    return value / oracle


def run_algorithm(inst, name, opts):
    """Run one solver; returns (value, iterations, traces dict, extras dict)."""
    obj, P = inst.objective, inst.polytope
    if name == "two-phase-fw":
        cfg = algorithms.TwoPhaseConfig(opts["K1"], opts["K2"], opts["eps1"], opts["eps2"])
        res = algorithms.two_phase_fw(obj, P, cfg)
        extras = {"winner": res.winner, "g_P": res.g_P, "g_Q": res.g_Q, "f_x": res.f_x, "f_z": res.f_z}
        iters = len(res.trace1) + len(res.trace2)
        return res.value, iters, {"phase1": res.trace1, "phase2": res.trace2}, extras
    if name == "nonmonotone-fw":
        x, tr = algorithms.nonmonotone_fw(obj, P, opts["gamma"])
        return obj.value(x), len(tr) - 1, {"": tr}, {}
    if name == "proj-grad":
        x, tr = algorithms.projected_gradient_ascent(obj, P, opts["iterations"])
        return obj.value(x), len(tr) - 1, {"": tr}, {}
    raise UsageError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


# ---------------------------------------------------------------------------
# configuration


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    return cfg


def effective_config(args, command):
    """Merge built-in defaults < config file < command-line flags."""
    file_cfg = load_config(args.config)
    eff = {"seed": DEFAULTS["seed"], "jobs": DEFAULTS["jobs"]}
    eff.update(DEFAULTS.get(command, {}))
    for key in ("seed", "jobs"):
        if key in file_cfg:
            eff[key] = file_cfg[key]
    eff.update(file_cfg.get(command, {}))
    for key, val in vars(args).items():
        if key in ("config", "command", "func") or val is None:
            continue
        eff[key] = val
    if eff.get("jobs") is None:
        eff["jobs"] = int(os.getenv("DRSUBMAX_JOBS", "1"))
    return eff


_UNECHOED = ("out", "jobs", "record")


def header_lines(cfg):
    # output locations and worker count do not affect results, so they are
    # left out to keep files byte-identical across reruns
    shown = {k: v for k, v in cfg.items() if k not in _UNECHOED}
    return ["drsubmax " + json.dumps(shown, sort_keys=True, default=str)]


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args):
    cfg = effective_config(args, "generate")
    if cfg.get("out") is None:
        raise UsageError("generate needs --out")
    inst = generate(cfg["kind"], int(cfg["n"]), int(cfg["m"]), int(cfg["seed"]))
    save_instance(inst, cfg["out"])
    P = inst.polytope
    print(
        f"wrote {cfg['out']}: kind={cfg['kind']} n={P.n} m={P.m} "
        f"|ubar|_2={np.linalg.norm(P.ubar):.6g} |ubar|_inf={P.ubar.max():.6g}"
    )
    return EXIT_OK


def cmd_solve(args):
    cfg = effective_config(args, "solve")
    inst = load_instance(cfg["instance"])
    name = cfg["algorithm"]
    t0 = time.perf_counter()
    value, iters, traces, extras = run_algorithm(inst, name, cfg)
    wall = time.perf_counter() - t0
    oracle = None
    if cfg["oracle"]:
        oracle = brute_force_opt(inst.objective, inst.polytope, auto_grid(inst.polytope.n), 20, cfg["seed"]).value
    params = {k: cfg[k] for k in ("gamma", "iterations", "K1", "K2", "eps1", "eps2")}
    rec = RunRecord(
        instance=f"{inst.generator}:{inst.seed}",
        algorithm=name,
        params=params,
        value=value,
        oracle=oracle,
        ratio=ratio_of(value, oracle),
        wall_time=wall,
        iterations=iters,
        seed=cfg["seed"],
    )
    out = cfg.get("out")
    if out:
        stem, ext = os.path.splitext(out)
        for tag, tr in traces.items():
            path = out if not tag else f"{stem}.{tag}{ext or '.csv'}"
            lines = header_lines(cfg) + ([f"winner {extras['winner']}"] if "winner" in extras else [])
            _write_text(path, tr.to_csv(lines))
            if cfg.get("json_trace"):
                _write_text(os.path.splitext(path)[0] + ".json", tr.to_json() + "\n")
    record = asdict(rec) | extras
    if cfg.get("record"):
        with open(cfg["record"], "a", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    print(json.dumps(record, sort_keys=True))
    return EXIT_OK


def _instance_seed(seed, n, rep):
    return int(np.random.SeedSequence([seed, n, rep]).generate_state(1)[0])


def _experiment_cell(job):
    kind, n, m, rep, seed, use_oracle, opts = job
    inst = generate(kind, n, m, _instance_seed(seed, n, rep))
    oracle = None
    if use_oracle and n <= GRID_MAX_N:
        oracle = brute_force_opt(inst.objective, inst.polytope, auto_grid(n), 20, inst.seed).value
    out = []
    for name in ALGORITHMS:
        value, iters, _, _ = run_algorithm(inst, name, opts)
        out.append((name, value, oracle))
    return n, m, rep, out


def cmd_experiment(args):
    cfg = effective_config(args, "experiment")
    if cfg.get("out") is None:
        raise UsageError("experiment needs --out")
    if cfg["m_rule"] not in M_RULES:
        raise UsageError(f"unknown m rule {cfg['m_rule']!r}; choose from {', '.join(M_RULES)}")
    if cfg["kind"] not in GENERATORS:
        raise UsageError(f"unknown instance kind {cfg['kind']!r}")
    repeats = int(cfg["repeats"])
    if repeats < 1:
        raise UsageError("repeats must be >= 1")
    n_list = [int(n) for n in cfg["n_list"]]
    opts = dict(DEFAULTS["solve"])
    jobs = [
        (cfg["kind"], n, M_RULES[cfg["m_rule"]](n), r, int(cfg["seed"]), bool(cfg["oracle"]), opts)
        for n in n_list
        for r in range(repeats)
    ]
    workers = max(1, int(cfg["jobs"]))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            cells = list(pool.map(_experiment_cell, jobs))
    else:
        cells = [_experiment_cell(j) for j in jobs]

    buf = io.StringIO()
    for line in header_lines(cfg):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "m", "algorithm", "repeats", "mean_value", "std_value", "mean_ratio", "std_ratio", "oracle"])
    for n in n_list:
        rows = [c for c in cells if c[0] == n]
        m = rows[0][1]
        for name in ALGORITHMS:
            vals = np.array([v for c in rows for a, v, _ in c[3] if a == name])
            oracles = [o for c in rows for a, _, o in c[3] if a == name]
            has_oracle = all(o is not None for o in oracles)
            if has_oracle:
                ratios = np.array([ratio_of(v, o) for v, o in zip(vals, oracles)], dtype=float)
                mr, sr = repr(float(np.mean(ratios))), repr(float(np.std(ratios)))
            else:
                mr, sr = "", ""
            w.writerow(
                [
                    n,
                    m,
                    name,
                    repeats,
                    repr(float(np.mean(vals))),
                    repr(float(np.std(vals))),
                    mr,
                    sr,
                    "oracle" if has_oracle else "no-oracle",
                ]
            )
    _write_text(cfg["out"], buf.getvalue())
    print(f"wrote {cfg['out']} ({len(n_list)} sizes x {len(ALGORITHMS)} algorithms, {repeats} repeats)")
    return EXIT_OK


def run_suite(inst, suite, samples, seed):
    """Run verification checks; returns a list of (CheckReport-like dict)."""
    obj, P = inst.objective, inst.polytope
    chosen = SUITES if suite == "all" else (suite,)
    for s in chosen:
        if s not in SUITES:
            raise UsageError(f"unknown suite {s!r}; choose from {', '.join(SUITES + ('all',))}")
    upper = P.ubar
    reports = []
    xstar = None
    shifted = obj
    if {"key-claim", "lemma3"} & set(chosen):
        xstar = brute_force_opt(obj, P, auto_grid(P.n), 20, seed).x
        # these two need f >= 0: shift by a certified lower bound when one exists
        lb = verify.box_lower_bound(obj, upper)
        if lb is not None and lb < 0:
            shifted = verify.ShiftedObjective(obj, -lb)
    for s in chosen:
        if s == "dr":
            rep = verify.check_dr_hessian(obj, samples, 1e-6, seed, upper=upper).to_dict()
        elif s == "weak-dr":
            rep = verify.check_weak_dr(obj, 4 * samples, seed, upper=upper).to_dict()
        elif s == "lemma1":
            rep = verify.check_lemma1(obj, 0.0, 4 * samples, seed, upper=upper).to_dict()
        elif s == "key-claim":
            rep = verify.check_key_claim(shifted, P, xstar, 2 * samples, seed).to_dict()
        elif s == "lemma3":
            if np.any(upper <= 0):
                raise UsageError("lemma3 needs a polytope with ubar > 0")
            rep = verify.check_lemma3(shifted, upper / 2, xstar, 4 * samples, seed, ubar=upper).to_dict()
        elif s == "growth":
            gamma = 0.1
            _, tr = algorithms.nonmonotone_fw(obj, P, gamma)
            rep = verify.check_growth_bound(tr, P.ubar, gamma).to_dict()
        elif s == "qlb":
            certified = isinstance(obj, QuadraticObjective)
            L = obj.lipschitz_hint if certified else estimate_lipschitz(obj, max(samples, 2), seed)
            qr = verify.check_quadratic_lower_bound(obj, L, 4 * samples, seed, upper=upper)
            if not certified:
                qr.hypothesis_ok = False
                qr.notes.append("L is a sampled estimate, not a certified Lipschitz bound")
            rep = qr.to_dict()
            rep["L"] = L
        elif s == "kalpha":
            alpha = inst.alpha if inst.alpha is not None else np.ones(P.n)
            kr = verify_kalpha(obj, alpha, samples, 1e-6, seed)
            rep = {"name": "kalpha", "passed": kr.ksubmodular, "checks": samples, **kr.to_dict()}
            rep["hypothesis_ok"] = True
        if rep["passed"]:
            rep["status"] = "pass"
        else:
            rep["status"] = "FAIL" if rep.get("hypothesis_ok", True) else "inconclusive"
        reports.append(rep)
    return reports


def render_table(rows, columns):
    widths = [max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in columns]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(str(r.get(c, "")).ljust(w) for c, w in zip(columns, widths)))
    return "\n".join(lines)


def _fmt(x):
    return "" if x is None else f"{x:.3e}"


def cmd_verify(args):
    cfg = effective_config(args, "verify")
    inst = load_instance(cfg["instance"])
    reports = run_suite(inst, cfg["suite"], int(cfg["samples"]), int(cfg["seed"]))
    failed = any(r["status"] == "FAIL" for r in reports)
    doc = {"config": cfg, "passed": not failed, "reports": reports}
    if cfg.get("out"):
        _write_text(cfg["out"], json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n")
    rows = [{"check": r["name"], "status": r["status"], "checks": r["checks"], "max_excess": _fmt(r["max_excess"])} for r in reports]
    print(render_table(rows, ["check", "status", "checks", "max_excess"]))
    return EXIT_CHECK if failed else EXIT_OK


def _read_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def cmd_report(args):
    path = args.path
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        rows = [{"check": r["name"], "status": r["status"], "checks": r["checks"], "max_excess": _fmt(r["max_excess"])} for r in doc["reports"]]
        print(render_table(rows, ["check", "status", "checks", "max_excess"]))
        return EXIT_OK if doc["passed"] else EXIT_CHECK
    rows = _read_csv(path)
    if not rows or "algorithm" not in rows[0]:
        raise UsageError(f"{path} is not an experiment CSV")
    table = {}
    for r in rows:
        key = (int(r["n"]), int(r["m"]))
        if r["mean_ratio"]:
            cell = f"{float(r['mean_ratio']):.4f} ± {float(r['std_ratio']):.4f}"
        else:
            cell = f"{float(r['mean_value']):.4g} (value)"
        table.setdefault(key, {"n": key[0], "m": key[1]})[r["algorithm"]] = cell
    algos = list(dict.fromkeys(r["algorithm"] for r in rows))
    print(render_table(list(table.values()), ["n", "m"] + algos))
    return EXIT_OK


# ---------------------------------------------------------------------------


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--out", help="output file")
    common.add_argument("--config", help="JSON config file; flags override it")
    common.add_argument("--jobs", type=int, help="worker processes (default $DRSUBMAX_JOBS or 1)")

    p = argparse.ArgumentParser(prog="drsubmax", description="Non-monotone DR-submodular maximization toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a synthetic instance")
    g.add_argument("--kind", choices=sorted(GENERATORS))
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", parents=[common], help="run a solver on an instance")
    s.add_argument("instance")
    s.add_argument("--algorithm", choices=ALGORITHMS)
    s.add_argument("--gamma", type=float, help="nonmonotone-fw step size")
    s.add_argument("--iterations", type=int, help="proj-grad iterations")
    s.add_argument("--K1", type=int)
    s.add_argument("--K2", type=int)
    s.add_argument("--eps1", type=float)
    s.add_argument("--eps2", type=float)
    s.add_argument("--oracle", action="store_true", default=None, help="also compute the grid+polish oracle")
    s.add_argument("--record", help="append the run record to this JSONL file")
    s.add_argument("--json-trace", action="store_true", default=None, help="also dump full iterates as JSON")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("experiment", parents=[common], help="synthetic sweep over n")
    e.add_argument("--kind", choices=sorted(GENERATORS))
    e.add_argument("--n-list", type=_int_list, dest="n_list")
    e.add_argument("--m-rule", choices=sorted(M_RULES), dest="m_rule")
    e.add_argument("--repeats", type=int)
    e.add_argument("--no-oracle", action="store_false", dest="oracle", default=None)
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", parents=[common], help="run property checks on an instance")
    v.add_argument("instance")
    v.add_argument("--suite", choices=SUITES + ("all",))
    v.add_argument("--samples", type=int)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="render an experiment CSV or verify JSON as a table")
    r.add_argument("path")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"drsubmax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, OSError) as exc:
        print(f"drsubmax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, LPInfeasibleError) as exc:
        print(f"drsubmax: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
