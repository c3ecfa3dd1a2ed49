"""Command-line front end: ``bihnls check|sweep|solve|probe|besov|scale-test``.

Exit codes: 0 success, 2 invalid input, 3 norm blow-up, 4 no convergence.
Artifacts go to ``--out`` (or $BIHNLS_OUT_DIR, default ./bihnls-out) together
with a manifest.json listing a sha256 for every file written.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BihnlsError, ConstructionFailed, HypothesisViolated, InvalidParams
from .exponents import (Constant, LebesguePair, PowerLaw, ProblemParams, Split, as_fraction,
                        classify_criticality, parse_rational, scaling_index)
from .grid import Grid, GridField, read_field, write_field
from .lemmas import (HIGH_REGULARITY, LBETA_BRANCH, LEMMA_IDS, LINF_BRANCH, LemmaWitness,
                     classify_gwp, construct_witness, lemma_applies, lwp_hypotheses)

EXIT_OK, EXIT_INVALID, EXIT_BLOWUP, EXIT_NOCONV = 0, 2, 3, 4
OUT_ENV = "BIHNLS_OUT_DIR"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing helpers

def rational(text: str) -> Fraction:
    try:
        e = parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if e.is_inf:
        raise argparse.ArgumentTypeError("infinite value not allowed here")
    return e.fraction()


def rational_range(text: str) -> list:
    """'start:stop:step' (inclusive) or a single value."""
    parts = text.split(":")
    if len(parts) == 1:
        return [rational(parts[0])]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}")
    lo, hi, step = (rational(p) for p in parts)
    if step <= 0:
        raise argparse.ArgumentTypeError("range step must be positive")
    out, x = [], lo
    while x <= hi:
        out.append(x)
        x += step
    return out


def int_range(text: str) -> list:
    """'a..b' inclusive, or a single integer."""
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(text)]


def complex_value(text: str) -> complex:
    return complex(text.replace(" ", ""))


def build_params(N, s, alpha, b=None, beta=None, mu=0, lam=1.0) -> ProblemParams:
    if b is not None and beta is not None:
        raise InvalidParams("give -b or -beta, not both", "one potential exponent")
    if b is not None:
        pot = PowerLaw(lam, b)
    elif beta is not None:
        pot = Split(beta, lam=lam)
    else:
        pot = Constant(lam)
    return ProblemParams(N, s, alpha, mu, pot)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


# ---------------------------------------------------------------- artifacts

class Run:
    """Collects artifacts of one command and writes the manifest."""

    def __init__(self, args, command: str):
        self.args = args
        self.command = command
        self.out = Path(args.out or os.environ.get(OUT_ENV) or "bihnls-out")
        self.out.mkdir(parents=True, exist_ok=True)
        self.inputs, self.outputs = [], []
        self.t0 = time.time()
        self.extra = {}

    def write_text(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text)
        self.outputs.append(path)
        return path

    def write_json(self, name: str, obj) -> Path:
        return self.write_text(name, json.dumps(obj, indent=2, sort_keys=True, default=_fmt) + "\n")

    def write_csv(self, name: str, rows) -> Path:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return self.write_text(name, buf.getvalue())

    def write_field(self, name: str, field: GridField) -> Path:
        path = self.out / name
        write_field(path, field)
        self.outputs.append(path)
        return path

    def add_input(self, path) -> None:
        self.inputs.append(Path(path))

    def finish(self) -> None:
        config = {k: _fmt(v) if not isinstance(v, (list, int, type(None), bool, str)) else v
                  for k, v in vars(self.args).items() if k != "func"}
        config = json.loads(json.dumps(config, default=_fmt))
        manifest = {
            "command": self.command,
            "config": config,
            "version": __version__,
            "inputs": [{"path": str(p), "sha256": _sha(p)} for p in self.inputs],
            "outputs": [{"path": str(p), "sha256": _sha(p)} for p in self.outputs],
            "duration_s": time.time() - self.t0,
            **self.extra,
        }
        (self.out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _sha(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _table(rows) -> str:
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


# ---------------------------------------------------------------- check

def _witness_rows(params, s, lemma_ids, rescue=True):
    out = {}
    for lid in lemma_ids:
        failed = lemma_applies(lid, params, s)
        if failed:
            out[lid] = {"status": "not_applicable", "reason": failed}
            continue
        try:
            w = construct_witness(lid, params, s, rescue=rescue)
            out[lid] = {"status": "ok", "witness": w.to_dict()}
        except ConstructionFailed as exc:
            out[lid] = {"status": "failed", "reason": str(exc), "label": exc.label}
    return out


def cmd_check(args) -> int:
    params = build_params(args.N, args.s, args.alpha, args.b, args.beta, args.mu, args.lam)
    run = Run(args, "check")
    crit = classify_criticality(params)
    b = params.b if params.b is not None else Fraction(0)
    hyps = lwp_hypotheses(params)
    lwp = all(ok for _, ok in hyps)
    try:
        gwp = classify_gwp(params).value
        if params.lam.imag != 0:
            gwp += " (needs real K: not applicable)"
    except HypothesisViolated as exc:
        gwp = f"undefined ({exc.hypothesis})"
    branches = {"L^beta": LBETA_BRANCH, "L^inf": LINF_BRANCH, "high_regularity": HIGH_REGULARITY}
    wit = {name: _witness_rows(params, None, ids, not args.strict) for name, ids in branches.items()}
    report = {
        "params": {"N": params.N, "s": str(params.s), "alpha": str(params.alpha), "mu": params.mu,
                   "b": None if params.b is None else str(params.b),
                   "beta": None if params.beta is None else str(params.beta)},
        "criticality": crit.value,
        "s_c": str(scaling_index(params.N, params.alpha, b)),
        "lwp": {"applies": lwp, "hypotheses": [{"hypothesis": h, "holds": ok} for h, ok in hyps]},
        "gwp": gwp,
        "witnesses": wit,
    }
    rows = [["lemma", "branch", "status", "case", "sigma", "eps", "min_margin", "note"]]
    for name, group in wit.items():
        for lid, entry in group.items():
            if entry["status"] == "ok":
                w = entry["witness"]
                note = "rescued" if w["notes"] else ""
                rows.append([lid, name, "ok", w["case_label"], w["auxiliary"].get("sigma", ""),
                             w["auxiliary"].get("eps", "-"), min(Fraction(m) for _, m in w["margins"]), note])
            else:
                rows.append([lid, name, entry["status"], "", "", "", "", entry["reason"]])
    print(f"criticality: {crit.value} (s_c = {report['s_c']})")
    print("LWP: " + ("yes" if lwp else "no; fails " + ", ".join(h for h, ok in hyps if not ok)))
    print(f"GWP: {gwp}")
    print(_table(rows))
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.json:
        print(text)
    run.write_text("check.json", text + "\n")
    run.finish()
    return EXIT_OK


# ---------------------------------------------------------------- sweep

SWEEP_HEADER = ["N", "s", "alpha", "b", "lemma", "case_id", "predicted_case", "case_label", "sigma", "eps",
                "min_margin", "status", "reason"]


def _sweep_one(task):
    N, s, alpha, b, beta, mu, lid, rescue = task
    base = [N, s, alpha, b if b is not None else params_b(N, beta)]
    try:
        params = build_params(N, s, alpha, b, beta, mu)
    except InvalidParams as exc:
        return base + [lid, "", "", "", "", "", "", "invalid", exc.hypothesis or str(exc)], False
    failed = lemma_applies(lid, params)
    if failed:
        return base + [lid, "", "", "", "", "", "", "not_applicable", failed], False
    try:
        w = construct_witness(lid, params, rescue=rescue)
    except ConstructionFailed as exc:
        return base + [lid, "", "", "", "", "", "", "failed", f"{exc.label}: {exc}"], True
    return base + [lid, w.case_id, w.predicted_case, w.case_label, w.sigma, w.eps if w.eps is not None else "",
                   w.min_margin, "ok", "; ".join(w.notes)], False


def params_b(N, beta):
    return "" if beta is None else Fraction(N) / beta


def cmd_sweep(args) -> int:
    lemmas = LEMMA_IDS if args.lemma == "all" else tuple(args.lemma.split(","))
    for lid in lemmas:
        if lid not in LEMMA_IDS:
            raise UsageError(f"unknown lemma {lid!r}")
    if (args.b is None) == (args.beta is None):
        raise UsageError("give exactly one of -b or -beta")
    bs = args.b if args.b is not None else [None]
    betas = args.beta if args.beta is not None else [None]
    tasks = [(args.N, s, a, b, be, args.mu, lid, not args.strict)
             for s in args.s for a in args.alpha for b in bs for be in betas for lid in lemmas]
    run = Run(args, "sweep")
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(_sweep_one, tasks))
    rows = [SWEEP_HEADER] + [[_fmt(c) for c in r] for r, _ in results]
    run.write_csv("sweep.csv", rows)
    failures = [r for r, bad in results if bad]
    run.extra["partial"] = bool(failures)
    run.extra["failures"] = len(failures)
    run.finish()
    ok = sum(1 for r, _ in results if r[11] == "ok")
    print(f"{len(results)} rows, {ok} witnesses, {len(failures)} construction failures -> {run.out / 'sweep.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- solve

def _potential_from_config(cfg: dict, N: int, lam: complex):
    pot = cfg.get("potential", {"kind": "constant"})
    kind = pot.get("kind", "constant")
    if kind == "powerlaw":
        return PowerLaw(lam, as_fraction(str(pot["b"])))
    if kind == "constant":
        beta = pot.get("beta")
        return Constant(lam, None if beta is None else as_fraction(str(beta)))
    if kind == "split":
        return Split(as_fraction(str(pot["beta"])), pot.get("bounded", {"kind": "zero"}),
                     pot.get("integrable", {"kind": "zero"}), lam)
    raise InvalidParams(f"unknown potential kind {kind!r}", "potential kind")


def _initial_from_config(cfg: dict, grid: Grid) -> GridField:
    init = cfg.get("initial", {"kind": "gaussian"})
    kind = init.get("kind", "gaussian")
    if kind == "gaussian":
        amp = complex(init.get("amp", 1.0))
        w = float(init.get("width", 1.0))
        c = init.get("center", [0.0] * grid.N)
        r2 = sum((x - float(ci)) ** 2 for x, ci in zip(grid.x, c))
        phase = float(init.get("velocity", 0.0))
        return GridField(grid, amp * np.exp(-r2 / (2 * w * w)) * np.exp(1j * phase * grid.x[0]))
    if kind == "file":
        f = read_field(init["path"])
        if f.grid != grid:
            raise InvalidParams("initial field grid differs from the config grid", "grid match")
        return f
    raise InvalidParams(f"unknown initial kind {kind!r}", "initial kind")


def load_solve_config(path) -> dict:
    cfg = json.loads(Path(path).read_text())
    need = ["N", "M", "L", "T", "dt", "s", "alpha"]
    missing = [k for k in need if k not in cfg]
    if missing:
        raise InvalidParams(f"config misses {missing}", "config fields")
    return cfg


def cmd_solve(args) -> int:
    from .evolution import apriori_bound, picard_solve, realize_potential
    from .evolution.solver import SolveStatus
    cfg = load_solve_config(args.config)
    N, M, L = int(cfg["N"]), int(cfg["M"]), float(cfg["L"])
    budget = args.memory_mb * 2 ** 20
    nt = int(round(float(cfg["T"]) / float(cfg["dt"]))) + 1
    need = 16 * nt * M ** N * 6
    if need > budget:
        raise InvalidParams(f"run needs about {need / 2**20:.0f} MiB, budget is {args.memory_mb} MiB",
                            "memory budget")
    lam = complex(float(cfg.get("lambda_re", 1.0)), float(cfg.get("lambda_im", 0.0)))
    params = ProblemParams(N, as_fraction(str(cfg["s"])), as_fraction(str(cfg["alpha"])),
                           int(cfg.get("mu", 0)), _potential_from_config(cfg, N, lam))
    grid = Grid(N, M, L)
    phi = _initial_from_config(cfg, grid)
    run = Run(args, "solve")
    run.add_input(args.config)
    pot = realize_potential(params, grid)
    chi_T = cfg.get("chi", {}).get("T")
    res = picard_solve(phi, params, float(cfg["T"]), dt=float(cfg["dt"]), tol=float(cfg.get("tol", 1e-10)),
                       max_iter=int(cfg.get("max_iter", 100)), chi_T=None if chi_T is None else float(chi_T),
                       potential=pot)
    tr = res.trace
    run.write_csv("trace.csv", list(tr.rows()))
    summary = tr.summary()
    summary["config"] = cfg
    try:
        gwp = classify_gwp(params)
    except HypothesisViolated:
        gwp = None
    summary["gwp_class"] = None if gwp is None else gwp.value
    if gwp is not None and gwp.value != "local_only" and lam.imag == 0:
        try:
            summary["apriori_bound"] = apriori_bound(params, phi, pot, seed=args.seed).to_dict()
        except BihnlsError as exc:
            summary["apriori_bound"] = {"error": str(exc)}
    run.write_field("initial.bin", phi)
    if tr.status is not SolveStatus.NORM_BLOWUP:
        run.write_field("final.bin", res.snapshot(-1))
    run.write_json("summary.json", summary)
    run.extra["status"] = tr.status.value
    run.finish()
    print(f"status: {tr.status.value}; iterations: {tr.n_iter}; mass drift: {tr.mass_drift():.3e}")
    if tr.status is SolveStatus.NORM_BLOWUP:
        return EXIT_BLOWUP
    if tr.status is SolveStatus.MAX_ITER:
        return EXIT_NOCONV
    return EXIT_OK


# ---------------------------------------------------------------- probes

def _probe_strichartz(args, run):
    from .evolution import strichartz_probe
    pair = LebesguePair.parse(args.pair)
    grid = Grid(args.N, args.M, args.L)
    rep = strichartz_probe(args.N, args.mu, pair, args.trials, grid, T=args.T, seed=args.seed)
    rows = [["trial", "quotient"]] + [[i, repr(q)] for i, q in enumerate(rep.quotients)]
    run.write_csv("probe_strichartz.csv", rows)
    out = rep.to_dict()
    print(f"pair {pair}: max quotient {rep.homogeneous:.10g}; inhomogeneous {rep.inhomogeneous:.6g}")
    return out


def _probe_ckn(args, run):
    from .evolution import ckn_probe
    params = build_params(args.N, args.s, args.alpha, args.b, args.beta, args.mu, args.lam)
    grid = Grid(args.N, args.M, args.L)
    rep = ckn_probe(params, args.trials, grid, seed=args.seed)
    rows = [["trial", "ratio"]] + [[i, repr(r)] for i, r in enumerate(rep.ratios)]
    run.write_csv("probe_ckn.csv", rows)
    print(f"fitted constant {rep.constant:.6g} over {rep.trials} fields")
    return rep.to_dict()


def _probe_kernel(args, run):
    from .littlewood_paley import kernel_Kj
    s = args.s
    q = parse_rational(args.q) if args.q else None
    r = parse_rational(args.r) if args.r else parse_rational("inf")
    if q is None:
        from .exponents import inv
        val = s + args.N * (1 - inv(r))
        if val <= 0:
            raise InvalidParams("no q solves 4/q - N(1-1/r) = s", "kernel exponents")
        q = parse_rational(str(4 / val))
    grid = Grid(args.N, args.M, args.L)
    rows = [["j", "norm", "weighted"]]
    vals = []
    for j in args.j:
        res = kernel_Kj(j, s, args.mu, grid, q, r)
        weighted = 2.0 ** (j * float(s) / 4) * res.norm
        vals.append(weighted)
        rows.append([j, repr(res.norm), repr(weighted)])
    run.write_csv("probe_kernel.csv", rows)
    ratio = max(vals) / min(vals)
    print(_table([["j", "||K_j||", "2^{js/4}||K_j||"]] + [[r_[0], f"{float(r_[1]):.6g}", f"{float(r_[2]):.6g}"]
                                                          for r_ in rows[1:]]))
    print(f"max/min ratio {ratio:.4f}")
    return {"q": str(q), "r": str(r), "ratio": ratio, "weighted": vals}


def _probe_scaling(args, run):
    from .evolution import scaling_check, scaling_exponent
    b = args.b if args.b is not None else Fraction(0)
    params = build_params(args.N, Fraction(1), args.alpha, args.b, args.beta, args.mu, args.lam)
    sc = scaling_index(args.N, args.alpha, b)
    s = sc if args.scale_s == "s_c" else rational(args.scale_s)
    grid = Grid(args.N, args.M, args.L)
    phi = GridField(grid, np.exp(-grid.r2 / (2 * args.width ** 2)))
    ratio = scaling_check(phi, args.k, params, s)
    expected = float(args.k) ** float(scaling_exponent(args.N, s, args.alpha, b))
    run.write_csv("probe_scaling.csv", [["k", "s", "ratio", "expected"], [str(args.k), str(s), repr(ratio),
                                                                          repr(expected)]])
    print(f"k = {args.k}, s = {s} (s_c = {sc}): ratio {ratio:.10g}, expected {expected:.10g}")
    return {"k": str(args.k), "s": str(s), "s_c": str(sc), "ratio": ratio, "expected": expected}


def cmd_probe(args) -> int:
    run = Run(args, f"probe {args.kind}")
    fn = {"strichartz": _probe_strichartz, "ckn": _probe_ckn, "kernel": _probe_kernel,
          "scaling": _probe_scaling}[args.kind]
    out = fn(args, run)
    out["seed"] = args.seed
    run.write_json(f"probe_{args.kind}.json", out)
    run.finish()
    return EXIT_OK


# ---------------------------------------------------------------- besov / scale-test

def cmd_besov(args) -> int:
    from .littlewood_paley import besov_norm_modified, besov_norm_spatial, build_dyadic_partition
    field = read_field(args.field)
    run = Run(args, "besov")
    run.add_input(args.field)
    part = build_dyadic_partition(field.grid, args.flavor, args.mu)
    if args.flavor == "standard":
        val = besov_norm_spatial(field, args.s, args.p, args.q, part)
    else:
        val = besov_norm_modified(field, args.s, args.p, args.q, args.mu, part)
    run.write_csv("besov.csv", [["field", "flavor", "s", "p", "q", "norm"],
                                [Path(args.field).name, args.flavor, str(args.s), args.p, args.q, repr(val)]])
    run.finish()
    print(repr(val))
    return EXIT_OK


def cmd_scale_test(args) -> int:
    from .evolution import homogeneous_norm, scaling_exponent, scaling_transform
    run = Run(args, "scale-test")
    if args.field:
        field = read_field(args.field)
        run.add_input(args.field)
    else:
        grid = Grid(args.N, args.M, args.L)
        field = GridField(grid, np.exp(-grid.r2 / (2 * args.width ** 2)))
    N = field.N
    sc = scaling_index(N, args.alpha, args.b)
    s = sc if args.scale_s == "s_c" else rational(args.scale_s)
    rows = [["k", "s", "ratio", "expected", "rel_err"]]
    base = homogeneous_norm(field, s)
    worst = 0.0
    for k in args.k:
        scaled = scaling_transform(field, k, args.alpha, args.b)
        ratio = homogeneous_norm(scaled, s) / base
        expected = float(k) ** float(scaling_exponent(N, s, args.alpha, args.b))
        err = abs(ratio / expected - 1)
        worst = max(worst, err)
        rows.append([str(k), str(s), repr(ratio), repr(expected), repr(err)])
        if args.write_fields:
            run.write_field(f"scaled_k{str(k).replace('/', '_')}.bin", scaled)
    run.write_csv("scale_test.csv", rows)
    run.finish()
    print(_table(rows))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _common(p):
    p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./bihnls-out)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)


def _param_flags(p, ranges=False):
    kind = rational_range if ranges else rational
    p.add_argument("-N", type=int, required=True)
    p.add_argument("-s", type=kind, required=True)
    p.add_argument("-alpha", type=kind, required=True)
    p.add_argument("-b", type=kind, default=None)
    p.add_argument("-beta", type=kind, default=None)
    p.add_argument("-mu", type=int, default=0, choices=(0, -1))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bihnls", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="classify parameters and build lemma witnesses")
    _param_flags(p)
    p.add_argument("-lam", type=complex_value, default=1.0)
    p.add_argument("--strict", action="store_true", help="no fallback between cases")
    p.add_argument("--json", action="store_true", help="also print the JSON report")
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="witnesses over a lattice of rational parameters")
    _param_flags(p, ranges=True)
    p.add_argument("--lemma", default="L4.1", help="lemma id, comma list, or 'all'")
    p.add_argument("--strict", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("solve", help="Picard solve from a JSON config")
    p.add_argument("config")
    p.add_argument("--memory-mb", type=int, default=2048)
    _common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("probe", help="strichartz | ckn | kernel | scaling probes")
    p.add_argument("kind", choices=("strichartz", "ckn", "kernel", "scaling"))
    p.add_argument("-N", type=int, default=1)
    p.add_argument("-s", type=rational, default=Fraction(1))
    p.add_argument("-alpha", type=rational, default=Fraction(8))
    p.add_argument("-b", type=rational, default=None)
    p.add_argument("-beta", type=rational, default=None)
    p.add_argument("-mu", type=int, default=0, choices=(0, -1))
    p.add_argument("-lam", type=complex_value, default=1.0)
    p.add_argument("-k", type=rational, default=Fraction(2))
    p.add_argument("-j", type=int_range, default=list(range(1, 7)))
    p.add_argument("--pair", default="inf,2")
    p.add_argument("--q", default=None)
    p.add_argument("--r", default=None)
    p.add_argument("--scale-s", default="s_c", help="order for the scaling probe, or s_c")
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("-M", type=int, default=None)
    p.add_argument("-L", type=float, default=None)
    p.add_argument("-T", type=float, default=1.0)
    p.add_argument("--width", type=float, default=2.0)
    _common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("besov", help="Besov norm of a field file")
    p.add_argument("field")
    p.add_argument("-s", type=rational, required=True)
    p.add_argument("--p", default="2")
    p.add_argument("--q", default="2")
    p.add_argument("--flavor", choices=("standard", "modified"), default="standard")
    p.add_argument("-mu", type=int, default=0, choices=(0, -1))
    _common(p)
    p.set_defaults(func=cmd_besov)

    p = sub.add_parser("scale-test", help="scaling identity for a field (Gaussian by default)")
    p.add_argument("--field", default=None)
    p.add_argument("-N", type=int, default=1)
    p.add_argument("-M", type=int, default=1024)
    p.add_argument("-L", type=float, default=32.0)
    p.add_argument("--width", type=float, default=2.0)
    p.add_argument("-alpha", type=rational, required=True)
    p.add_argument("-b", type=rational, default=Fraction(0))
    p.add_argument("-k", type=rational_range, default=[Fraction(2), Fraction(4)])
    p.add_argument("--scale-s", default="s_c")
    p.add_argument("--write-fields", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_scale_test)
    return ap


_PROBE_GRIDS = {"strichartz": (128, 16.0), "ckn": (128, 8.0), "kernel": (256, 64.0), "scaling": (1024, 32.0)}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "probe":
        M, L = _PROBE_GRIDS[args.kind]
        if args.kind == "scaling" and args.N > 1:
            M = 256
        args.M = args.M or M
        args.L = args.L or L
    try:
        return args.func(args)
    except (InvalidParams, UsageError, ValueError, KeyError) as exc:
        hyp = getattr(exc, "hypothesis", "")
        msg = f"error: {exc}" + (f" [hypothesis: {hyp}]" if hyp else "")
        print(msg, file=sys.stderr)
        return EXIT_INVALID
    except BihnlsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
