"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Outputs default to ``$NETGROWTH_OUTPUT_DIR`` (or the working directory) and
every file starts with a provenance record.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as X
from .curvefit import ConvergenceError, CurveFitError, fit_avg_degree_curve
from .events import EventParseError, read_events
from .models import (
    InvalidParameters,
    ModelIIParams,
    ModelIParams,
    invert_model_ii,
    load_params,
    model_ii_curve_params,
    predicted_avg_degree,
    predicted_avg_degree_model_i,
    predicted_edge_fractions,
    predicted_edge_fractions_model_ii,
    simulate_barabasi_albert,
    simulate_dorogovtsev,
    simulate_model_ii,
    simulate_vazquez,
    simulate_vertex_copying,
)
from .models.closed_form import time_at_nodes
from .powerlaw import FitError, fit_exponent
from .stream import (
    fit_snapshots,
    replay,
    shuffle_events,
    trajectory_rows,
    write_distribution_csv,
    write_trajectory_csv,
)

DEFAULT_SEED = 20130101
OUTPUT_ENV = "NETGROWTH_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

MODELS = ("model1", "model2", "barabasi_albert", "dorogovtsev", "vazquez", "copying")
RECIPES = ("fig9", "fig10", "occupy-fit", "facebook-fit")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Run:
    """Output bookkeeping for one invocation.

    Files are written to a temporary sibling and renamed once complete; if
    the command fails, everything written so far is removed.
    """

    def __init__(self, argv, seed, out_dir: Path):
        self.argv = list(argv)
        self.seed = seed
        self.out_dir = out_dir
        self.written: list[Path] = []
        self.pending: list[Path] = []

    @property
    def provenance(self) -> str:
        cmd = " ".join(["netgrowth", *self.argv])
        return f"netgrowth {__version__}\ncommand: {cmd}\nseed: {self.seed}"

    def provenance_dict(self) -> dict:
        return {"version": __version__, "command": " ".join(["netgrowth", *self.argv]), "seed": self.seed}

    def path(self, explicit: str | None, default_name: str) -> Path:
        if explicit:
            p = Path(explicit)
            if not p.parent.exists():
                raise UsageError(f"output directory {p.parent} does not exist")
            return p
        return self.out_dir / default_name

    @contextmanager
    def open(self, path: Path):
        tmp = path.with_name(path.name + ".part")
        self.pending.append(tmp)
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
        os.replace(tmp, path)
        self.pending.remove(tmp)
        self.written.append(path)

    def write_json(self, path: Path, payload: dict):
        body = {"provenance": self.provenance_dict(), **payload}
        with self.open(path) as fh:
            json.dump(body, fh, indent=2, sort_keys=False, default=_json_default)
            fh.write("\n")

    def write_csv(self, path: Path, header, rows):
        with self.open(path) as fh:
            for line in self.provenance.splitlines():
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(x) for x in row])

    def rollback(self):
        for p in self.pending + self.written:
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _cell(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return repr(x) if np.isfinite(x) else "nan"
    return str(x)


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file {p} not found")
    return p


# -- parameters -------------------------------------------------------------


def _model_params(args):
    if args.params:
        params = load_params(_existing(args.params))
        if args.model == "model1" and isinstance(params, ModelIIParams):
            if params.p or params.q:
                raise UsageError("model1 takes no p or q")
            params = ModelIParams(params.r, params.s, params.N0, params.H0)
        if args.model == "model2" and isinstance(params, ModelIParams):
            params = params.as_model_ii()
        return params
    missing = [f"--{k}" for k in ("r", "s", "n0", "h0") if getattr(args, k) is None]
    if missing:
        raise UsageError(f"{args.model} needs {', '.join(missing)} or --params")
    if args.model == "model1":
        if args.p or args.q:
            raise UsageError("model1 takes no --p or --q")
        return ModelIParams(r=args.r, s=args.s, N0=args.n0, H0=args.h0)
    return ModelIIParams(p=args.p or 0.0, q=args.q or 0.0, r=args.r, s=args.s, N0=args.n0, H0=args.h0)


def _add_rate_flags(p):
    p.add_argument("--params", help="JSON file with r, s, N0, H0 (and p, q for Model II)")
    p.add_argument("--p", type=float, help="influenced-node rate")
    p.add_argument("--q", type=float, help="root-node rate")
    p.add_argument("--r", type=float, help="random-edge rate")
    p.add_argument("--s", type=float, help="homophily rate")
    p.add_argument("--n0", type=int, help="initial node count")
    p.add_argument("--h0", type=int, help="initial homophily edge count")


# -- commands ---------------------------------------------------------------


def cmd_generate(args, run: _Run):
    out = run.path(args.output, f"{args.model}.tsv")
    target = args.target
    if args.model in ("model1", "model2"):
        params = _model_params(args)
        log = simulate_model_ii(params, target, args.seed, init=args.init)
    elif args.model == "barabasi_albert":
        log = simulate_barabasi_albert(args.m, target, args.seed)
    elif args.model == "dorogovtsev":
        log = simulate_dorogovtsev(args.c_rate, target, args.seed)
    elif args.model == "vazquez":
        log = simulate_vazquez(args.u, target, args.seed)
    else:
        log = simulate_vertex_copying(args.q_copy, target, args.seed, out_degree=args.out_degree)
    with run.open(out) as fh:
        log.write_tsv(fh, run.provenance)
    print(f"wrote {len(log)} events to {out}")


def cmd_analyze(args, run: _Run):
    src = _existing(args.input)
    prefix = args.prefix or src.stem
    traj_path = run.out_dir / f"{prefix}_trajectory.csv"
    dist_path = run.out_dir / f"{prefix}_distribution.csv"
    events = read_events(src, strict=args.strict)
    tr = replay(events)
    if not tr.snapshots:
        raise ValueError(f"stream reaches only {tr.final.n} nodes; the first snapshot is at 32")
    fits = None if args.no_fit else fit_snapshots(tr, min_tail=args.min_tail)
    rows = trajectory_rows(tr, fits, applied=args.applied)
    with run.open(traj_path) as fh:
        write_trajectory_csv(fh, rows, run.provenance)
    with run.open(dist_path) as fh:
        write_distribution_csv(fh, tr, args.base, run.provenance)
    print(f"wrote {len(rows)} snapshots to {traj_path} and {dist_path}")
    if tr.skipped["self_loops"] or tr.skipped["duplicates"]:
        print(f"skipped {tr.skipped['self_loops']} self-loops and {tr.skipped['duplicates']} repeated edges")


def _read_values(path: Path) -> np.ndarray:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            try:
                values.append(float(body.split()[0].rstrip(",")))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {line.strip()!r}") from None
    return np.asarray(values)


def cmd_fit_exponent(args, run: _Run):
    src = _existing(args.input)
    out = run.path(args.output, f"{src.stem}_exponent.json")
    if args.events:
        values = replay(read_events(src)).final.degrees()
    else:
        values = _read_values(src)
    report = fit_exponent(values, min_tail=args.min_tail, max_candidates=args.max_candidates)
    payload = report.to_dict()
    if not args.all_candidates:
        payload.pop("candidates")
    run.write_json(out, payload)
    print(f"alpha_opt={report.alpha_opt:.4f} x_opt={report.x_opt:g} "
          f"alpha_set=[{report.alpha_set_min:.4f}, {report.alpha_set_max:.4f}] -> {out}")


def _read_curve_points(path: Path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path} holds no data")
    first = lines[0].strip().split(",")
    if "n" in first and "avg_degree" in first:
        reader = csv.DictReader(io.StringIO("".join(lines)))
        rows = [(float(r["n"]), float(r["avg_degree"])) for r in reader]
    else:
        rows = []
        for ln in lines:
            parts = ln.replace(",", " ").split()
            rows.append((float(parts[0]), float(parts[1])))
    return rows


def cmd_fit_avgdeg(args, run: _Run):
    src = _existing(args.input)
    out = run.path(args.output, f"{src.stem}_avgdeg.json")
    points = [(n, d) for n, d in _read_curve_points(src) if n >= args.min_n]
    curve = fit_avg_degree_curve(points, with_constant=not args.power_only)
    run.write_json(out, {**curve.to_dict(), "points": len(points)})
    print(f"a={curve.a:.6g} b={curve.b:.6g} c={curve.c:.6g} rmse={curve.rmse:.4g} -> {out}")


def cmd_classify(args, run: _Run):
    src = _existing(args.input)
    out = run.path(args.output, f"{src.stem}_events.csv")
    tr = replay(read_events(src))
    counts = tr.applied_counts if args.applied else tr.raw_counts
    rows = []
    for c in counts:
        e, a = c.ratios("edges"), c.ratios("all")
        rows.append([c.window[0], c.window[1], c.z, c.r, c.i, c.h,
                     e["R"], e["I"], e["H"], e["Z"], a["R"], a["I"], a["H"]])
    header = ["n_low", "n_high", "z", "r", "i", "h", "ratio_R", "ratio_I", "ratio_H", "ratio_Z",
              "ratio_R_all", "ratio_I_all", "ratio_H_all"]
    run.write_csv(out, header, rows)
    print(f"wrote {len(rows)} windows to {out}")


def cmd_shuffle(args, run: _Run):
    src = _existing(args.input)
    out = run.path(args.output, f"{src.stem}_shuffled.tsv")
    shuffled = shuffle_events(read_events(src), args.seed, edges_only=args.edges_only)
    with run.open(out) as fh:
        shuffled.write_tsv(fh, run.provenance)
    print(f"wrote {len(shuffled)} events to {out}")


def cmd_predict(args, run: _Run):
    params = _model_params(args)
    out = run.path(args.output, "prediction.csv")
    pr = params.as_model_ii() if isinstance(params, ModelIParams) else params
    n = np.array([2**i for i in range(1, 63) if pr.N0 <= 2**i <= args.n_max], dtype=float)
    if n.size == 0:
        raise UsageError(f"--n-max must reach a power of two at or above N0={pr.N0}")
    t = time_at_nodes(pr, n)
    avg = predicted_avg_degree(pr, n)
    header = ["n", "t", "avg_degree"]
    cols = [n.astype(np.int64), t, avg]
    if isinstance(params, ModelIParams):
        rnd, hom = predicted_edge_fractions(params, t)
        header += ["avg_degree_model_i", "random_fraction", "homophily_fraction"]
        cols += [predicted_avg_degree_model_i(params, n), rnd, hom]
    else:
        fr, fi, fh = predicted_edge_fractions_model_ii(pr, t)
        header += ["random_fraction", "influence_fraction", "homophily_fraction"]
        cols += [fr, fi, fh]
    a, b, c = model_ii_curve_params(pr)
    run.write_csv(out, header, zip(*cols))
    print(f"a={a:.6g} b={b:.6g} c={c:.6g}; wrote {n.size} rows to {out}")


def cmd_invert(args, run: _Run):
    params = invert_model_ii(args.a, args.b, args.c, r=args.r, node_rate=args.rate, H0=args.h0)
    # trim float noise such as 0.0020000000000000087
    values = {k: round(v, 12) if isinstance(v, float) else v for k, v in params.to_dict().items()}
    text = json.dumps({"provenance": run.provenance_dict(), **values}, indent=2)
    if args.output:
        run.write_json(run.path(args.output, ""), values)
    print(text)


def cmd_reproduce(args, run: _Run):
    name = args.recipe
    kw = {"workers": args.workers, "seed_offset": args.seed}
    if name == "fig10":
        target = args.target or 2**16
        rows = X.fig10(args.seeds or 40, target, **kw)
        header = ["s", "n0", "b_calculated", "b_estimated", "b_seed_mean", "abs_diff"]
        table = [[r.s, r.n0, r.b_calculated, r.b_estimated, r.b_seed_mean,
                  abs(r.b_estimated - r.b_calculated)] for r in rows]
        run.write_csv(run.out_dir / "fig10.csv", header, table)
        _print_table(header, table)
    elif name == "fig9":
        target = args.target or 2**16
        rows = X.fig9(args.seeds or 40, target, **kw)
        header = ["s", "n0", "n", "median_alpha_opt"]
        table = [[r.s, r.n0, n, a] for r in rows for n, a in zip(r.n, r.median_alpha)]
        run.write_csv(run.out_dir / "fig9.csv", header, table)
        _print_table(header, table)
    else:
        fn = X.occupy_fit if name == "occupy-fit" else X.facebook_fit
        res = fn(args.seeds or (20 if name == "occupy-fit" else 5),
                 args.target or (2**17 if name == "occupy-fit" else 2**15), **kw)
        header = ["n", "mean_avg_degree", "published_curve", "relative_error"]
        table = [list(row) for row in zip(res.n, res.mean_avg_degree, res.published_curve,
                                          res.relative_error)]
        stem = name.replace("-", "_")
        run.write_csv(run.out_dir / f"{stem}.csv", header, table)
        run.write_json(run.out_dir / f"{stem}.json", {
            "params": res.params.to_dict(),
            "published": dict(zip("abc", res.published)),
            "closed_form": dict(zip("abc", res.closed_form)),
            "refit": res.refit.to_dict(),
        })
        _print_table(header, table)
        print(f"closed form a,b,c = {res.closed_form}; refit a={res.refit.a:.4g} "
              f"b={res.refit.b:.4g} c={res.refit.c:.4g}")


def _print_table(header, rows):
    print("\t".join(header))
    for row in rows:
        print("\t".join(f"{x:.4g}" if isinstance(x, float) else str(x) for x in row))


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netgrowth", description="Growing-network simulation and analysis.")
    parser.add_argument("--version", action="version", version=f"netgrowth {__version__}")
    parser.add_argument("--out-dir", help=f"output directory (default ${OUTPUT_ENV} or .)")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"random seed (default {DEFAULT_SEED})")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="simulate a growth model and write its event log")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--target", type=int, required=True, help="node count (steps for vazquez)")
    _add_rate_flags(p)
    p.add_argument("--init", choices=("mean_field", "isolated"), default="mean_field")
    p.add_argument("--m", type=int, default=2, help="edges per new node (barabasi_albert)")
    p.add_argument("--c-rate", type=int, default=1, help="edges per step (dorogovtsev)")
    p.add_argument("--u", type=float, default=0.5, help="triangle-closing probability (vazquez)")
    p.add_argument("--q-copy", type=float, default=0.5, help="copy probability (copying)")
    p.add_argument("--out-degree", type=int, default=2, help="links per node (copying)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="replay an event log into trajectory and distribution CSVs")
    p.add_argument("input")
    p.add_argument("--prefix", help="output file prefix (default: input stem)")
    p.add_argument("--min-tail", type=int, default=10)
    p.add_argument("--base", type=float, default=2.0, help="bin growth factor")
    p.add_argument("--applied", action="store_true", help="ratios over applied events only")
    p.add_argument("--no-fit", action="store_true", help="skip exponent fits")
    p.add_argument("--strict", action="store_true", help="reject decreasing timestamps")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fit-exponent", help="power-law exponent with KS-selected xmin")
    p.add_argument("input", help="one value per line, or an event log with --events")
    p.add_argument("--events", action="store_true", help="fit the final degrees of an event log")
    p.add_argument("--min-tail", type=int, default=10)
    p.add_argument("--max-candidates", type=int, default=500)
    p.add_argument("--all-candidates", action="store_true", help="include every scored xmin")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fit_exponent)

    p = sub.add_parser("fit-avgdeg", help="fit a + c n^b to (n, average degree) points")
    p.add_argument("input", help="trajectory CSV or two-column n, avg_degree file")
    p.add_argument("--min-n", type=float, default=1)
    p.add_argument("--power-only", action="store_true", help="fit c n^b without the constant")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fit_avgdeg)

    p = sub.add_parser("classify", help="Z/R/I/H counts and ratios per size window")
    p.add_argument("input")
    p.add_argument("--applied", action="store_true", help="count applied events only")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("shuffle", help="randomly permute an event log")
    p.add_argument("input")
    p.add_argument("--edges-only", action="store_true", help="keep node-only events in place")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_shuffle)

    p = sub.add_parser("predict", help="closed-form trajectories at n = 2^i")
    p.add_argument("--model", choices=("model1", "model2"), default="model2")
    _add_rate_flags(p)
    p.add_argument("--n-max", type=int, default=2**17)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("invert", help="Model II parameters from curve parameters (a, b, c)")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--rate", type=float, default=0.1, help="total node rate D = p + q + 2r")
    p.add_argument("--h0", type=int, default=2)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("reproduce", help="run a named simulation experiment")
    p.add_argument("recipe", choices=RECIPES)
    p.add_argument("--seeds", type=int, help="number of seeds, starting at --seed")
    p.add_argument("--target", type=int, help="final node count")
    p.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    p.set_defaults(func=cmd_reproduce)

    # --seed may also follow the subcommand; SUPPRESS keeps the global value otherwise
    for child in sub.choices.values():
        child.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "reproduce" and "--seed" not in argv:
        args.seed = 0
    out_dir = Path(args.out_dir or os.environ.get(OUTPUT_ENV) or ".")
    run = _Run(argv, args.seed, out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        args.func(args, run)
    except UsageError as exc:
        run.rollback()
        print(f"netgrowth: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        run.rollback()
        print(f"netgrowth: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (EventParseError, FitError, CurveFitError, InvalidParameters, ValueError, OSError) as exc:
        run.rollback()
        print(f"netgrowth: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BaseException:
        run.rollback()
        raise
    return EXIT_OK
