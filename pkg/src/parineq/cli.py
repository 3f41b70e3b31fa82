"""Command-line interface.

Exit codes: 0 on success, 2 for invalid flags or input data, 1 for any other
failure during computation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

import numpy as np

from . import gof, kernels, simstudy
from .errors import DataError, DomainError
from .ingest import EXAMPLE_COLUMN, EXAMPLE_SCALE, example_dataset_path, load_csv
from .measures import IndexSpec, convergence_curve, estimate_index, estimate_with_ci
from .rng import DEFAULT_SEED, rng_new
from .ustat import DEFAULT_MAX_KERNEL_EVALS, Incomplete

log = logging.getLogger("parineq")

TABLE_PARAMS = "1.1,1.5,2,3,5,10"


class UsageError(ValueError):
    pass


def fmt4(x: float) -> str:
    """Four decimals, ties to even on the shortest decimal form of ``x``."""
    return str(Decimal(repr(float(x))).quantize(Decimal("0.0001"), rounding=ROUND_HALF_EVEN))


def parse_grid(text: str) -> list[float]:
    """Comma list (``1.1,2,5``) or geometric range ``geom:START:STOP:COUNT``."""
    text = text.strip()
    try:
        if text.startswith("geom:"):
            _, start, stop, count = text.split(":")
            count = int(count)
            if count < 1:
                raise UsageError("geom grid needs COUNT >= 1")
            return [float(v) for v in np.geomspace(float(start), float(stop), count)]
        return [float(v) for v in text.split(",") if v.strip()]
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}: {exc}") from exc


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- argument parsing --------------------------------------------------------


def _common_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--threads", type=int, default=1, help="worker threads; never changes results")
    p.add_argument(
        "--max-kernel-evals",
        type=int,
        default=DEFAULT_MAX_KERNEL_EVALS,
        help="refuse exact U-statistics needing more kernel calls than this",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _input_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("input", nargs="?", help="CSV file with the observations")
    p.add_argument("--example", action="store_true", help="use the bundled synthetic GDP dataset")
    p.add_argument("--column", default=None, help="column name or 0-based index (default 0)")
    p.add_argument(
        "--scale",
        type=float,
        default=None,
        help="multiply values by this factor (default 1; 0.001 for --example, i.e. thousands of USD)",
    )
    p.add_argument("--on-bad", choices=("fail", "drop"), default="fail", help="bad-row policy")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parent()
    inputs = _input_parent()
    parser = argparse.ArgumentParser(
        prog="parineq", description="Parametric Gini-type inequality indices G_p and H_q."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", parents=[inputs, common], help="estimate one index")
    est.add_argument("--family", required=True, choices=("gp", "hq", "gini", "igm"))
    est.add_argument("--p", type=float)
    est.add_argument("--q", type=float)
    est.add_argument("--m", type=int, default=2)
    est.add_argument("--ci", action="store_true", help="add a delta-method interval (m = 2)")
    est.add_argument("--level", type=float, default=0.95)
    est.add_argument("--incomplete", type=int, metavar="N", help="average over N random combinations")

    tab = sub.add_parser("table", parents=[inputs, common], help="G_p and H_q over a parameter list")
    tab.add_argument("--params", default=TABLE_PARAMS)

    cur = sub.add_parser("curves", parents=[inputs, common], help="estimate as a function of p or q")
    cur.add_argument("--family", required=True, choices=("gp", "hq"))
    cur.add_argument("--grid", default="geom:1.1:1e6:40")

    kc = sub.add_parser("kernel-curves", parents=[common], help="T(p) or K(q) for one pair")
    kc.add_argument("--kind", required=True, choices=("T", "K"))
    kc.add_argument("--x1", type=float, required=True)
    kc.add_argument("--x2", type=float, required=True)
    kc.add_argument("--grid", default="1.1,2,5,10")

    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo MARE/RMSE study")
    sim.add_argument("--config", help="JSON file with SimConfig fields")
    sim.add_argument("--n-grid", default=None)
    sim.add_argument("--params", default=None)
    sim.add_argument("--families", default=None, help="comma list from GP,HQ")
    sim.add_argument("--n-sim", type=int, default=None)
    sim.add_argument("--truth-draws", type=int, default=None)
    sim.add_argument("--shape", type=float, default=None, help="gamma shape")
    sim.add_argument("--dist-scale", type=float, default=None, help="gamma scale")
    sim.add_argument("--out", required=True, help="output prefix; writes PREFIX_cells.csv/.json")

    g = sub.add_parser("gof", parents=[inputs, common], help="gamma fit with KS and CvM tests")
    g.add_argument("--bootstrap", type=int, default=1000, metavar="B")
    g.add_argument("--table", action="store_true", help="human-readable table instead of JSON")
    g.add_argument("--qq", metavar="PATH", help="also write QQ plot data as CSV")
    return parser


# -- commands ----------------------------------------------------------------


def _load_input(args):
    if args.example and args.input:
        raise UsageError("give either an input file or --example, not both")
    if args.example:
        column = args.column if args.column is not None else EXAMPLE_COLUMN
        scale = EXAMPLE_SCALE if args.scale is None else args.scale
        sample, meta = load_csv(example_dataset_path(), column, scale, args.on_bad)
    elif args.input:
        column = args.column if args.column is not None else 0
        scale = 1.0 if args.scale is None else args.scale
        sample, meta = load_csv(args.input, column, scale, args.on_bad)
    else:
        raise UsageError("an input file (or --example) is required")
    for line, reason in meta.dropped:
        log.warning("dropped line %d: %s", line, reason)
    return sample


def _spec_from_args(args) -> IndexSpec:
    fam = args.family
    if fam == "gp":
        if args.p is None:
            raise UsageError("--family gp needs --p (p > 1)")
        if args.q is not None:
            raise UsageError("--q does not apply to --family gp")
        return IndexSpec("GP", m=args.m, p=args.p)
    if fam == "hq":
        if args.q is None:
            raise UsageError("--family hq needs --q (q > 0)")
        if args.p is not None:
            raise UsageError("--p does not apply to --family hq")
        return IndexSpec("HQ", m=args.m, q=args.q)
    if args.p is not None or args.q is not None:
        raise UsageError(f"--family {fam} takes no --p/--q")
    if fam == "gini" and args.m != 2:
        raise UsageError("--family gini is the m = 2 index; use --family igm for other orders")
    return IndexSpec("LIMIT", m=args.m)


def cmd_estimate(args, out) -> None:
    spec = _spec_from_args(args)
    if args.ci and args.incomplete is not None:
        raise UsageError("--ci and --incomplete cannot be combined")
    sample = _load_input(args)
    opts = dict(threads=args.threads, max_kernel_evals=args.max_kernel_evals)
    if args.ci:
        est = estimate_with_ci(sample, spec, args.level, **opts)
    else:
        mode = None
        if args.incomplete is not None:
            mode = Incomplete(args.incomplete, rng_new(_seed(args)))
        est = estimate_index(sample, spec, mode, **opts)
    out.write(_dump_json(est.to_record()))


def cmd_table(args, out) -> None:
    params = parse_grid(args.params)
    for p in params:
        IndexSpec("GP", p=p)
        IndexSpec("HQ", q=p)
    sample = _load_input(args)
    opts = dict(threads=args.threads, max_kernel_evals=args.max_kernel_evals)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["param", "Gp", "Hq"])
    for p in params:
        gp = estimate_index(sample, IndexSpec("GP", p=p), **opts).point
        hq = estimate_index(sample, IndexSpec("HQ", q=p), **opts).point
        writer.writerow([repr(p), fmt4(gp), fmt4(hq)])
    gini = estimate_index(sample, IndexSpec("LIMIT"), **opts).point
    out.write(f"# gini,{fmt4(gini)}\n")


def cmd_curves(args, out) -> None:
    family = args.family.upper()
    grid = parse_grid(args.grid)
    for v in grid:
        IndexSpec.make(family, v)
    sample = _load_input(args)
    curve = convergence_curve(
        sample, family, grid, threads=args.threads, max_kernel_evals=args.max_kernel_evals
    )
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["param", "estimate", "gini"])
    for param, value in curve.points:
        writer.writerow([repr(param), repr(value), repr(curve.gini)])


def cmd_kernel_curves(args, out) -> None:
    grid = parse_grid(args.grid)
    if args.kind == "T":
        rows = kernels.curve_T(args.x1, args.x2, grid)
    else:
        rows = kernels.curve_K(args.x1, args.x2, grid)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["param", "value"])
    for param, value in rows:
        writer.writerow([repr(param), repr(value)])


def _sim_config(args) -> simstudy.SimConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("simulation config must be a JSON object")
    if args.n_grid is not None:
        data["n_grid"] = [int(v) for v in parse_grid(args.n_grid)]
    if args.params is not None:
        data["param_grid"] = parse_grid(args.params)
    if args.families is not None:
        data["families"] = [f.strip().upper() for f in args.families.split(",") if f.strip()]
    if args.n_sim is not None:
        data["n_sim"] = args.n_sim
    if args.truth_draws is not None:
        data["truth_draws"] = args.truth_draws
    dist = dict(data.get("dist", {}))
    if args.shape is not None:
        dist["shape"] = args.shape
    if args.dist_scale is not None:
        dist["scale"] = args.dist_scale
    if dist:
        data["dist"] = dist
    if args.seed is not None:
        data["master_seed"] = args.seed
    try:
        return simstudy.SimConfig.from_dict(data)
    except TypeError as exc:
        raise UsageError(f"invalid simulation config: {exc}") from exc


def cmd_simulate(args, out) -> None:
    config = _sim_config(args)
    cells = simstudy.run_simulation(config, threads=args.threads)
    prefix = args.out
    csv_path = Path(f"{prefix}_cells.csv")
    json_path = Path(f"{prefix}_cells.json")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(simstudy.cells_to_csv(cells))
    json_path.write_text(simstudy.cells_to_json(config, cells))
    log.info("wrote %s and %s", csv_path, json_path)
    out.write(f"{csv_path}\n{json_path}\n")


def cmd_gof(args, out) -> None:
    sample = _load_input(args)
    report = gof.bootstrap_pvalues(sample, args.bootstrap, rng_new(_seed(args)), threads=args.threads)
    if args.qq:
        with open(args.qq, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["theoretical", "empirical"])
            for t, e in gof.qq_points(sample, report.shape_hat, report.scale_hat):
                writer.writerow([repr(t), repr(e)])
    if args.table:
        rows = [
            ("n", str(report.n)),
            ("shape", fmt4(report.shape_hat)),
            ("scale", fmt4(report.scale_hat)),
            ("KS statistic", fmt4(report.ks_stat)),
            ("KS p-value", fmt4(report.ks_pvalue)),
            ("CvM statistic", fmt4(report.cvm_stat)),
            ("CvM p-value", fmt4(report.cvm_pvalue)),
            ("bootstrap B", str(report.bootstrap_B)),
        ]
        width = max(len(k) for k, _ in rows)
        for k, v in rows:
            out.write(f"{k:<{width}}  {v}\n")
    else:
        out.write(_dump_json(report.to_record()))


def _seed(args) -> int:
    return DEFAULT_SEED if args.seed is None else args.seed


COMMANDS = {
    "estimate": cmd_estimate,
    "table": cmd_table,
    "curves": cmd_curves,
    "kernel-curves": cmd_kernel_curves,
    "simulate": cmd_simulate,
    "gof": cmd_gof,
}


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    out = sys.stdout if out is None else out
    buf = io.StringIO()
    try:
        COMMANDS[args.command](args, buf)
    except (UsageError, DomainError, DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - exit-code contract
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    out.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
