"""Command-line interface: ``wilks-ergm {fit,test,check,simulate-qq,simulate-power}``.

Exit codes: 0 success, 2 unreadable or malformed input, 3 no MLE (or too
many failed replicates), 4 solver did not converge, 5 invalid arguments.
Errors print one line ``error: <Kind>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .beta import beta_fit_mle
from .bt import bt_fit_mle
from .data import beta_existence_check, ford_existence_check, parse_bt_csv, parse_graph_csv
from .errors import (
    DimensionMismatch,
    InvalidTiedSet,
    NoMleExists,
    NotConverged,
    ParseError,
    TooManyFailures,
    WilksError,
)
from .simulate import SimConfig, power_csv, power_grid, run_power_experiment, run_qq_experiment
from .stats import (
    beta_composite_test,
    beta_simple_test,
    bt_composite_test,
    bt_simple_test,
    condition_report,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_MLE = 3
EXIT_NOT_CONVERGED = 4
EXIT_INVALID = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: InvalidArguments: {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.10g}"
    return str(x)


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _kv(items) -> str:
    lines = []
    for key, value in items:
        if isinstance(value, (list, tuple, np.ndarray)):
            value = ",".join(_fmt(v) for v in value)
        lines.append(f"{key}={_fmt(value)}")
    return "\n".join(lines) + "\n"


def _table(items) -> str:
    width = max(len(k) for k, _ in items)
    return "\n".join(f"{k:<{width}}  {_fmt(v)}" for k, v in items) + "\n"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _load(args):
    text = _read(args.input)
    if args.model == "bt":
        return parse_bt_csv(text, args.n)
    return parse_graph_csv(text, args.n)


def _load_vector(path: str, n: int) -> np.ndarray:
    values = []
    for raw in _read(path).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.extend(float(f) for f in line.replace(",", " ").split())
        except ValueError:
            raise ParseError(f"{path}: non-numeric entry in {line!r}") from None
    if len(values) != n:
        raise DimensionMismatch(f"{path}: expected {n} values, got {len(values)}")
    return np.array(values)


def _load_labels(path: str | None, n: int) -> list[str]:
    if path is None:
        return [str(i + 1) for i in range(n)]
    names = [line.strip() for line in _read(path).splitlines() if line.strip()]
    if len(names) != n:
        raise DimensionMismatch(f"{path}: expected {n} labels, got {len(names)}")
    return names


def _parse_tied(text: str, n: int) -> list[int]:
    try:
        labels = [int(f) for f in text.split(",") if f.strip()]
    except ValueError:
        raise InvalidTiedSet(f"--tied must be comma-separated vertex labels, got {text!r}") from None
    if len(set(labels)) < 2:
        raise InvalidTiedSet(f"--tied needs at least two distinct vertices, got {text!r}")
    bad = [v for v in labels if not 1 <= v <= n]
    if bad:
        raise InvalidTiedSet(f"--tied labels outside 1..{n}: {bad}")
    return [v - 1 for v in labels]


def _csv_list(cast):
    def parse(text):
        try:
            return [cast(f.strip()) for f in text.split(",") if f.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
    return parse


def _ln_value(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def cmd_fit(args) -> int:
    data = _load(args)
    labels = _load_labels(args.labels, data.n)
    if args.model == "bt":
        ref = args.reference - 1
        fit = bt_fit_mle(data, reference=ref)
    else:
        if args.reference != 1:
            raise UsageError("--reference applies to the Bradley-Terry model only")
        fit = beta_fit_mle(data)
    merits = fit.merits
    header = [
        ("model", fit.model),
        ("n", data.n),
        ("loglik", fit.loglik),
        ("iterations", fit.iterations),
        ("residual", fit.residual),
        ("existence", fit.existence.describe()),
    ]
    if args.format == "kv":
        _emit(_kv(header + [("labels", labels), ("beta", fit.beta), ("merit", merits)]), args.output)
    elif args.format == "csv":
        rows = ["vertex,label,beta,merit"]
        rows += [f"{i + 1},{labels[i]},{_fmt(b)},{_fmt(w)}" for i, (b, w) in enumerate(zip(fit.beta, merits))]
        _emit("\n".join(rows) + "\n", args.output)
    else:
        width = max(6, max(len(s) for s in labels))
        lines = [_table(header), f"{'vertex':<{width}}  {'beta':>10}  {'merit':>8}"]
        lines += [f"{labels[i]:<{width}}  {b:>10.6f}  {w:>8.3f}" for i, (b, w) in enumerate(zip(fit.beta, merits))]
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_test(args) -> int:
    if (args.null is None) == (args.tied is None):
        raise UsageError("give exactly one of --null FILE or --tied i,j,...")
    data = _load(args)
    if args.tied is not None:
        tied = _parse_tied(args.tied, data.n)
        if args.model == "bt":
            if args.tied_value is not None:
                raise UsageError("--tied-value applies to the beta-model only")
            report = bt_composite_test(data, tied)
        else:
            report = beta_composite_test(data, tied, value=args.tied_value)
    else:
        null = _load_vector(args.null, data.n)
        if args.model == "bt":
            null = null - null[0]
            report = bt_simple_test(data, null)
        else:
            report = beta_simple_test(data, null)
    items = list(report.to_dict().items())
    if args.format == "kv":
        _emit(_kv(items), args.output)
    elif args.format == "csv":
        keys, values = zip(*items)
        _emit(",".join(keys) + "\n" + ",".join("" if v is None else _fmt(v) for v in values) + "\n", args.output)
    else:
        _emit(_table(items), args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    data = _load(args)
    verdict = ford_existence_check(data) if args.model == "bt" else beta_existence_check(data)
    items = [("model", args.model), ("n", data.n), ("existence", verdict.describe())]
    beta = None
    if args.beta is not None:
        beta = _load_vector(args.beta, data.n)
        items.append(("condition_at", "supplied"))
    elif verdict:
        try:
            beta = (bt_fit_mle(data) if args.model == "bt" else beta_fit_mle(data)).beta
            items.append(("condition_at", "mle"))
        except NoMleExists as exc:
            items[-1] = ("existence", str(exc))
    if beta is not None:
        items += [(k, v) for k, v in condition_report(args.model, beta).to_dict().items() if k not in ("model", "n")]
    _emit(_kv(items) if args.format == "kv" else _table(items), args.output)
    return EXIT_OK


def _check_sim_args(args):
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")


def cmd_simulate_qq(args) -> int:
    _check_sim_args(args)
    try:
        cfg = SimConfig(args.model, args.n, _ln_value(args.Ln), args.r, K=args.K,
                        replicates=args.reps, base_seed=args.seed,
                        tied_value=None if args.free_tie else 0.0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    summary = run_qq_experiment(cfg, args.null_kind, workers=args.workers)
    _emit(summary.to_csv(), args.output)
    print(f"# ks_distance={summary.ks_distance:.6f} failures={summary.failed_replicates} "
          f"replicates={summary.replicates}", file=sys.stderr)
    if args.plot:
        write_qq_plot(summary, args.plot, title=f"{args.model} {args.null_kind} n={args.n} Ln={args.Ln}")
    return EXIT_OK


def cmd_simulate_power(args) -> int:
    _check_sim_args(args)
    try:
        cells = power_grid(args.model, args.n, [_ln_value(v) for v in args.Ln], args.r or [None], args.c,
                           K=args.K, replicates=args.reps, base_seed=args.seed, alpha=args.alpha,
                           tail=args.tail, tied_value=None if args.free_tie else 0.0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = run_power_experiment(cells, workers=args.workers)
    _emit(power_csv(rows), args.output)
    for row in rows:
        if row.too_many_failures:
            print(f"warning: TooManyFailures: {row.csv_row()}", file=sys.stderr)
    return EXIT_OK


def write_qq_plot(summary, path: str, title: str = ""):
    """Static QQ scatter against N(0, 1) with the y = x reference line."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.scatter(summary.theoretical, summary.empirical, s=6, color="k")
    lo = float(min(summary.theoretical.min(), summary.empirical.min()))
    hi = float(max(summary.theoretical.max(), summary.empirical.max()))
    ax.plot([lo, hi], [lo, hi], color="tab:red", lw=1)
    ax.set_xlabel("theoretical quantiles")
    ax.set_ylabel("empirical quantiles")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
    plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wilks-ergm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="BT rows i,j,wins_ij,wins_ji or graph rows i,j")
        p.add_argument("--model", choices=("bt", "beta"), required=True)
        p.add_argument("--n", type=int, default=None, help="vertex count (default: largest label)")
        p.add_argument("--output", default=None, help="write here instead of stdout")
        return p

    p = data_cmd("fit", "maximum likelihood fit")
    p.add_argument("--reference", type=int, default=1, help="BT vertex whose merit is 1 (1-based)")
    p.add_argument("--labels", default=None, help="file with one vertex name per line")
    p.add_argument("--format", choices=("table", "csv", "kv"), default="table")
    p.set_defaults(func=cmd_fit)

    p = data_cmd("test", "normalised likelihood-ratio test")
    p.add_argument("--null", default=None, help="file of null parameters (simple null)")
    p.add_argument("--tied", default=None, help="comma-separated labels sharing a parameter")
    p.add_argument("--tied-value", type=float, default=None,
                   help="beta-model: pin the tied group to this value instead of leaving it free")
    p.add_argument("--format", choices=("table", "csv", "kv"), default="table")
    p.set_defaults(func=cmd_test)

    p = data_cmd("check", "MLE existence and growth-condition quantities")
    p.add_argument("--beta", default=None, help="parameter file for the condition quantities")
    p.add_argument("--format", choices=("table", "kv"), default="table")
    p.set_defaults(func=cmd_check)

    def sim_cmd(name, help_text, listy):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--model", choices=("bt", "beta"), required=True)
        ints = _csv_list(int) if listy else int
        p.add_argument("--n", type=ints, required=True)
        p.add_argument("--Ln", type=_csv_list(str) if listy else str, default=["zero"] if listy else "zero",
                       help="zero, log_log_n, sqrt_log_n, log_n or a number")
        p.add_argument("--r", type=ints, default=None)
        p.add_argument("--K", type=int, default=1)
        p.add_argument("--reps", type=int, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--free-tie", action="store_true",
                       help="beta-model composite null with a free common value (default pins it at 0)")
        p.add_argument("--output", default=None)
        return p

    p = sim_cmd("simulate-qq", "null distribution QQ experiment", listy=False)
    p.add_argument("--null-kind", choices=("simple", "composite"), default="simple")
    p.add_argument("--plot", default=None, help="write a static QQ plot (e.g. qq.svg)")
    p.set_defaults(func=cmd_simulate_qq)

    p = sim_cmd("simulate-power", "rejection rates of the composite test over a grid", listy=True)
    p.add_argument("--c", type=_csv_list(float), default=[0.0])
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--tail", choices=("two-sided", "upper"), default="two-sided")
    p.set_defaults(func=cmd_simulate_power)
    return parser


_EXIT_CODES = (
    (ParseError, EXIT_PARSE),
    ((NoMleExists, TooManyFailures), EXIT_NO_MLE),
    (NotConverged, EXIT_NOT_CONVERGED),
    ((UsageError, WilksError, ValueError), EXIT_INVALID),
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, WilksError, ValueError) as exc:
        code = next(code for types, code in _EXIT_CODES if isinstance(exc, types))
        kind = "InvalidArguments" if isinstance(exc, UsageError) else type(exc).__name__
        print(f"error: {kind}: {' '.join(str(exc).split())}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
