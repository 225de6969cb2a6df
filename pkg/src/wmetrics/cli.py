"""Command-line entry point: ``wmetrics compute | sweep | verify``.

Exit statuses: 0 success, 1 usage or parse error, 2 degenerate data,
3 a stability bound was violated.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .binary import mcc
from .bounds import binary_context, multiclass_constants, verify_bound
from .core import (
    BinaryLabeledData,
    DegenerateLabels,
    MulticlassLabeledData,
    PreconditionViolated,
    WeightVector,
)
from .experiments import SweepConfig, run_sweep
from .multiclass import ZERO_DENOMINATOR, covariance_set, ecc, mpc1, mpc2

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DEGENERATE = 2
EXIT_VIOLATION = 3

PRECONDITION_RETRIES = 1000


class UsageError(Exception):
    pass


class CsvParseError(UsageError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- input CSV -----------------------------------------------------------------


@dataclass
class LabeledCsv:
    truth: np.ndarray
    prediction: np.ndarray
    weight: Optional[np.ndarray]


def read_labeled_csv(lines) -> LabeledCsv:
    """Parse ``truth,prediction[,weight]`` rows; blank and ``#`` lines are skipped."""
    header = None
    truth, pred, weight = [], [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if header is None:
            if fields not in (["truth", "prediction"], ["truth", "prediction", "weight"]):
                raise CsvParseError(lineno, "expected header 'truth,prediction[,weight]'")
            header = fields
            continue
        if len(fields) != len(header):
            raise CsvParseError(lineno, f"expected {len(header)} fields, got {len(fields)}")
        try:
            t, c = int(fields[0]), int(fields[1])
        except ValueError:
            raise CsvParseError(lineno, "class labels must be integers") from None
        if t < 0 or c < 0:
            raise CsvParseError(lineno, "class labels must be non-negative")
        truth.append(t)
        pred.append(c)
        if len(header) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise CsvParseError(lineno, f"weight {fields[2]!r} is not a number") from None
            if not (w > 0 and np.isfinite(w)):
                raise CsvParseError(lineno, f"weight must be positive, got {fields[2]}")
            weight.append(w)
    if header is None:
        raise CsvParseError(0, "missing header")
    if not truth:
        raise CsvParseError(0, "no data rows")
    return LabeledCsv(
        np.array(truth, dtype=np.int64),
        np.array(pred, dtype=np.int64),
        np.array(weight) if len(header) == 3 else None,
    )


def format_value(value: float, digits: int = 12) -> str:
    text = f"{value:.{digits}g}"
    if not any(ch in text for ch in ".eEn"):
        text += ".0"
    return text


def compute_metrics(table: LabeledCsv, mode: str, k: Optional[int] = None) -> list[tuple[str, float]]:
    """Unweighted and weighted metrics for a parsed CSV, as (name, value) pairs."""
    n = table.truth.size
    unit = WeightVector.uniform(n)
    weighted = WeightVector(table.weight) if table.weight is not None else unit
    if mode == "binary":
        if table.truth.max() > 1 or table.prediction.max() > 1:
            raise UsageError("binary mode needs labels in {0, 1}")
        data = BinaryLabeledData(table.truth, table.prediction)
        return [("MCC", mcc(data, unit)), ("WMCC", mcc(data, weighted))]
    if k is None:
        k = max(int(table.truth.max()), int(table.prediction.max())) + 1
        k = max(k, 2)
    if max(table.truth.max(), table.prediction.max()) >= k:
        raise UsageError(f"class index out of range for --k {k}")
    data = MulticlassLabeledData(table.truth, table.prediction, k)
    plain = covariance_set(data, unit)
    heavy = covariance_set(data, weighted)
    return [
        ("ECC", ecc(plain)),
        ("WECC", ecc(heavy)),
        ("MPC1", mpc1(plain)),
        ("WMPC1", mpc1(heavy)),
        ("MPC2", mpc2(plain)),
        ("WMPC2", mpc2(heavy)),
    ]


def cmd_compute(args, out) -> int:
    if args.input == "-":
        table = read_labeled_csv(sys.stdin)
    else:
        with open(args.input, encoding="utf-8") as fh:
            table = read_labeled_csv(fh)
    for name, value in compute_metrics(table, args.mode, args.k):
        out.write(f"{name},{format_value(value)}\n")
    return EXIT_OK


# -- sweep -----------------------------------------------------------------------


def parse_weight_pattern(text: str) -> list[tuple[int, float]]:
    pattern = []
    for item in text.split(","):
        try:
            count, weight = item.split(":")
            pattern.append((int(count), float(weight)))
        except ValueError:
            raise UsageError(f"--weights: cannot parse {item!r}; expected count:weight") from None
    return pattern


def _default_seed() -> int:
    env = os.environ.get("WMETRICS_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"WMETRICS_SEED must be an integer, got {env!r}") from None


def sweep_config_from_args(args) -> SweepConfig:
    def check(ok, flag, message):
        if not ok:
            raise UsageError(f"{flag}: {message}")

    check(args.n >= 1, "--n", "must be at least 1")
    check(args.k == 1 or args.k >= 3, "--k", "must be 1 (binary) or at least 3")
    check(0.0 <= args.p <= 1.0, "--p", "must lie in [0, 1]")
    check(0.0 <= args.p0 <= 1.0, "--p0", "must lie in [0, 1]")
    segment_len = args.segment_len if args.segment_len is not None else args.n // 3
    check(1 <= segment_len <= args.n, "--segment-len", f"must lie in [1, {args.n}]")
    check(args.samples >= 1, "--samples", "must be at least 1")
    pattern = parse_weight_pattern(args.weights)
    check(all(c >= 1 for c, _ in pattern), "--weights", "counts must be positive")
    check(all(w > 0 for _, w in pattern), "--weights", "weights must be positive")
    check(sum(c for c, _ in pattern) == args.n, "--weights", f"counts must sum to --n ({args.n})")
    seed = args.seed if args.seed is not None else _default_seed()
    return SweepConfig(
        n=args.n,
        k=args.k,
        p=args.p,
        p0=args.p0,
        segment_len=segment_len,
        samples=args.samples,
        weight_pattern=pattern,
        seed=seed,
        fixed_truth=args.fix_truth,
    )


def cmd_sweep(args, out) -> int:
    config = sweep_config_from_args(args)
    result = run_sweep(config)
    if args.out in (None, "-"):
        result.write_csv(out)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            result.write_csv(fh)
    if result.redraws:
        print(f"redrew {result.redraws} degenerate samples", file=sys.stderr)
    return EXIT_OK


# -- verify ----------------------------------------------------------------------


def _eps_ceiling(metric: str, data, w: WeightVector) -> float:
    if metric == "mcc":
        return binary_context(data, w).eps_max
    return min(1.0, multiclass_constants(data, w).s / 2)


def _instance_ok(metric: str, data, w: WeightVector) -> bool:
    try:
        if metric == "mcc":
            mcc(data, w)
            return binary_context(data, w).small_m > 0
        ctx = multiclass_constants(data, w)
        return ctx.y_ecc > ZERO_DENOMINATOR and ctx.y_mpc1 > ZERO_DENOMINATOR
    except DegenerateLabels:
        return False


def draw_instance(metric: str, n: int, k: int, low: float, high: float, eps, rng):
    """Random labels and weights meeting the bound's preconditions at ``eps``.

    With ``eps=None`` the chosen eps is half the largest admissible value.
    """
    for _ in range(PRECONDITION_RETRIES):
        w = WeightVector(rng.uniform(low, high, size=n))
        if metric == "mcc":
            data = BinaryLabeledData(rng.integers(0, 2, n), rng.integers(0, 2, n))
        else:
            data = MulticlassLabeledData(rng.integers(0, k, n), rng.integers(0, k, n), k)
        if not _instance_ok(metric, data, w):
            continue
        ceiling = _eps_ceiling(metric, data, w)
        if eps is None:
            return data, w, ceiling / 2
        if eps < ceiling:
            return data, w, eps
    raise PreconditionViolated(
        "could not satisfy preconditions", f"gave up after {PRECONDITION_RETRIES} draws"
    )


def cmd_verify(args, out) -> int:
    metric = args.metric
    n, k = args.n, args.k
    if n < 2:
        raise UsageError("--n: must be at least 2")
    if metric != "mcc" and k < 2:
        raise UsageError("--k: must be at least 2")
    if args.trials < 1:
        raise UsageError("--trials: must be positive")
    try:
        low, high = (float(v) for v in args.weight_range.split(":"))
    except ValueError:
        raise UsageError("--weight-range: expected LOW:HIGH") from None
    if not 0 < low <= high:
        raise UsageError("--weight-range: need 0 < LOW <= HIGH")
    eps = args.eps
    if eps is not None:
        if eps <= 0:
            raise PreconditionViolated("eps > 0", f"--eps must be positive, got {eps}")
        if metric == "mcc" and eps >= 1.0 / n:
            raise PreconditionViolated(
                "eps < min(m/2, 1/N)", f"--eps {eps} is not below 1/N = {1.0 / n:.6g}"
            )
        if metric != "mcc" and eps >= 1.0:
            raise PreconditionViolated("eps < 1", f"--eps {eps} is not below 1")
    seed = args.seed if args.seed is not None else _default_seed()
    rng = np.random.default_rng([seed, 0])
    data, w, eps = draw_instance(metric, n, k, low, high, eps, rng)
    report = verify_bound(metric, data, w, eps, args.trials, seed=[seed, 1])
    out.write(report.summary() + "\n")
    return EXIT_OK if report.violations == 0 else EXIT_VIOLATION


# -- wiring ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wmetrics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="weighted and unweighted metrics for a CSV file")
    p.add_argument("input", help="CSV with header truth,prediction[,weight]; '-' for stdin")
    p.add_argument("--mode", choices=("binary", "multi"), default="binary")
    p.add_argument("--k", type=int, default=None, help="number of classes (multi mode)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="segment-sweep experiment as CSV")
    p.add_argument("--n", type=int, default=150)
    p.add_argument("--k", type=int, default=1, help="1 for binary, else number of classes")
    p.add_argument("--p", type=float, default=1.0, help="match proportion inside the segment")
    p.add_argument("--p0", type=float, default=0.5, help="match proportion elsewhere")
    p.add_argument("--segment-len", type=int, default=None, help="default: n // 3")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help="default: $WMETRICS_SEED or 0")
    p.add_argument("--weights", default="50:1,50:100,50:10000", help="count:weight,...")
    p.add_argument("--fix-truth", action="store_true", help="reuse one truth vector for all samples")
    p.add_argument("--out", default=None, help="output path; stdout when omitted")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check a stability bound against random weight perturbations")
    p.add_argument("--metric", choices=("mcc", "ecc", "mpc1", "mpc2"), default="mcc")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--eps", type=float, default=None, help="default: half the admissible maximum")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None, help="default: $WMETRICS_SEED or 0")
    p.add_argument("--weight-range", default="1:10", help="weights drawn uniformly from LOW:HIGH")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except DegenerateLabels as exc:
        print(f"error: degenerate labels: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except PreconditionViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
