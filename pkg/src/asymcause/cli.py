"""Command-line workflow: ingest CSVs, run the test pipeline, render reports.

Subcommands:
  run        full causality analysis of two series, text or json report
  decompose  emit the positive/negative components of one series as CSV
  mc-size    empirical size/power study of the hypothesis catalog
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .decomposition import DeterministicSpec, Series, decompose
from .errors import AsymCauseError, DataError
from .mgarch import arch_lm_diag, fit_sure_garch_t
from .montecarlo import DgpConfig, empirical_size
from .sure import CRITERIA, build_design, fgls_fit, lag_order_table
from .wald import run_catalog

P_VALUE_FLOOR = 1e-5  # below this the text renderer prints "< 0.00001"
ARCH_GATE_LEVEL = 0.05  # fixed gate for the auto estimator choice


@dataclass(frozen=True)
class AnalysisConfig:
    """Everything needed to reproduce one pipeline run."""

    inputs: tuple[str, ...]
    log_transform: bool = False
    deterministic: DeterministicSpec = DeterministicSpec("drift")
    p_max: int = 8
    criterion: str = "sbc"
    fixed_lags: Optional[tuple[int, int]] = None
    extra_lags: int = 1
    estimator: str = "auto"
    level: float = 0.05
    seed: int = 0
    output: Optional[str] = None
    output_format: str = "text"
    date_column: str = "DATE"
    value_column: str = "VALUE"
    names: Optional[tuple[str, ...]] = None
    sum_restrictions: bool = False
    arch_lags: int = 1

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if len(self.inputs) < 2:
            raise ValueError("need at least two input files")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must be in (0, 1)")
        if self.estimator not in ("fgls", "garch_t", "auto"):
            raise ValueError("estimator must be fgls, garch_t or auto")
        if self.output_format not in ("text", "json"):
            raise ValueError("format must be text or json")
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    def to_dict(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "log_transform": self.log_transform,
            "deterministic": self.deterministic.kind,
            "p_max": self.p_max,
            "criterion": self.criterion,
            "fixed_lags": list(self.fixed_lags) if self.fixed_lags else None,
            "extra_lags": self.extra_lags,
            "estimator": self.estimator,
            "level": self.level,
            "seed": self.seed,
            "date_column": self.date_column,
            "value_column": self.value_column,
            "names": list(self.names) if self.names else None,
            "sum_restrictions": self.sum_restrictions,
            "arch_lags": self.arch_lags,
        }


@dataclass(frozen=True)
class Report:
    """Machine-readable analysis result; all fields are plain JSON types."""

    config: dict
    estimates: list
    hypotheses: list
    diagnostics: dict
    provenance: dict

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "estimates": self.estimates,
            "hypotheses": self.hypotheses,
            "diagnostics": self.diagnostics,
            "provenance": self.provenance,
        }
        return json.dumps(payload, indent=2)


def parse_report(text: str) -> Report:
    data = json.loads(text)
    return Report(
        config=data["config"],
        estimates=data["estimates"],
        hypotheses=data["hypotheses"],
        diagnostics=data["diagnostics"],
        provenance=data["provenance"],
    )


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------


def load_csv(
    path: str,
    date_column: str = "DATE",
    value_column: str = "VALUE",
    name: Optional[str] = None,
) -> Series:
    """Read one DATE,VALUE series; strict about gaps and ordering.

    Missing markers ("." or empty) and malformed numbers are rejected with
    their row number; dates must be strictly increasing as opaque labels.
    If the requested value column is absent from a two-column file, the
    non-date column is used (FRED names it after the series id).
    """
    file_path = Path(path)
    if not file_path.exists():
        raise DataError(f"{path}: no such file")
    with open(file_path, newline="", encoding="utf-8-sig") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        lookup = {h.lower(): i for i, h in enumerate(header)}
        if date_column.lower() not in lookup:
            raise DataError(
                f"{path}: no column {date_column!r}; found {header}"
            )
        date_idx = lookup[date_column.lower()]
        if value_column.lower() in lookup:
            value_idx = lookup[value_column.lower()]
        elif len(header) == 2:
            value_idx = 1 - date_idx
        else:
            raise DataError(
                f"{path}: no column {value_column!r}; found {header}"
            )
        dates: list[str] = []
        values: list[float] = []
        for row_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) <= max(date_idx, value_idx):
                raise DataError(f"{path}: malformed row {row_number}: {row!r}")
            stamp = row[date_idx].strip()
            raw = row[value_idx].strip()
            if raw in (".", ""):
                raise DataError(f"{path}: missing value at row {row_number}")
            try:
                value = float(raw)
            except ValueError:
                raise DataError(
                    f"{path}: malformed value {raw!r} at row {row_number}"
                ) from None
            if dates and stamp <= dates[-1]:
                raise DataError(
                    f"{path}: dates not strictly increasing at row {row_number} "
                    f"({dates[-1]!r} then {stamp!r})"
                )
            dates.append(stamp)
            values.append(value)
    series_name = name or (
        header[value_idx] if header[value_idx].upper() != "VALUE" else file_path.stem
    )
    return Series(values=np.asarray(values), timestamps=tuple(dates), name=series_name)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def _log_series(series: Series) -> Series:
    if np.any(series.values <= 0):
        raise DataError(
            f"series {series.name!r}: log transform requires positive values"
        )
    return Series(
        values=np.log(series.values), timestamps=series.timestamps, name=series.name
    )


def run_pipeline(config: AnalysisConfig) -> Report:
    """Load, decompose, estimate and test; assemble the full report."""
    names = config.names or (None,) * len(config.inputs)
    series = [
        load_csv(path, config.date_column, config.value_column, name)
        for path, name in zip(config.inputs, names)
    ]
    if len(series) != 2:
        raise DataError(
            "the ten-hypothesis catalog is defined for exactly two series; "
            f"got {len(series)} inputs"
        )
    lengths = {len(s) for s in series}
    if len(lengths) != 1:
        raise DataError(
            "input series lengths differ: "
            + ", ".join(f"{s.name}={len(s)}" for s in series)
        )
    if config.log_transform:
        series = [_log_series(s) for s in series]
    components = [decompose(s, config.deterministic) for s in series]

    diagnostics: dict = {}
    for comp in components:
        if comp.degenerate_warning:
            diagnostics.setdefault("warnings", []).append(comp.degenerate_warning)

    if config.fixed_lags is not None:
        p_pos, p_neg = config.fixed_lags
    else:
        table = lag_order_table(components, config.p_max, config.criterion)
        p_pos = int(np.argmin(table["positive"])) + 1
        p_neg = int(np.argmin(table["negative"])) + 1
        diagnostics["lag_selection"] = {
            "criterion": config.criterion,
            "p_max": config.p_max,
            "positive": [float(v) for v in table["positive"]],
            "negative": [float(v) for v in table["negative"]],
            "selected": [p_pos, p_neg],
        }

    system = build_design(components, p_pos, p_neg, config.extra_lags)
    fgls = fgls_fit(system)

    estimator_used = config.estimator
    estimate = fgls
    garch_fit = None
    if config.estimator == "auto":
        arch = arch_lm_diag(fgls.residuals, config.arch_lags)
        diagnostics["arch_lm"] = {
            "statistic": float(arch.statistic),
            "dof": int(arch.dof),
            "p_value": float(arch.p_value),
            "lags": config.arch_lags,
        }
        estimator_used = "garch_t" if arch.p_value < ARCH_GATE_LEVEL else "fgls"
    if estimator_used == "garch_t":
        garch_fit = fit_sure_garch_t(system, init=fgls)
        estimate = garch_fit.mean
        diagnostics["estimation"] = {
            "estimator": "garch_t_ml",
            "iterations": garch_fit.iterations,
            "converged": garch_fit.converged,
            "loglik": float(garch_fit.loglik),
            "nu": float(garch_fit.garch.nu),
        }
    else:
        diagnostics["estimation"] = {
            "estimator": "fgls",
            "iterations": fgls.iterations,
            "converged": fgls.converged,
        }

    catalog = run_catalog(
        estimate, system.layout, system.variable_names, config.sum_restrictions
    )

    estimates_rows = []
    variances = np.diag(estimate.covariance)
    for i, entry in enumerate(system.layout):
        variance = float(variances[i])
        estimates_rows.append(
            {
                "name": entry.name,
                "value": float(estimate.coefficients[i]),
                "std_error": float(np.sqrt(variance)) if variance >= 0 else None,
                "causal": bool(
                    entry.restricted
                    and entry.reg_var is not None
                    and entry.reg_var != entry.eq_var
                ),
            }
        )
    hypotheses_rows = [
        {
            "id": r.hypothesis.id,
            "null": r.hypothesis.null,
            "statistic": float(r.statistic),
            "dof": int(r.dof),
            "p_value": float(r.p_value),
            "implication": r.hypothesis.label,
        }
        for r in catalog
    ]
    first, last = None, None
    if series[0].timestamps:
        first, last = series[0].timestamps[0], series[0].timestamps[-1]
    provenance = {
        "variables": list(system.variable_names),
        "sample": {
            "start": first,
            "end": last,
            "observations": len(series[0]),
            "effective_sample": system.effective_sample,
        },
        "lag_orders": [p_pos, p_neg],
        "extra_lags": config.extra_lags,
        "estimator": estimator_used,
        "version": __version__,
    }
    return Report(
        config=config.to_dict(),
        estimates=estimates_rows,
        hypotheses=hypotheses_rows,
        diagnostics=diagnostics,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def format_p_value(p: float) -> str:
    if p < P_VALUE_FLOOR:
        return "< 0.00001"
    return f"{p:.5f}"


def _render_text(report: Report) -> str:
    prov = report.provenance
    sample = prov.get("sample", {})
    lines = []
    lines.append("Efficient asymmetric causality tests")
    lines.append("=" * 72)
    lines.append(f"Variables:  {', '.join(prov.get('variables', []))}")
    if sample.get("start") is not None:
        lines.append(
            f"Sample:     {sample['start']} .. {sample['end']} "
            f"({sample['observations']} obs, effective {sample['effective_sample']})"
        )
    else:
        lines.append(
            f"Sample:     {sample.get('observations', '?')} obs, "
            f"effective {sample.get('effective_sample', '?')}"
        )
    lag_orders = prov.get("lag_orders", ["?", "?"])
    lines.append(
        f"Lag orders: P+={lag_orders[0]}, P-={lag_orders[1]}, "
        f"plus {prov.get('extra_lags', 0)} unrestricted augmentation lag(s)"
    )
    lines.append(f"Estimator:  {prov.get('estimator', '?')}")
    lines.append("")

    causal = sorted(
        (row for row in report.estimates if row.get("causal")),
        key=lambda row: row["name"],
    )
    if causal:
        lines.append("Causal parameter estimates")
        lines.append("-" * 72)
        width = max(len(row["name"]) for row in causal)
        for row in causal:
            se = row["std_error"]
            se_text = f"  (s.e. {se:.6f})" if se is not None else ""
            lines.append(f"  {row['name']:<{width}}  {row['value']:>12.6f}{se_text}")
        lines.append("")

    lines.append("Hypothesis tests")
    lines.append("-" * 72)
    null_width = max(len(row["null"]) for row in report.hypotheses)
    null_width = min(null_width, 48)
    header = (
        f"  {'id':<4} {'null hypothesis':<{null_width}} "
        f"{'statistic':>10} {'dof':>4} {'p-value':>10}  implication"
    )
    lines.append(header)
    for row in report.hypotheses:
        null = row["null"]
        if len(null) > null_width:
            null = null[: null_width - 3] + "..."
        lines.append(
            f"  {row['id']:<4} {null:<{null_width}} "
            f"{row['statistic']:>10.4f} {row['dof']:>4} "
            f"{format_p_value(row['p_value']):>10}  {row['implication']}"
        )
    lines.append("")

    if report.diagnostics:
        lines.append("Diagnostics")
        lines.append("-" * 72)
        arch = report.diagnostics.get("arch_lm")
        if arch:
            lines.append(
                f"  ARCH LM ({arch['lags']} lag(s)): statistic "
                f"{arch['statistic']:.4f}, dof {arch['dof']}, "
                f"p-value {format_p_value(arch['p_value'])}"
            )
        selection = report.diagnostics.get("lag_selection")
        if selection:
            pos = ", ".join(f"{v:.4f}" for v in selection["positive"])
            neg = ", ".join(f"{v:.4f}" for v in selection["negative"])
            lines.append(
                f"  Lag selection ({selection['criterion']}, p_max="
                f"{selection['p_max']}): positive [{pos}] negative [{neg}] "
                f"-> P+={selection['selected'][0]}, P-={selection['selected'][1]}"
            )
        estimation = report.diagnostics.get("estimation")
        if estimation:
            extra = (
                f", loglik {estimation['loglik']:.4f}" if "loglik" in estimation else ""
            )
            lines.append(
                f"  Estimation: {estimation['estimator']}, "
                f"{estimation['iterations']} iteration(s), "
                f"converged={estimation['converged']}{extra}"
            )
        for warning in report.diagnostics.get("warnings", []):
            lines.append(f"  Warning: {warning}")
        lines.append("")
    return "\n".join(lines)


def render_report(report: Report, output_format: str = "text") -> str:
    if output_format == "json":
        return report.to_json()
    if output_format == "text":
        return _render_text(report)
    raise ValueError("format must be text or json")


# ---------------------------------------------------------------------------
# argument parsing and subcommands
# ---------------------------------------------------------------------------


def _add_common_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--date-column", default="DATE")
    parser.add_argument("--value-column", default="VALUE")
    parser.add_argument("--log", action="store_true", help="natural-log transform")
    parser.add_argument(
        "--deterministic",
        choices=["none", "drift", "drift_and_trend"],
        default="drift",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymcause",
        description="Asymmetric causality testing between two time series.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="full analysis of two series")
    run.add_argument("--input", nargs="+", required=True, metavar="CSV")
    _add_common_input_flags(run)
    run.add_argument("--names", nargs="+", help="display names per input")
    run.add_argument("--max-lag", type=int, default=8, dest="p_max")
    run.add_argument("--criterion", choices=list(CRITERIA), default="sbc")
    run.add_argument(
        "--fixed-lags",
        nargs=2,
        type=int,
        metavar=("P_POS", "P_NEG"),
        help="skip selection and use these lag orders",
    )
    run.add_argument("--extra-lags", type=int, default=1)
    run.add_argument(
        "--estimator", choices=["fgls", "garch_t", "auto"], default="auto"
    )
    run.add_argument("--level", type=float, default=0.05)
    run.add_argument("--arch-lags", type=int, default=1)
    run.add_argument("--sum-restrictions", action="store_true")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--format", choices=["text", "json"], default="text")
    run.add_argument("--out", help="write the report here instead of stdout")

    dec = sub.add_parser("decompose", help="emit signed components as CSV")
    dec.add_argument("--input", required=True, metavar="CSV")
    _add_common_input_flags(dec)
    dec.add_argument("--out", help="output CSV path (default stdout)")

    mc = sub.add_parser("mc-size", help="empirical size/power study")
    mc.add_argument("--reps", type=int, default=1000)
    mc.add_argument("--T", type=int, default=300, dest="t_obs")
    mc.add_argument("--level", type=float, default=0.05)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--drift", nargs=2, type=float, default=[0.1, 0.1])
    mc.add_argument("--trend", nargs=2, type=float, default=[0.0, 0.0])
    mc.add_argument(
        "--error-correlation", type=float, default=0.0, metavar="RHO",
        help="cross-correlation of the two innovation series",
    )
    mc.add_argument("--tail", choices=["gaussian", "t"], default="gaussian")
    mc.add_argument("--df", type=float, default=5.0)
    mc.add_argument("--feedback", type=float, help="power study: inject this "
                    "coefficient of variable 2's lagged positive shocks")
    mc.add_argument("--fixed-lags", nargs=2, type=int, default=[1, 1])
    mc.add_argument("--extra-lags", type=int, default=1)
    mc.add_argument("--estimator", choices=["fgls", "ols"], default="fgls")
    mc.add_argument(
        "--deterministic",
        choices=["none", "drift", "drift_and_trend"],
        default="drift",
    )
    mc.add_argument("--format", choices=["text", "json"], default="text")
    mc.add_argument("--out")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + ("\n" if not text.endswith("\n") else ""),
                             encoding="utf-8")
    else:
        print(text)


def _cmd_run(args: argparse.Namespace) -> int:
    config = AnalysisConfig(
        inputs=tuple(args.input),
        log_transform=args.log,
        deterministic=DeterministicSpec(args.deterministic),
        p_max=args.p_max,
        criterion=args.criterion,
        fixed_lags=tuple(args.fixed_lags) if args.fixed_lags else None,
        extra_lags=args.extra_lags,
        estimator=args.estimator,
        level=args.level,
        seed=args.seed,
        output=args.out,
        output_format=args.format,
        date_column=args.date_column,
        value_column=args.value_column,
        names=tuple(args.names) if args.names else None,
        sum_restrictions=args.sum_restrictions,
        arch_lags=args.arch_lags,
    )
    report = run_pipeline(config)
    _emit(render_report(report, config.output_format), args.out)
    return 0


def _cmd_decompose(args: argparse.Namespace) -> int:
    series = load_csv(args.input, args.date_column, args.value_column)
    if args.log:
        series = _log_series(series)
    components = decompose(series, DeterministicSpec(args.deterministic))
    stamps = series.timestamps or tuple(str(i) for i in range(len(series)))
    rows = ["DATE,POSITIVE,NEGATIVE"]
    for stamp, pos, neg in zip(stamps, components.positive, components.negative):
        rows.append(f"{stamp},{float(pos)!r},{float(neg)!r}")
    _emit("\n".join(rows), args.out)
    if components.degenerate_warning:
        print(f"warning: {components.degenerate_warning}", file=sys.stderr)
    return 0


def _cmd_mc_size(args: argparse.Namespace) -> int:
    correlation = None
    if args.error_correlation:
        rho = args.error_correlation
        correlation = np.array([[1.0, rho], [rho, 1.0]])
    config = DgpConfig(
        m=2,
        drift=tuple(args.drift),
        trend=tuple(args.trend),
        initial=(0.0, 0.0),
        error_correlation=correlation,
        error_tail=args.tail,
        error_df=args.df,
        causal_feedback=args.feedback,
        t_obs=args.t_obs,
        seed=args.seed,
    )
    rates = empirical_size(
        config,
        reps=args.reps,
        level=args.level,
        deterministic=DeterministicSpec(args.deterministic),
        fixed_lags=tuple(args.fixed_lags),
        extra_lags=args.extra_lags,
        estimator=args.estimator,
    )
    if args.format == "json":
        payload = {
            "reps": args.reps,
            "t_obs": args.t_obs,
            "level": args.level,
            "seed": args.seed,
            "feedback": args.feedback,
            "rates": rates,
        }
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        lines = [
            f"Rejection rates over {args.reps} replications "
            f"(T={args.t_obs}, level={args.level}, seed={args.seed})",
            "-" * 60,
        ]
        for hid, rate in rates.items():
            lines.append(f"  {hid:<4} {rate:.4f}")
        _emit("\n".join(lines), args.out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "decompose":
            return _cmd_decompose(args)
        if args.command == "mc-size":
            return _cmd_mc_size(args)
    except AsymCauseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
