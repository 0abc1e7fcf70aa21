"""Comparison reports: per-scheme metrics plus percent improvements over linear.

Improvement direction follows what "better" means per metric: the Nakamoto
percentages improve upward ((new - old) / old * 100) and the concentration
metrics improve downward ((old - new) / old * 100), so every cell is
non-negative whenever the concave schemes behave as proven.  A negative cell
beyond float noise raises OrderingViolationError.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .errors import OrderingViolationError
from .metrics import MetricsReport, full_report
from .model import StakeSnapshot, WeightScheme

HIGHER_BETTER = ("rho_liveness", "rho_safety")
LOWER_BETTER = ("gini", "hhi", "shapley_gini_liveness", "shapley_gini_safety", "zipf")
IMPROVEMENT_TOLERANCE = 1e-9

_METRIC_GETTERS = {
    "rho_liveness": lambda r: r.nakamoto_liveness_pct,
    "rho_safety": lambda r: r.nakamoto_safety_pct,
    "gini": lambda r: r.gini,
    "hhi": lambda r: r.hhi,
    "shapley_gini_liveness": lambda r: r.shapley_liveness_gini,
    "shapley_gini_safety": lambda r: r.shapley_safety_gini,
    "zipf": lambda r: r.zipf,
}


def improvement_keys(with_shapley: bool) -> tuple[str, ...]:
    keys = ["rho_liveness", "rho_safety", "gini", "hhi"]
    if with_shapley:
        keys += ["shapley_gini_liveness", "shapley_gini_safety"]
    keys.append("zipf")
    return tuple(keys)


def percent_improvement(key: str, old: float, new: float) -> float:
    """Signed percent improvement of ``new`` over ``old`` for one metric."""
    if old is None or new is None:
        return float("nan")
    if math.isnan(old) or math.isnan(new):
        return float("nan")
    if old == 0.0:
        return 0.0
    if key in HIGHER_BETTER:
        return (new - old) / old * 100.0
    return (old - new) / old * 100.0


@dataclass(frozen=True)
class SnapshotComparison:
    label: str
    reports: dict[str, MetricsReport]
    improvements: dict[str, dict[str, float]]


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[SnapshotComparison, ...]
    average: dict[str, dict[str, float]]
    with_shapley: bool
    shapley_meta: dict | None = field(default=None)


def compare_snapshot(
    snapshot: StakeSnapshot,
    *,
    shapley: str = "sampled",
    samples: int = 100_000,
    seed: int = 0,
    lsw_offset: bool = True,
    literal_thresholds: bool = False,
) -> SnapshotComparison:
    """Metrics for one snapshot under linear, srsw and lsw, plus improvements."""
    schemes = {
        "linear": WeightScheme.linear(),
        "srsw": WeightScheme.srsw(),
        "lsw": WeightScheme.lsw(offset=lsw_offset),
    }
    reports = {
        name: full_report(
            snapshot,
            scheme,
            shapley=shapley,
            samples=samples,
            seed=seed,
            literal_thresholds=literal_thresholds,
        )
        for name, scheme in schemes.items()
    }
    keys = improvement_keys(shapley != "off")
    improvements: dict[str, dict[str, float]] = {}
    for name in ("srsw", "lsw"):
        cells: dict[str, float] = {}
        for key in keys:
            getter = _METRIC_GETTERS[key]
            value = percent_improvement(key, getter(reports["linear"]), getter(reports[name]))
            if value < -IMPROVEMENT_TOLERANCE:
                raise OrderingViolationError(
                    f"{snapshot.chain}: {name} worsened {key} by {-value:.6f}%"
                )
            if not math.isnan(value):
                value = max(value, 0.0)
            cells[key] = value
        improvements[name] = cells
    return SnapshotComparison(
        label=snapshot.chain, reports=reports, improvements=improvements
    )


def build_comparison(
    comparisons: list[SnapshotComparison],
    *,
    with_shapley: bool,
    shapley_meta: dict | None = None,
) -> ComparisonReport:
    if not comparisons:
        raise ValueError("comparison needs at least one snapshot")
    keys = improvement_keys(with_shapley)
    average: dict[str, dict[str, float]] = {}
    for scheme in ("srsw", "lsw"):
        cells = {}
        for key in keys:
            values = [
                row.improvements[scheme][key]
                for row in comparisons
                if not math.isnan(row.improvements[scheme][key])
            ]
            cells[key] = sum(values) / len(values) if values else float("nan")
        average[scheme] = cells
    return ComparisonReport(
        rows=tuple(comparisons),
        average=average,
        with_shapley=with_shapley,
        shapley_meta=shapley_meta,
    )


# --- rendering ---------------------------------------------------------------


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def comparison_to_dict(report: ComparisonReport) -> dict:
    keys = improvement_keys(report.with_shapley)
    return {
        "schemes": ["linear", "srsw", "lsw"],
        "shapley": report.shapley_meta,
        "metrics": list(keys),
        "rows": [
            {
                "label": row.label,
                "reports": {name: rep.to_dict() for name, rep in row.reports.items()},
                "improvements": {
                    scheme: {k: _clean(cells[k]) for k in keys}
                    for scheme, cells in row.improvements.items()
                },
            }
            for row in report.rows
        ],
        "average_improvements": {
            scheme: {k: _clean(cells[k]) for k in keys}
            for scheme, cells in report.average.items()
        },
    }


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, allow_nan=False)


def _fmt2(value) -> str:
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return "n/a"
    return f"{value:.2f}"


def _fmt_eps(value: float) -> str:
    return f"{value:.4g}" if value >= 1e6 else f"{value:.2f}"


def metrics_to_table(report: MetricsReport) -> str:
    rows = [
        ("chain", report.chain),
        ("scheme", report.scheme),
        ("m", str(report.m)),
        ("gini", _fmt2(report.gini)),
        (
            "nakamoto_liveness",
            f"{report.nakamoto_liveness_count} ({_fmt2(report.nakamoto_liveness_pct)}%)",
        ),
        (
            "nakamoto_safety",
            f"{report.nakamoto_safety_count} ({_fmt2(report.nakamoto_safety_pct)}%)",
        ),
        ("hhi", f"{report.hhi:.4f}"),
        ("zipf", _fmt2(report.zipf)),
        ("zipf_r2", _fmt2(report.zipf_r2)),
    ]
    for delta, value in sorted(report.epsilon_at.items()):
        rows.append((f"epsilon(delta={delta})", _fmt_eps(value)))
    if report.shapley_method is not None:
        rows.append(("shapley_gini_liveness", _fmt2(report.shapley_liveness_gini)))
        rows.append(("shapley_gini_safety", _fmt2(report.shapley_safety_gini)))
        rows.append(("shapley_method", report.shapley_method))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def metrics_to_csv(report: MetricsReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["metric", "value"])
    doc = report.to_dict()
    shapley = doc.pop("shapley", None)
    epsilon = doc.pop("epsilon_at")
    for key, value in doc.items():
        writer.writerow([key, "" if value is None else value])
    for delta, value in epsilon.items():
        writer.writerow([f"epsilon_at_{delta}", "" if value is None else repr(value)])
    if shapley:
        for key, value in shapley.items():
            writer.writerow([f"shapley_{key}", "" if value is None else value])
    return buf.getvalue()


_COLUMN_TITLES = {
    "rho_liveness": "rho_NL(%)",
    "rho_safety": "rho_NS(%)",
    "gini": "G(%)",
    "hhi": "HHI(%)",
    "shapley_gini_liveness": "G_phiL(%)",
    "shapley_gini_safety": "G_phiS(%)",
    "zipf": "Z(%)",
}


def comparison_to_table(report: ComparisonReport) -> str:
    keys = improvement_keys(report.with_shapley)
    header = ["snapshot"] + [_COLUMN_TITLES[k] for k in keys]

    def cells_for(improvements: dict[str, dict[str, float]]) -> list[str]:
        return [
            f"{_fmt2(improvements['srsw'][k])} / {_fmt2(improvements['lsw'][k])}"
            for k in keys
        ]

    body = [[row.label] + cells_for(row.improvements) for row in report.rows]
    body.append(["average"] + cells_for(report.average))
    widths = [
        max(len(header[i]), *(len(line[i]) for line in body)) for i in range(len(header))
    ]
    lines = [
        "  ".join(f"{header[i]:<{widths[i]}}" for i in range(len(header))),
        "  ".join("-" * widths[i] for i in range(len(header))),
    ]
    lines += ["  ".join(f"{line[i]:<{widths[i]}}" for i in range(len(header))) for line in body]
    lines.append("")
    lines.append("cells: srsw / lsw percent improvement over linear weights")
    return "\n".join(lines)


def comparison_to_csv(report: ComparisonReport) -> str:
    keys = improvement_keys(report.with_shapley)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["snapshot", "scheme"] + list(keys))
    for row in list(report.rows) + [None]:
        label = row.label if row is not None else "average"
        improvements = row.improvements if row is not None else report.average
        for scheme in ("srsw", "lsw"):
            cells = improvements[scheme]
            writer.writerow(
                [label, scheme]
                + ["" if math.isnan(cells[k]) else repr(cells[k]) for k in keys]
            )
    return buf.getvalue()
