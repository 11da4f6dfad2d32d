"""Rendering of designs, simulation summaries and sweeps (table, CSV, JSON).

CSV numbers are written with repr so parsing them back reproduces the
exact float values.
"""

from __future__ import annotations

import csv
import io
from typing import Sequence

from .engine import TrialDesign
from .evidence import p_for_lr, z_for_lr
from .simulate import (
    NormalEffect,
    OutcomeCategory,
    PointMassEffect,
    SimulationConfig,
    SimulationSummary,
    SweepPoint,
)

CATEGORY_LABELS = {
    OutcomeCategory.MISLEADING_EARLY: "Misleading evidence, stopped early",
    OutcomeCategory.CORRECT_EARLY: "Correct evidence, stopped early",
    OutcomeCategory.MISLEADING_MAX_N: "Misleading evidence, stopped at max n",
    OutcomeCategory.CORRECT_MAX_N: "Correct evidence, stopped at max n",
    OutcomeCategory.NEUTRAL_UNCLASSIFIED: "Neutral / unclassified",
}

SUMMARY_CSV_HEADER = ["category", "count", "incidence", "mean_folded_lr", "mean_n", "master_seed"]
SWEEP_CSV_HEADER = ["theta_T", "mean_n", "stop_early_rate", "replications"]


def format_lr(value: float) -> str:
    """Display form of a linear likelihood ratio: 4 significant figures."""
    return f"{value:.4g}"


def design_report(design: TrialDesign) -> dict:
    """Design plus derived sizes and threshold z / p equivalents."""
    z_high = z_for_lr(design.lr_upper)
    z_low = -z_for_lr(1.0 / design.lr_lower)
    return {
        "delta": design.delta,
        "z_crit": design.z_crit,
        "lr_upper": design.lr_upper,
        "lr_lower": design.lr_lower,
        "label": design.label,
        "n_min": design.n_min,
        "n_max": design.n_max,
        "stop_z_high": z_high,
        "stop_p_high": p_for_lr(design.lr_upper),
        "stop_z_low": z_low,
        "stop_p_low": 1.0 - p_for_lr(1.0 / design.lr_lower),
    }


def design_to_table(design: TrialDesign) -> str:
    r = design_report(design)
    lines = [
        f"delta (dividing effect size):  {r['delta']:g}",
        f"z_crit (interval calibration): {r['z_crit']:g}",
        f"stop thresholds:               LR >= {r['lr_upper']:g} or LR <= {r['lr_lower']:g}",
        f"n_min:                         {r['n_min']}",
        f"n_max:                         {r['n_max']}",
        f"stop high at z >= {r['stop_z_high']:.4f}  (one-sided p <= {r['stop_p_high']:.5f})",
        f"stop low  at z <= {r['stop_z_low']:.4f}  (one-sided p >= {r['stop_p_low']:.5f})",
    ]
    if design.label:
        lines.insert(0, f"label:                         {design.label}")
    return "\n".join(lines)


def _config_to_dict(config: SimulationConfig) -> dict:
    dist = config.effect_dist
    if isinstance(dist, NormalEffect):
        effect = {"kind": "normal", "mean": dist.mean, "sd": dist.sd}
    elif isinstance(dist, PointMassEffect):
        effect = {"kind": "point_mass", "theta": dist.theta}
    else:  # pragma: no cover - union is closed
        raise TypeError(f"unknown effect distribution {dist!r}")
    d = config.design
    return {
        "design": {
            "delta": d.delta,
            "lr_upper": d.lr_upper,
            "lr_lower": d.lr_lower,
            "z_crit": d.z_crit,
            "label": d.label,
            "n_min": d.n_min,
            "n_max": d.n_max,
        },
        "effect_dist": effect,
        "n_trials": config.n_trials,
        "master_seed": config.master_seed,
    }


def summary_to_json_dict(summary: SimulationSummary) -> dict:
    return {
        "n_trials": summary.n_trials,
        "master_seed": summary.master_seed,
        "mean_n": summary.mean_n,
        "misleading_total": summary.misleading_total,
        "categories": {
            cat.value: {
                "count": summary.counts[cat],
                "incidence": summary.incidence(cat),
                "mean_folded_lr": summary.mean_folded_lr[cat],
            }
            for cat in OutcomeCategory
        },
        "config": _config_to_dict(summary.config) if summary.config is not None else None,
    }


def summary_to_table(summary: SimulationSummary) -> str:
    name_width = max(len(label) for label in CATEGORY_LABELS.values())
    header = f"{'Result':<{name_width}}  {'Incidence (%)':>13}  {'Mean LR':>9}"
    lines = [header, "-" * len(header)]
    for cat in OutcomeCategory:
        mean = summary.mean_folded_lr[cat]
        mean_txt = format_lr(mean) if mean is not None else "-"
        lines.append(
            f"{CATEGORY_LABELS[cat]:<{name_width}}  "
            f"{100.0 * summary.incidence(cat):>13.2f}  {mean_txt:>9}"
        )
    lines.append("-" * len(header))
    lines.append(f"mean sample size:    {summary.mean_n:.2f}")
    lines.append(f"misleading overall:  {100.0 * summary.misleading_total:.2f}%")
    lines.append(f"trials: {summary.n_trials}   master seed: {summary.master_seed}")
    return "\n".join(lines)


def summary_to_csv(summary: SimulationSummary) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_CSV_HEADER)
    for cat in OutcomeCategory:
        mean = summary.mean_folded_lr[cat]
        writer.writerow(
            [
                cat.value,
                summary.counts[cat],
                repr(summary.incidence(cat)),
                repr(mean) if mean is not None else "",
                "",
                "",
            ]
        )
    writer.writerow(
        [
            "overall",
            summary.n_trials,
            repr(summary.misleading_total),
            "",
            repr(summary.mean_n),
            summary.master_seed,
        ]
    )
    return buf.getvalue()


def summary_from_csv(text: str, config: SimulationConfig | None = None) -> SimulationSummary:
    """Inverse of summary_to_csv; the config echo is not carried by CSV."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != SUMMARY_CSV_HEADER:
        raise ValueError("not a simulation summary CSV")
    counts: dict[OutcomeCategory, int] = {}
    mean_folded: dict[OutcomeCategory, float | None] = {}
    overall = None
    for row in rows[1:]:
        if not row:
            continue
        name, count, incidence, mean_lr, mean_n, seed = row
        if name == "overall":
            overall = (int(count), float(incidence), float(mean_n), int(seed))
            continue
        cat = OutcomeCategory(name)
        counts[cat] = int(count)
        mean_folded[cat] = float(mean_lr) if mean_lr else None
    if overall is None or set(counts) != set(OutcomeCategory):
        raise ValueError("summary CSV is missing rows")
    n_trials, misleading_total, mean_n, master_seed = overall
    if sum(counts.values()) != n_trials:
        raise ValueError("summary CSV category counts do not add up to n_trials")
    return SimulationSummary(
        n_trials=n_trials,
        master_seed=master_seed,
        counts=counts,
        mean_folded_lr=mean_folded,
        mean_n=mean_n,
        misleading_total=misleading_total,
        config=config,
    )


def sweep_to_csv(points: Sequence[SweepPoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for point in points:
        writer.writerow(
            [
                repr(point.theta_t),
                repr(point.mean_n),
                repr(point.stop_early_rate),
                point.replications,
            ]
        )
    return buf.getvalue()
