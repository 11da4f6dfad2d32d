import json

from lrtrial import (
    NormalEffect,
    OutcomeCategory,
    SimulationConfig,
    SweepPoint,
    TrialDesign,
    run_batch,
)
from lrtrial.reports import (
    SUMMARY_CSV_HEADER,
    SWEEP_CSV_HEADER,
    design_report,
    design_to_table,
    format_lr,
    summary_from_csv,
    summary_to_csv,
    summary_to_json_dict,
    summary_to_table,
    sweep_to_csv,
)


def small_summary(seed=21):
    config = SimulationConfig(
        design=TrialDesign(delta=0.5, z_crit=2.0),
        effect_dist=NormalEffect(0.0, 1.0),
        n_trials=400,
        master_seed=seed,
    )
    return run_batch(config)


class TestFormatLr:
    def test_four_significant_figures(self):
        assert format_lr(1.87288) == "1.873"
        assert format_lr(132.44) == "132.4"
        assert format_lr(20.0) == "20"
        assert format_lr(64644.355) == "6.464e+04"


class TestDesignReport:
    def test_reference_numbers(self):
        report = design_report(TrialDesign(delta=0.5, z_crit=2.0))
        assert report["n_min"] == 16 and report["n_max"] == 64
        assert abs(report["stop_z_high"] - 2.2365) <= 1e-3
        assert abs(report["stop_p_high"] - 0.01266) <= 1e-4
        assert abs(report["stop_z_low"] + report["stop_z_high"]) <= 1e-12
        assert abs(report["stop_p_low"] - (1.0 - report["stop_p_high"])) <= 1e-12

    def test_table_mentions_sizes(self):
        text = design_to_table(TrialDesign(delta=0.5, z_crit=2.0, label="pilot"))
        assert "16" in text and "64" in text and "pilot" in text


class TestSummaryTable:
    def test_four_category_rows_plus_neutral(self):
        table = summary_to_table(small_summary())
        lines = table.splitlines()
        assert lines[0].startswith("Result")
        assert "Misleading evidence, stopped early" in table
        assert "Correct evidence, stopped early" in table
        assert "Misleading evidence, stopped at max n" in table
        assert "Correct evidence, stopped at max n" in table
        assert "Neutral / unclassified" in table
        assert "mean sample size" in table


class TestSummaryJson:
    def test_structure_and_values(self):
        summary = small_summary()
        payload = summary_to_json_dict(summary)
        assert payload["n_trials"] == summary.n_trials
        assert payload["mean_n"] == summary.mean_n
        for cat in OutcomeCategory:
            entry = payload["categories"][cat.value]
            assert entry["count"] == summary.counts[cat]
            assert entry["incidence"] == summary.incidence(cat)
        assert payload["config"]["design"]["n_max"] == 64
        json.dumps(payload)  # must be serializable as-is


class TestSummaryCsv:
    def test_header_and_roundtrip(self):
        summary = small_summary()
        text = summary_to_csv(summary)
        lines = text.strip().splitlines()
        assert lines[0] == ",".join(SUMMARY_CSV_HEADER)
        assert len(lines) == 1 + len(OutcomeCategory) + 1
        parsed = summary_from_csv(text, config=summary.config)
        assert parsed == summary

    def test_roundtrip_without_config(self):
        summary = small_summary(seed=22)
        parsed = summary_from_csv(summary_to_csv(summary))
        assert parsed.counts == summary.counts
        assert parsed.mean_folded_lr == summary.mean_folded_lr
        assert parsed.mean_n == summary.mean_n
        assert parsed.misleading_total == summary.misleading_total
        assert parsed.master_seed == summary.master_seed
        assert parsed.config is None

    def test_rejects_foreign_csv(self):
        try:
            summary_from_csv("a,b\n1,2\n")
        except ValueError:
            return
        raise AssertionError("expected ValueError")


class TestSweepCsv:
    def test_schema_and_values(self):
        points = [
            SweepPoint(theta_t=-1.0, mean_n=16.2, stop_early_rate=1.0, replications=100),
            SweepPoint(theta_t=0.5, mean_n=62.8, stop_early_rate=0.04, replications=100),
        ]
        text = sweep_to_csv(points)
        lines = text.strip().splitlines()
        assert lines[0] == ",".join(SWEEP_CSV_HEADER)
        assert len(lines) == 3
        theta, mean_n, rate, reps = lines[2].split(",")
        assert float(theta) == 0.5 and float(mean_n) == 62.8
        assert float(rate) == 0.04 and int(reps) == 100
