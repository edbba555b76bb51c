"""Unit tests for result records and report tables."""

import pytest

from intentgen.constants import ConflictMode
from intentgen.harness.reports import (
    accuracy_grid,
    baseline_accuracy,
    format_delta,
    format_percent,
    plot_sweep,
    read_results,
    report_ablation_table,
    report_conflict_table,
    report_lookahead_table,
    report_main_table,
    summarize,
    write_results,
)
from intentgen.models.conflict import ConflictReport
from intentgen.models.run import ScenarioResult
from intentgen.utils.errors import UsageError, ValidationError

MAIN_HEADER = "| Model | 1-u | 2-u | 3-u | 3-5xg |\n|---|---|---|---|---|\n"
SGD_TEST = 4995


class TestFormatting:
    """Test percentage rendering."""

    def test_published_cell(self):
        """Test (230, 233) renders as 98.7."""
        assert format_percent(230, 233) == "98.7"

    def test_half_up(self):
        """Test exact halves round up."""
        assert format_percent(1, 8) == "12.5"
        assert format_percent(1, 16) == "6.3"
        assert format_percent(1, 1) == "100.0"

    def test_empty_total(self):
        with pytest.raises(UsageError):
            format_percent(0, 0)

    @pytest.mark.parametrize("delta,expected", [(0.018, "+1.8"), (0.0, "0.0"), (-0.05, "-5.0"), (None, "-")])
    def test_delta(self, delta, expected):
        assert format_delta(delta) == expected

    def test_accuracy_is_exact(self):
        """Test accuracy equals t/d."""
        result = ScenarioResult("ALL_SDC", "u3", 230, 233)

        assert result.accuracy == 230 / 233
        assert result.exact_accuracy.numerator == 230

    def test_invalid_counts(self):
        with pytest.raises(ValidationError):
            ScenarioResult("SDC", "u1", 5, 4)


class TestMainTable:
    """Test the model x scenario table."""

    def test_empty_grid(self):
        """Test an empty grid renders the header alone."""
        assert report_main_table([]) == MAIN_HEADER

    def test_cells_and_missing(self):
        """Test cells render percentages, absent cells a dash and regimes their dashed names."""
        results = [
            ScenarioResult("ALL_SDC", "u3", 230, 233),
            ScenarioResult("ALL_SDC", "u1", 200, 233),
            ScenarioResult("SUC", "u1", 180, 233),
        ]

        table = report_main_table(results)

        assert table == (
            MAIN_HEADER
            + "| SUC | 77.3 | - | - | - |\n"
            + "| ALL-SDC | 85.8 | - | 98.7 | - |\n"
        )

    def test_generator_filter(self):
        """Test look-ahead columns take the chosen generator's results."""
        results = [
            ScenarioResult("SDC", "gen5x", 10, 20, generator="PART_SDC"),
            ScenarioResult("SDC", "gen5x", 15, 20, generator="ALL_SDC"),
        ]

        table = report_main_table(results, scenarios=("gen5x",), generator="ALL_SDC")

        assert "| SDC | 75.0 |" in table

    def test_delta_mode(self):
        """Test the delta table renders signed points."""
        results = [
            ScenarioResult("SUC", "u1", 50, 100, delta_vs_baseline=0.0),
            ScenarioResult("SDC", "u1", 52, 100, delta_vs_baseline=0.02),
        ]

        table = report_main_table(results, scenarios=("u1",), mode="delta")

        assert table.splitlines()[2:] == ["| SUC | 0.0 |", "| SDC | +2.0 |"]

    def test_unknown_mode(self):
        with pytest.raises(UsageError):
            report_main_table([], mode="ratio")


class TestLookaheadTable:
    """Test the generated-utterance table."""

    def test_sgd_all_row(self):
        """Test the SGD ALL row renders 75.9 | 75.3 | 76.7 | 77.2 | 65.8."""
        results = [
            ScenarioResult("ALL", "gen3", 3791, SGD_TEST, generator="PART_SDC"),
            ScenarioResult("ALL", "gen3", 3761, SGD_TEST, generator="ALL_SDC"),
            ScenarioResult("ALL", "gen5x", 3831, SGD_TEST, generator="PART_SDC"),
            ScenarioResult("ALL", "gen5x", 3856, SGD_TEST, generator="ALL_SDC"),
            ScenarioResult("ALL", "rnd3", 3287, SGD_TEST, generator="PART_SDC"),
        ]

        lines = report_lookahead_table(results).splitlines()

        assert lines[0] == ("| Model | 3-gen (PART-SDC) | 3-gen (ALL-SDC) | 3-5xg (PART-SDC) "
                            "| 3-5xg (ALL-SDC) | 3-rnd |")
        assert lines[2] == "| ALL | 75.9 | 75.3 | 76.7 | 77.2 | 65.8 |"

    def test_missing_rnd(self):
        results = [ScenarioResult("SDC", "gen3", 1, 2, generator="ALL_SDC")]

        assert report_lookahead_table(results).splitlines()[2] == "| SDC | 50.0 | - | - |"


class TestConflictTable:
    """Test the conflict-resolution table."""

    def test_rows(self):
        reports = [
            ConflictReport(ConflictMode.CONFLICT_ORACLE, 40, 40, 12, 0.7, fixed=28),
            ConflictReport(ConflictMode.THRESHOLD, 0, 0, 0, None),
        ]

        lines = report_conflict_table(reports).splitlines()

        assert lines[2] == "| conflict-oracle | 40 | 40 | 12 | 28 | 0 | 70.0 |"
        assert lines[3] == "| threshold | 0 | 0 | 0 | 0 | 0 | - |"

    def test_report_round_trip(self):
        report = ConflictReport(ConflictMode.MISTAKE_ORACLE, 60, 60, 32, 28 / 60, fixed=28, cases_resolved=60)

        assert ConflictReport.from_dict(report.to_dict()) == report


class TestAblationTable:
    """Test the auxiliary-task importance table."""

    def test_rows_with_deltas(self):
        """Test single-task rows come first and the all-tasks row last."""
        results = [
            ScenarioResult("all", "u3", 95, 100, delta_vs_baseline=0.063),
            ScenarioResult("gen3", "u3", 92, 100, delta_vs_baseline=0.046),
            ScenarioResult("repetition", "u3", 88, 100, delta_vs_baseline=0.0),
        ]

        lines = report_ablation_table(results).splitlines()

        assert lines[0] == "| Tasks | 3-u | Δ |"
        assert lines[2] == "| Utterance generation | 92.0 | +4.6 |"
        assert lines[3] == "| Repetition | 88.0 | 0.0 |"
        assert lines[4] == "| All tasks | 95.0 | +6.3 |"

    def test_without_baseline(self):
        lines = report_ablation_table([ScenarioResult("reorder", "u3", 758, 1000)]).splitlines()

        assert lines[2] == "| Reordering | 75.8 | - |"


class TestRecords:
    """Test result files and derived views."""

    def test_write_and_read(self, tmp_path):
        results = [ScenarioResult("SDC", "u1", 3, 4, delta_vs_baseline=0.25),
                   ScenarioResult("SDC", "gen3", 2, 4, generator="ALL_SDC")]

        assert write_results(tmp_path / "results.jsonl", results) == 2
        assert read_results(tmp_path / "results.jsonl") == results

    def test_accuracy_grid(self):
        """Test the pivot keys generative columns by generator."""
        results = [ScenarioResult("SDC", "u1", 1, 4), ScenarioResult("SDC", "gen3", 3, 4, generator="ALL_SDC")]

        grid = accuracy_grid(results)

        assert grid.loc["SDC", "u1"] == 0.25
        assert grid.loc["SDC", "gen3@ALL_SDC"] == 0.75
        assert accuracy_grid([]).empty

    def test_baseline_and_summary(self):
        results = [ScenarioResult("SUC", "u1", 1, 2)]

        assert baseline_accuracy(results, "SUC") == 0.5
        assert baseline_accuracy(results, "SDC") is None
        assert summarize(results) == {"SUC u1": "1/2 = 50.0"}


class TestSweepPlot:
    """Test the ratio sweep figure."""

    def test_writes_png(self, tmp_path):
        path = plot_sweep([(0.5, 0.8), (0.0, 0.7), (1.0, 0.6)], tmp_path / "plots" / "sweep.png", "PART_SDC")

        assert path is not None
        assert (tmp_path / "plots" / "sweep.png").stat().st_size > 0

    def test_no_points(self, tmp_path):
        assert plot_sweep([], tmp_path / "sweep.png") is None
