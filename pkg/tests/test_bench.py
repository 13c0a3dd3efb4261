"""Benchmark harness tests: experiments, reports, determinism, figures."""

import hashlib

import pytest

from recomply.bench import (
    ExperimentReport,
    ExperimentSpec,
    IOFailure,
    NetworkParams,
    ReportRow,
    check_comparison,
    default_comparison_spec,
    desk_suite,
    emit_report,
    load_spec,
    render_figures,
    run_comparison,
    run_first_compliance,
    run_retest,
    save_spec,
)


def tiny_retest_spec(name="t-retest", fraction=0.25):
    return ExperimentSpec(
        name=name,
        networks=(NetworkParams(5, 12, "small"),),
        mode="PT",
        change_fraction=fraction,
    )


class TestSpec:
    def test_round_trip(self, tmp_path):
        spec = default_comparison_spec()
        path = tmp_path / "spec.json"
        save_spec(spec, path)
        assert load_spec(path) == spec

    def test_desk_suite_shape(self):
        suite = desk_suite()
        assert len(suite) == 12
        profiles = {p.profile for p in suite}
        assert profiles == {"small", "medium", "large"}

    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentSpec("x", (), repetitions=0)
        with pytest.raises(ValueError):
            ExperimentSpec("x", (), mode="XX")


class TestFirstCompliance:
    def test_single_cell(self):
        spec = ExperimentSpec(
            name="f1", networks=(NetworkParams(3, 8, "small"),),
            mode="VA", policies=("blind",),
        )
        report = run_first_compliance(spec, master_seed=1)
        assert len(report.rows) == 1
        assert report.rows[0].coverage == 1.0

    def test_transfer_beats_blind(self):
        spec = ExperimentSpec(
            name="f2", networks=(NetworkParams(31, 60, "medium"),),
            mode="VA", policies=("blind", "esascf"),
        )
        report = run_first_compliance(spec, master_seed=1)
        agg = report.aggregate()
        assert agg["esascf"]["cost_mean"] <= 0.6 * agg["blind"]["cost_mean"]
        for row in report.rows:
            assert row.coverage == 1.0

    def test_rejects_change_fraction(self):
        spec = tiny_retest_spec()
        with pytest.raises(ValueError):
            run_first_compliance(spec)


class TestRetest:
    def test_rows_and_ratio(self):
        report = run_retest(tiny_retest_spec(), master_seed=3)
        assert len(report.rows) == 2
        phases = {r.phase for r in report.rows}
        assert phases == {"first", "retest"}
        ratio_row = report.ratios()[0]
        assert 0 < ratio_row.ratio <= 1.05

    def test_fraction_zero_cheap(self):
        report = run_retest(tiny_retest_spec(fraction=0.0), master_seed=3)
        assert report.ratios()[0].ratio <= 0.10

    def test_full_change_not_materially_worse(self):
        report = run_retest(tiny_retest_spec(fraction=1.0), master_seed=3)
        assert report.ratios()[0].ratio <= 1.05


@pytest.fixture(scope="module")
def report():
    spec = ExperimentSpec(
        name="cmp", networks=(NetworkParams(21, 10, "small"),),
        mode="PT", policies=("blind", "expert", "esascf"),
        change_fraction=0.25,
    )
    return run_comparison(spec, master_seed=2)


class TestComparison:

    def test_esascf_beats_blind(self, report):
        bands = report.band_costs()
        assert bands[("small", "esascf")] < bands[("small", "blind")]

    def test_expert_coverage_gap(self, report):
        rows = {r.policy: r for r in report.rows if r.phase in ("retest", "single")}
        assert rows["esascf"].coverage == 1.0
        assert rows["esascf"].coverage >= rows["expert"].coverage

    def test_checker_clean(self, report):
        assert check_comparison(report) == []

    def test_checker_flags_bad_ordering(self):
        report = ExperimentReport("bad")
        for policy, cost in (("blind", 1.0), ("expert", 5.0), ("esascf", 10.0)):
            report.rows.append(
                ReportRow("bad", 1, 10, "small", policy, "single", 0, "PT",
                          cost, 1.0, 0, 0)
            )
        assert check_comparison(report)


class TestEmit:
    def test_empty_report_header_only(self, tmp_path):
        path = emit_report(ExperimentReport("empty"), "csv", tmp_path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("experiment,seed,size,profile,policy")

    def test_two_rows_three_lines(self, tmp_path):
        report = ExperimentReport("two")
        for rep in (0, 1):
            report.rows.append(
                ReportRow("two", 1, 4, "small", "blind", "single", rep, "VA",
                          10.0, 1.0, 4, 0)
            )
        path = emit_report(report, "csv", tmp_path)
        assert len(path.read_text().splitlines()) == 3

    def test_identical_runs_identical_digests(self, tmp_path):
        digests = []
        for run in ("a", "b"):
            report = run_retest(tiny_retest_spec(name="det"), master_seed=9)
            path = emit_report(report, "csv", tmp_path / run)
            digests.append(hashlib.sha256(path.read_bytes()).hexdigest())
        assert digests[0] == digests[1]

    def test_jsonl_emission(self, tmp_path):
        report = run_retest(tiny_retest_spec(name="jl"), master_seed=9)
        path = emit_report(report, "jsonl", tmp_path)
        assert path.suffix == ".jsonl"
        assert len(path.read_text().splitlines()) == len(report.rows)

    def test_unwritable_path(self, tmp_path):
        target = tmp_path / "blocked"
        target.write_text("a file, not a directory")
        with pytest.raises(IOFailure):
            emit_report(ExperimentReport("x"), "csv", target)

    def test_figures_rendered(self, tmp_path):
        report = run_retest(tiny_retest_spec(name="fig"), master_seed=9)
        written = render_figures(report, tmp_path)
        assert written
        for path in written:
            assert path.exists() and path.stat().st_size > 0
