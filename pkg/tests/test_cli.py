"""CLI surface tests via click's runner."""

import hashlib
import json

import pytest
from click.testing import CliRunner

from recomply.bench import ExperimentSpec, NetworkParams, save_spec
from recomply.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args):
    result = runner.invoke(main, [str(a) for a in args])
    if result.exception and not isinstance(result.exception, SystemExit):
        raise result.exception
    return result


class TestGenMutateRun:
    def test_gen_run_roundtrip(self, runner, tmp_path):
        scenario = tmp_path / "lan.json"
        result = invoke(runner, "gen", "--seed", 3, "--size", 8, "--profile", "small",
                        "--out", scenario)
        assert result.exit_code == 0
        assert scenario.exists()

        trace = tmp_path / "run.jsonl"
        result = invoke(runner, "run", "--scenario", scenario, "--policy", "blind",
                        "--mode", "va", "--seed", 1, "--out", trace)
        assert result.exit_code == 0
        assert "coverage=1.000" in result.output

    def test_mutate(self, runner, tmp_path):
        scenario = tmp_path / "lan.json"
        invoke(runner, "gen", "--seed", 3, "--size", 8, "--profile", "small",
               "--out", scenario)
        mutated = tmp_path / "mutated.json"
        changes = tmp_path / "changes.json"
        result = invoke(runner, "mutate", "--scenario", scenario, "--fraction", 0.25,
                        "--seed", 9, "--out", mutated, "--changeset-out", changes)
        assert result.exit_code == 0
        data = json.loads(changes.read_text())
        assert len(data["mutated_machines"]) == 2

    def test_capture_then_esascf_run(self, runner, tmp_path):
        scenario = tmp_path / "lan.json"
        invoke(runner, "gen", "--seed", 3, "--size", 8, "--profile", "small",
               "--out", scenario)
        store = tmp_path / "store.jsonl"
        first = tmp_path / "first.jsonl"
        result = invoke(runner, "run", "--scenario", scenario, "--policy", "esascf",
                        "--mode", "pt", "--seed", 1, "--out", first,
                        "--store", store, "--capture", "--auto-approve")
        assert result.exit_code == 0
        assert store.exists()
        replay = tmp_path / "replay.jsonl"
        result = invoke(runner, "run", "--scenario", scenario, "--policy", "esascf",
                        "--mode", "pt", "--seed", 2, "--out", replay, "--store", store)
        assert result.exit_code == 0


class TestBench:
    def write_spec(self, tmp_path, **overrides):
        spec = ExperimentSpec(
            name=overrides.pop("name", "cli-retest"),
            networks=(NetworkParams(5, 10, "small"),),
            mode="PT",
            change_fraction=overrides.pop("change_fraction", 0.25),
            **overrides,
        )
        path = tmp_path / "spec.json"
        save_spec(spec, path)
        return path

    def test_bench_deterministic_bytes(self, runner, tmp_path):
        spec = self.write_spec(tmp_path)
        digests = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            result = invoke(runner, "bench", "--spec", spec, "--out", out, "--seed", 7)
            assert result.exit_code == 0
            digests.append(
                hashlib.sha256((out / "cli-retest.csv").read_bytes()).hexdigest()
            )
        assert digests[0] == digests[1]

    def test_bench_check_passes(self, runner, tmp_path):
        spec = self.write_spec(tmp_path)
        result = invoke(runner, "bench", "--spec", spec, "--out", tmp_path / "o",
                        "--seed", 7, "--check")
        assert result.exit_code == 0
        assert "all checks passed" in result.output

    def test_bench_figures_and_report_cmd(self, runner, tmp_path):
        spec = self.write_spec(tmp_path)
        out = tmp_path / "o"
        result = invoke(runner, "bench", "--spec", spec, "--out", out, "--seed", 7,
                        "--figures")
        assert result.exit_code == 0
        assert list(out.glob("*.png"))

        figs = tmp_path / "figs"
        result = invoke(runner, "report", "--rows", out / "cli-retest.csv", "--out", figs)
        assert result.exit_code == 0
        assert list(figs.glob("*.png"))


class TestExpertiseCommands:
    def seed_store(self, runner, tmp_path):
        scenario = tmp_path / "lan.json"
        invoke(runner, "gen", "--seed", 3, "--size", 6, "--profile", "small",
               "--out", scenario)
        store = tmp_path / "store.jsonl"
        invoke(runner, "run", "--scenario", scenario, "--policy", "esascf",
               "--mode", "pt", "--seed", 1, "--out", tmp_path / "t.jsonl",
               "--store", store, "--capture")
        return store

    def test_list_show_approve_reject_compact(self, runner, tmp_path):
        store = self.seed_store(runner, tmp_path)
        listed = invoke(runner, "expertise", "list", "--store", store)
        assert listed.exit_code == 0
        ids = [line.split()[0] for line in listed.output.splitlines()]
        assert ids

        shown = invoke(runner, "expertise", "show", "--store", store, ids[0])
        assert shown.exit_code == 0
        assert json.loads(shown.output)["record_id"] == ids[0]

        approved = invoke(runner, "expertise", "approve", "--store", store, ids[0])
        assert "validated" in approved.output
        if len(ids) > 1:
            rejected = invoke(runner, "expertise", "reject", "--store", store, ids[1])
            assert "rejected" in rejected.output

        again = runner.invoke(
            main, ["expertise", "approve", "--store", str(store), ids[0]]
        )
        assert again.exit_code != 0  # not pending any more

        compacted = invoke(runner, "expertise", "compact", "--store", store)
        assert compacted.exit_code == 0
