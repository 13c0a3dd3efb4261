"""Command-line interface.

    recomply gen        generate a scenario file
    recomply mutate     apply a seeded change set to a scenario
    recomply run        execute one compliance session
    recomply bench      run an experiment spec, emit reports (and figures)
    recomply report     render figures from an emitted report
    recomply expertise  inspect and review the expertise store
    recomply serve      HTTP API (and review console, when built)
"""

from __future__ import annotations

import csv as csv_mod
import json
import sys
from pathlib import Path

import click

from . import __version__
from .bench import (
    ExperimentReport,
    ReportRow,
    check_comparison,
    emit_report,
    load_spec,
    render_figures,
    run_comparison,
    run_first_compliance,
    run_retest,
)
from .expertise import ExpertiseStore, capture_and_store, replay_plan
from .netmodel import (
    ChangeSet,
    apply_changeset,
    generate_testbed,
    load_scenario,
    save_scenario,
)
from .session import blind_policy, run_session, scripted_expert_policy


@click.group()
@click.version_option(__version__)
def main():
    """Security-compliance testing with captured, replayable expertise."""


@main.command()
@click.option("--seed", type=int, required=True)
@click.option("--size", type=int, required=True)
@click.option("--profile", type=click.Choice(["small", "medium", "large"]), required=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
def gen(seed, size, profile, out):
    """Generate a seeded virtual LAN scenario."""
    network = generate_testbed(seed, size, profile)
    save_scenario(network, out)
    click.echo(f"wrote {out} ({len(network.machines)} machines, "
               f"{len(network.subnets)} subnets)")


@main.command()
@click.option("--scenario", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--fraction", type=float, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--changeset-out", type=click.Path(dir_okay=False, path_type=Path))
def mutate(scenario, fraction, seed, out, changeset_out):
    """Apply a seeded configuration change set to a scenario."""
    network = load_scenario(scenario)
    mutated, changeset = apply_changeset(network, fraction, seed)
    save_scenario(mutated, out)
    if changeset_out:
        changeset_out.write_text(
            json.dumps(changeset.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    click.echo(f"wrote {out} ({len(changeset.mutated_machines)} machines mutated)")


@main.command(name="run")
@click.option("--scenario", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--policy", type=click.Choice(["blind", "expert", "esascf"]), required=True)
@click.option("--mode", type=click.Choice(["va", "pt"]), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--store", type=click.Path(path_type=Path), help="expertise store (esascf/capture)")
@click.option("--changeset", type=click.Path(exists=True, path_type=Path),
              help="change-set JSON enabling the verification path")
@click.option("--budget", type=float, default=10_000_000.0, show_default=True)
@click.option("--capture/--no-capture", default=False,
              help="capture expertise from this session into the store")
@click.option("--auto-approve", is_flag=True, help="validate captured records without review")
def run_cmd(scenario, policy, mode, seed, out, store, changeset, budget, capture, auto_approve):
    """Run one compliance session and write its trace."""
    network = load_scenario(scenario)
    change = None
    if changeset:
        change = ChangeSet.from_dict(json.loads(changeset.read_text(encoding="utf-8")))
    expertise = ExpertiseStore.open(store) if store else ExpertiseStore()
    if policy == "blind":
        chosen = blind_policy()
    elif policy == "expert":
        chosen = scripted_expert_policy("typical")
    else:
        chosen = replay_plan(network, change, expertise)
    trace = run_session(
        network, chosen, mode.upper(),
        budget=budget, seed=seed, network_ref={"scenario": str(scenario)},
    )
    trace.save(out)
    if capture:
        stats = capture_and_store(
            trace, network, expertise,
            auto_approve=auto_approve, session_id=out.stem,
        )
        click.echo(f"captured {stats['vectors']} vectors "
                   f"({stats['accepted']} accepted, {stats['superseded']} superseded)")
    click.echo(
        f"wrote {out}: cost={trace.total_cost:.2f} coverage={trace.coverage:.3f} "
        f"steps={len(trace.steps)} compromised={len(trace.compromised)}"
    )


def _pick_experiment(spec):
    if spec.change_fraction is None:
        return run_first_compliance
    if {"blind", "expert", "esascf"} <= set(spec.policies):
        return run_comparison
    return run_retest


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="master seed")
@click.option("--check", is_flag=True, help="exit 2 on acceptance-threshold violations")
@click.option("--figures", is_flag=True, help="render figures alongside the tables")
def bench(spec_path, out, fmt, seed, check, figures):
    """Run an experiment spec and emit machine-readable reports.

    The experiment family is inferred from the spec: no change_fraction runs
    first-compliance; change_fraction plus all three policies runs the
    comparison; otherwise the re-test experiment.
    """
    spec = load_spec(spec_path)
    runner = _pick_experiment(spec)
    report = runner(spec, master_seed=seed)
    main_file = emit_report(report, fmt, out)
    click.echo(f"wrote {main_file} ({len(report.rows)} rows)")
    if figures:
        for path in render_figures(report, out):
            click.echo(f"wrote {path}")
    if check:
        problems = []
        if runner is run_comparison:
            problems.extend(check_comparison(report))
        for row in report.ratios():
            fraction = spec.change_fraction or 0.0
            bound = fraction + (1 - fraction) * 0.10 + 0.05
            if row.ratio > bound:
                problems.append(
                    f"ratio {row.ratio:.3f} above bound {bound:.3f} "
                    f"(seed={row.seed}, size={row.size})"
                )
        if problems:
            for problem in problems:
                click.echo(f"CHECK FAILED: {problem}", err=True)
            sys.exit(2)
        click.echo("all checks passed")


@main.command()
@click.option("--rows", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, help="rows CSV emitted by bench")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
def report(rows, out):
    """Render figures from an emitted report table."""
    loaded = ExperimentReport(rows.stem)
    with rows.open(encoding="utf-8") as fh:
        for record in csv_mod.DictReader(fh):
            loaded.rows.append(
                ReportRow(
                    experiment=record["experiment"],
                    seed=int(record["seed"]),
                    size=int(record["size"]),
                    profile=record["profile"],
                    policy=record["policy"],
                    phase=record["phase"],
                    repetition=int(record["repetition"]),
                    mode=record["mode"],
                    total_cost=float(record["total_cost"]),
                    coverage=float(record["coverage"]),
                    vectors_extracted=int(record["vectors_extracted"]),
                    compromised=int(record["compromised"]),
                    ratio=float(record["ratio"]) if record["ratio"] else None,
                )
            )
    for path in render_figures(loaded, out):
        click.echo(f"wrote {path}")


@main.group()
def expertise():
    """Inspect and review the expertise store."""


store_option = click.option(
    "--store", "store_path", type=click.Path(path_type=Path),
    default=Path("store.jsonl"), show_default=True,
)


@expertise.command(name="list")
@store_option
@click.option("--status", type=click.Choice(["pending", "validated", "rejected"]))
def expertise_list(store_path, status):
    store = ExpertiseStore.open(store_path)
    for record in store.records(status):
        click.echo(
            f"{record.record_id}  {record.status:9s}  L={record.likelihood:.4f}  "
            f"{record.vector.target}  {record.vector.outcome}  "
            f"{len(record.vector.chain)} steps"
        )


@expertise.command(name="show")
@store_option
@click.argument("record_id")
def expertise_show(store_path, record_id):
    record = ExpertiseStore.open(store_path).get(record_id)
    if record is None:
        raise click.ClickException(f"no record {record_id!r}")
    click.echo(json.dumps(record.to_dict(), indent=2, sort_keys=True))


def _decide(store_path, record_id, decision, reviewer):
    store = ExpertiseStore.open(store_path)
    try:
        record = store.review_decide(record_id, decision, reviewer)
    except KeyError as exc:
        raise click.ClickException(str(exc))
    except Exception as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{record.record_id} -> {record.status}")


@expertise.command(name="approve")
@store_option
@click.option("--reviewer", default="cli", show_default=True)
@click.argument("record_id")
def expertise_approve(store_path, reviewer, record_id):
    _decide(store_path, record_id, "approve", reviewer)


@expertise.command(name="reject")
@store_option
@click.option("--reviewer", default="cli", show_default=True)
@click.argument("record_id")
def expertise_reject(store_path, reviewer, record_id):
    _decide(store_path, record_id, "reject", reviewer)


@expertise.command(name="compact")
@store_option
def expertise_compact(store_path):
    store = ExpertiseStore.open(store_path)
    written = store.compact()
    click.echo(f"compacted {store_path} to {written} lines")


@main.command()
@click.option("--listen", default="127.0.0.1:8731", show_default=True, metavar="HOST:PORT")
@click.option("--workdir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True)
@click.option("--ui-dir", type=click.Path(file_okay=False, path_type=Path),
              help="static console assets (defaults to ./frontend/dist if present)")
def serve(listen, workdir, ui_dir):
    """Serve the HTTP API (and the review console when assets exist)."""
    import uvicorn

    from .api import create_app

    if ui_dir is None:
        candidate = Path("frontend/dist")
        ui_dir = candidate if candidate.is_dir() else None
    host, _, port = listen.rpartition(":")
    app = create_app(workdir, ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
