"""Desk-scale reproductions of the framework's three experiment families:
first compliance, re-testing after configuration change, and the three-way
policy comparison. All output is a pure function of (spec, master seed)."""

from __future__ import annotations

import logging

from ..expertise import ExpertiseStore, capture_and_store, capture_vectors, replay_plan
from ..netmodel import Network, RngContext, apply_changeset, generate_testbed
from ..session import blind_policy, run_session, scripted_expert_policy
from ..session.trace import SessionTrace
from .report import ExperimentReport, ReportRow
from .spec import ExperimentSpec, NetworkParams

log = logging.getLogger(__name__)

CAPTURE_TIMESTAMP = "1970-01-01T00:00:00+00:00"  # logical stamp: reports carry no time


def _policy_for(name: str, network: Network, store: ExpertiseStore | None, changeset):
    if name == "blind":
        return blind_policy()
    if name == "expert":
        return scripted_expert_policy("typical")
    if name == "expert-thorough":
        return scripted_expert_policy("thorough")
    if name == "esascf":
        return replay_plan(network, changeset, store if store is not None else ExpertiseStore())
    raise ValueError(f"unknown policy {name!r}")


def _row(spec, params, policy, phase, rep, trace: SessionTrace, network, ratio=None) -> ReportRow:
    return ReportRow(
        experiment=spec.name,
        seed=params.seed,
        size=params.size,
        profile=params.profile,
        policy=policy,
        phase=phase,
        repetition=rep,
        mode=spec.mode,
        total_cost=trace.total_cost,
        coverage=trace.coverage,
        vectors_extracted=len(capture_vectors(trace, network)),
        compromised=len(trace.compromised),
        ratio=ratio,
    )


def _seed_store_from_sibling(
    params: NetworkParams, mode: str, ctx: RngContext, rep: int
) -> ExpertiseStore:
    """First-compliance transfer setup: expertise captured on a sibling
    network of the same profile under a different seed."""
    sibling_seed = ctx.derive("sibling", params.seed, rep) % (2**31)
    sibling = generate_testbed(sibling_seed, params.size, params.profile)
    store = ExpertiseStore()
    trace = run_session(
        sibling,
        replay_plan(sibling, None, store),
        mode,
        seed=ctx.derive("sibling-session", params.seed, rep),
    )
    capture_and_store(
        trace, sibling, store, auto_approve=True,
        session_id=f"sibling-{params.seed}-{rep}", timestamp=CAPTURE_TIMESTAMP,
    )
    return store


def run_first_compliance(spec: ExperimentSpec, master_seed: int = 0) -> ExperimentReport:
    """First assessment of unseen networks; esascf runs with expertise
    transferred from a sibling network."""
    if spec.change_fraction is not None:
        raise ValueError("first-compliance spec must not set change_fraction")
    ctx = RngContext(master_seed)
    report = ExperimentReport(spec.name)
    for params in spec.networks:
        network = generate_testbed(*params.as_tuple())
        for policy_name in spec.policies:
            for rep in range(spec.repetitions):
                store = None
                if policy_name == "esascf":
                    store = _seed_store_from_sibling(params, spec.mode, ctx, rep)
                try:
                    policy = _policy_for(policy_name, network, store, None)
                    trace = run_session(
                        network, policy, spec.mode,
                        seed=ctx.derive("first", *params.as_tuple(), policy_name, rep),
                        network_ref={"seed": params.seed, "size": params.size,
                                     "profile": params.profile},
                    )
                except Exception:
                    log.exception(
                        "cell failed: %s %s rep=%d", params, policy_name, rep
                    )
                    continue
                report.rows.append(
                    _row(spec, params, policy_name, "single", rep, trace, network)
                )
    return report


def _first_and_changeset(spec, params, ctx, rep):
    network = generate_testbed(*params.as_tuple())
    store = ExpertiseStore()
    first = run_session(
        network,
        replay_plan(network, None, store),
        spec.mode,
        seed=ctx.derive("retest-first", *params.as_tuple(), rep),
        network_ref={"seed": params.seed, "size": params.size, "profile": params.profile},
    )
    capture_and_store(
        first, network, store, auto_approve=True,
        session_id=f"first-{params.seed}-{rep}", timestamp=CAPTURE_TIMESTAMP,
    )
    mutated, changeset = apply_changeset(
        network, spec.change_fraction, ctx.derive("change", *params.as_tuple(), rep)
    )
    return network, store, first, mutated, changeset


def run_retest(spec: ExperimentSpec, master_seed: int = 0) -> ExperimentReport:
    """Capture on the first run, mutate, re-test with replay; reports include
    the re-test/first cost ratio per network."""
    if spec.change_fraction is None:
        raise ValueError("retest spec requires change_fraction")
    ctx = RngContext(master_seed)
    report = ExperimentReport(spec.name)
    for params in spec.networks:
        for rep in range(spec.repetitions):
            try:
                network, store, first, mutated, changeset = _first_and_changeset(
                    spec, params, ctx, rep
                )
                retest = run_session(
                    mutated,
                    replay_plan(mutated, changeset, store),
                    spec.mode,
                    seed=ctx.derive("retest", *params.as_tuple(), rep),
                )
            except Exception:
                log.exception("retest cell failed: %s rep=%d", params, rep)
                continue
            ratio = retest.total_cost / first.total_cost if first.total_cost else 0.0
            report.rows.append(_row(spec, params, "esascf", "first", rep, first, network))
            report.rows.append(
                _row(spec, params, "esascf", "retest", rep, retest, mutated, ratio=ratio)
            )
    return report


def run_comparison(spec: ExperimentSpec, master_seed: int = 0) -> ExperimentReport:
    """All policies on identical mutated networks; esascf re-tests with the
    expertise captured on the clean first run."""
    if spec.change_fraction is None:
        raise ValueError("comparison spec requires change_fraction")
    missing = {"blind", "expert", "esascf"} - set(spec.policies)
    if missing:
        raise ValueError(f"comparison spec missing policies: {sorted(missing)}")
    ctx = RngContext(master_seed)
    report = ExperimentReport(spec.name)
    for params in spec.networks:
        for rep in range(spec.repetitions):
            try:
                network, store, first, mutated, changeset = _first_and_changeset(
                    spec, params, ctx, rep
                )
            except Exception:
                log.exception("comparison setup failed: %s rep=%d", params, rep)
                continue
            report.rows.append(_row(spec, params, "esascf", "first", rep, first, network))
            for policy_name in spec.policies:
                try:
                    if policy_name == "esascf":
                        policy = replay_plan(mutated, changeset, store)
                        phase = "retest"
                    else:
                        policy = _policy_for(policy_name, mutated, None, None)
                        phase = "single"
                    trace = run_session(
                        mutated, policy, spec.mode,
                        seed=ctx.derive("compare", *params.as_tuple(), policy_name, rep),
                    )
                except Exception:
                    log.exception(
                        "comparison cell failed: %s %s rep=%d", params, policy_name, rep
                    )
                    continue
                ratio = (
                    trace.total_cost / first.total_cost
                    if policy_name == "esascf" and first.total_cost
                    else None
                )
                report.rows.append(
                    _row(spec, params, policy_name, phase, rep, trace, mutated, ratio=ratio)
                )
    return report


def check_comparison(report: ExperimentReport) -> list[str]:
    """Acceptance-style threshold checks; returns human-readable violations."""
    problems = []
    bands = report.band_costs()
    profiles = {profile for profile, _ in bands}
    for profile in sorted(profiles):
        esascf = bands.get((profile, "esascf"))
        expert = bands.get((profile, "expert"))
        blind = bands.get((profile, "blind"))
        if None in (esascf, expert, blind):
            problems.append(f"{profile}: missing policy rows")
            continue
        if not esascf < expert < blind:
            problems.append(
                f"{profile}: cost ordering broken "
                f"(esascf={esascf:.2f}, expert={expert:.2f}, blind={blind:.2f})"
            )
    by_cell: dict[tuple, dict[str, ReportRow]] = {}
    for row in report.rows:
        if row.phase in ("retest", "single"):
            by_cell.setdefault((row.seed, row.size, row.repetition), {})[row.policy] = row
    for cell, rows in sorted(by_cell.items()):
        es = rows.get("esascf")
        ex = rows.get("expert")
        if es is None:
            continue
        if es.coverage != 1.0:
            problems.append(f"{cell}: esascf coverage {es.coverage} != 1.0")
        if ex is not None and es.coverage < ex.coverage:
            problems.append(f"{cell}: esascf coverage below expert")
    return problems
