"""Baseline session policies.

* blind automation: exhaustive and unprioritized, scans the full port space
  of every machine and attempts every applicable exploit.
* scripted expert: value-ordered, scans the top-1024 ports plus well-known
  service ports, skips low-value machines, and follows the shipped rule
  corpus for the per-machine decision flow.

The rule-driven per-machine flow is shared with the expertise replay policy.
"""

from __future__ import annotations

from typing import Iterator

from ..assets import core_rules_text
from ..netmodel.generate import canonical_ports
from ..netmodel.model import EXTERNAL
from ..netmodel.simulate import normalize_ranges, ranges_member
from ..rules import Fact, RuleBase, WorkingMemory, parse_rulebase, recommend_next_action
from .actions import Action, port_scan
from .runner import SessionView

FULL_RANGE = ((1, 65535),)
DEFAULT_CHUNK = 4096
PER_MACHINE_ACTION_BUDGET = 600


def load_core_rules() -> RuleBase:
    return parse_rulebase(core_rules_text())


def common_scan_ranges(extra_ports=()) -> tuple:
    """Top-1024 plus well-known catalog ports, the non-blind scan strategy."""
    ports = [(1, 1024)] + [p for p in canonical_ports() if p > 1024]
    ports.extend(extra_ports)
    return normalize_ranges(ports)


def scan_chunks(chunk_size: int) -> list[tuple]:
    chunks = []
    lo = 1
    while lo <= 65535:
        hi = min(lo + chunk_size - 1, 65535)
        chunks.append(((lo, hi),))
        lo = hi + 1
    return chunks


class BlindPolicy:
    """Exhaustive machine-order sweep; never pivots before finishing the
    reachable work from the current vantage point."""

    def __init__(self, chunk_size: int = DEFAULT_CHUNK):
        self.name = "blind"
        self.chunk_size = chunk_size

    def actions(self, view: SessionView) -> Iterator[Action]:
        for machine_id in sorted(view.machine_ids):
            yield Action("Ping", machine_id)
            for chunk in scan_chunks(self.chunk_size):
                yield port_scan(machine_id, chunk)
            for port in sorted(view.open_ports.get(machine_id, ())):
                yield Action("ServiceDetect", machine_id, {"port": port})
            for port in sorted(
                p for (m, p) in view.services if m == machine_id
            ):
                yield Action("VulnDetect", machine_id, {"port": port})
            if view.mode == "PT":
                yield from exploit_everything(view, machine_id)


def exploit_everything(view: SessionView, machine_id: str) -> Iterator[Action]:
    """Attempt every exploit targeting every detected vulnerability, then all
    post modules of the ones that landed."""
    for vuln_id in sorted(view.detected_vulns(machine_id)):
        port = view.detected_vulns(machine_id)[vuln_id]
        for exploit in sorted(view.catalog.exploits_for.get(vuln_id, ()), key=lambda e: e.id):
            yield Action(
                "Exploit", machine_id,
                {"exploit": exploit.id, "vuln": vuln_id, "port": port},
            )
            result = view.exploit_results.get((machine_id, exploit.id))
            if result is not None and result.success:
                for module in exploit.post_modules:
                    yield Action(
                        "PostExploit", machine_id,
                        {"module": module, "exploit": exploit.id},
                    )


def exploit_until_success(view: SessionView, machine_id: str, vulns) -> Iterator[Action]:
    """Expert-style exploitation: best exploit first, stop per vuln on success."""
    for vuln_id in sorted(vulns):
        port = view.detected_vulns(machine_id)[vuln_id]
        candidates = sorted(
            view.catalog.exploits_for.get(vuln_id, ()),
            key=lambda e: (-e.success_prob, e.id),
        )
        for exploit in candidates:
            yield Action(
                "Exploit", machine_id,
                {"exploit": exploit.id, "vuln": vuln_id, "port": port},
            )
            result = view.exploit_results.get((machine_id, exploit.id))
            if result is not None and result.success:
                for module in exploit.post_modules:
                    yield Action(
                        "PostExploit", machine_id,
                        {"module": module, "exploit": exploit.id},
                    )
                break


def rule_flow_assess(
    view: SessionView,
    machine_id: str,
    rulebase: RuleBase,
    wm: WorkingMemory,
    scan_ranges: tuple,
    *,
    action_budget: int = PER_MACHINE_ACTION_BUDGET,
) -> Iterator[Action]:
    """Assess one machine by following rule recommendations to quiescence.

    Working-memory subjects: the machine id for machine-level attributes and
    "machine:port" for per-port attributes. Unprobed attributes start as
    UNKNOWN facts; refraction bounds re-probe loops.
    """
    if wm.value(machine_id, "Machine_Status") is None:
        wm.assert_fact(Fact(machine_id, "Machine_Status", "UNKNOWN"))
    tried_pivots = {view.pivot}
    port_subjects: list[str] = [
        f"{machine_id}:{port}" for port in sorted(view.open_ports.get(machine_id, ()))
        if wm.value(f"{machine_id}:{port}", "Port_Status")
    ]
    retry_variant: dict[str, int] = {}
    actions_left = action_budget

    def register_port(port: int, status: str) -> None:
        subject = f"{machine_id}:{port}"
        fresh = wm.value(subject, "Port_Status") is None
        wm.assert_fact(Fact(subject, "Port_Status", status))
        wm.assert_fact(Fact(subject, "Service_Traffic", "FALSE"))
        if fresh and subject not in port_subjects:
            port_subjects.append(subject)

    def ingest_scan(action: Action) -> None:
        for port in sorted(view.open_ports.get(machine_id, ())):
            if ranges_member(action.params["ports"], port):
                register_port(port, "OPEN")
        for port in canonical_ports():
            if ranges_member(action.params["ports"], port) and ranges_member(
                normalize_ranges(view.filtered_ranges.get(machine_id, ())), port
            ):
                register_port(port, "FILTERED")

    while actions_left > 0:
        progressed = False

        wm.assert_fact(
            Fact(
                machine_id,
                "NET_Footprint",
                "TRUE" if _untried_pivots(view, tried_pivots) else "FALSE",
            )
        )
        rec = recommend_next_action(rulebase, wm, machine_id)
        if rec is not None:
            progressed = True
            actions_left -= 1
            symbol = rec.value
            if symbol == "Machine_Status":
                yield Action("Ping", machine_id)
                wm.assert_fact(
                    Fact(machine_id, "Machine_Status", view.machine_status[machine_id])
                )
            elif symbol == "Port_Scan":
                action = port_scan(machine_id, scan_ranges)
                yield action
                ingest_scan(action)
            elif symbol == "Change_Scanning_pivot":
                candidates = _untried_pivots(view, tried_pivots)
                if candidates:
                    pivot = candidates[0]
                    tried_pivots.add(pivot)
                    yield Action("ChangePivot", machine_id, {"pivot": pivot})
                    yield Action("Ping", machine_id)
                    wm.assert_fact(
                        Fact(machine_id, "Machine_Status", view.machine_status[machine_id])
                    )
            elif symbol == "Stop_Scanning":
                return
            continue

        for subject in list(port_subjects):
            port = int(subject.rsplit(":", 1)[1])
            rec = recommend_next_action(rulebase, wm, subject)
            if rec is None:
                continue
            progressed = True
            actions_left -= 1
            symbol = rec.value
            if symbol == "Service_Detect":
                yield Action("ServiceDetect", machine_id, {"port": port})
                _ingest_detect(view, wm, machine_id, port)
            elif symbol in ("Service_Re-Detect", "Change_Detect_pivot", "Change_Detect_Mode"):
                variant = retry_variant.get(subject, 0) + 1
                retry_variant[subject] = variant
                if port in view.open_ports.get(machine_id, ()):
                    yield Action("ServiceDetect", machine_id, {"port": port, "variant": variant})
                    _ingest_detect(view, wm, machine_id, port)
            elif symbol == "Vuln_Detect":
                yield Action("VulnDetect", machine_id, {"port": port})
                _ingest_check(view, wm, machine_id, port)
            elif symbol in ("Vuln_Re-Detect", "Change_Detect_Script"):
                variant = retry_variant.get(subject, 0) + 1
                retry_variant[subject] = variant
                yield Action("VulnDetect", machine_id, {"port": port, "variant": variant})
                _ingest_check(view, wm, machine_id, port)
            elif symbol == "Vuln_Exploitation":
                if view.mode == "PT":
                    vulns = [
                        v for v, p in view.detected_vulns(machine_id).items() if p == port
                    ]
                    yield from exploit_until_success(view, machine_id, vulns)
            elif symbol == "Port_ByPass-Scan":
                action = port_scan(machine_id, ((port, port),))
                yield action
                ingest_scan(action)
            elif symbol in ("Stop_Probing", "Stop_Detection", "Stop_Vuln-Assessment",
                            "Change_Probing_pivot"):
                continue
            break

        if not progressed:
            return


def _untried_pivots(view: SessionView, tried: set[str]) -> list[str]:
    options = [EXTERNAL] + [m for m, _ in view.compromised.entries()]
    return sorted(o for o in options if o not in tried)


def _ingest_detect(view: SessionView, wm: WorkingMemory, machine_id: str, port: int) -> None:
    subject = f"{machine_id}:{port}"
    found = view.services.get((machine_id, port))
    if found is None:
        wm.assert_fact(Fact(subject, "Service_Detect", "FALSE"))
        return
    name, version = found
    wm.assert_fact(Fact(subject, "Service_Detect", "TRUE"))
    major = version.split(".")[0]
    known = any(
        v.matches == (name, major) for v in view.catalog.vulnerabilities
    )
    wm.assert_fact(Fact(subject, "Service_Vuln", "TRUE" if known else "FALSE"))


def _ingest_check(view: SessionView, wm: WorkingMemory, machine_id: str, port: int) -> None:
    subject = f"{machine_id}:{port}"
    hits = [v for v, p in view.detected_vulns(machine_id).items() if p == port]
    wm.assert_fact(Fact(subject, "Vuln_Detect", "TRUE" if hits else "FALSE"))


class ScriptedExpertPolicy:
    """Simulated human expert over the rule corpus.

    Prioritizes machines by declared asset value, skips machines at or below
    the skill's skip threshold, and scans only the common port set.
    """

    SKIP_THRESHOLD = {"typical": 2, "thorough": 0}

    def __init__(self, skill: str = "typical", seed: int = 0):
        if skill not in self.SKIP_THRESHOLD:
            raise ValueError(f"unknown skill {skill!r}")
        self.name = f"expert-{skill}"
        self.skill = skill
        self.seed = seed

    def actions(self, view: SessionView) -> Iterator[Action]:
        rulebase = load_core_rules()
        wm = WorkingMemory()
        threshold = self.SKIP_THRESHOLD[self.skill]
        scan_ranges = common_scan_ranges()
        order = sorted(view.inventory, key=lambda item: (-item[1], item[0]))
        for machine_id, value, _ in order:
            if value <= threshold:
                continue
            yield from rule_flow_assess(view, machine_id, rulebase, wm, scan_ranges)


def blind_policy(chunk_size: int = DEFAULT_CHUNK) -> BlindPolicy:
    return BlindPolicy(chunk_size)


def scripted_expert_policy(skill: str = "typical", seed: int = 0) -> ScriptedExpertPolicy:
    return ScriptedExpertPolicy(skill, seed)
