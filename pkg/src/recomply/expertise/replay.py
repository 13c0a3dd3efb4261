"""Expertise replay: the esascf session policy.

Per machine, in order of preference:
  a. unchanged machine with stored expertise: verification only (ping plus a
     spot-check of the previously open ports), assessed on match;
  b. stored expertise for a similar context: replay the record's chain with
     subjects adapted to this machine, falling back on step failure;
  c. rule-corpus flow (same engine the scripted expert uses).

The policy never skips a machine, so coverage stays complete.
"""

from __future__ import annotations

from typing import Iterator

from ..netmodel.model import ChangeSet, Network
from ..rules import Fact, WorkingMemory
from ..session.actions import Action, port_scan
from ..session.policies import (
    common_scan_ranges,
    exploit_until_success,
    load_core_rules,
    rule_flow_assess,
)
from ..session.runner import SessionView
from .extract import AttackVector
from .fingerprint import ExtractionConfig, fingerprint_of
from .store import ExpertiseRecord, ExpertiseStore

DEFAULT_SIMILARITY = 0.6


class EsascfPolicy:
    name = "esascf"

    def __init__(
        self,
        network: Network,
        changeset: ChangeSet | None,
        store: ExpertiseStore,
        *,
        cfg: ExtractionConfig | None = None,
        similarity_threshold: float = DEFAULT_SIMILARITY,
    ):
        self.network = network
        self.changeset = changeset
        self.store = store
        self.cfg = cfg or ExtractionConfig()
        self.threshold = similarity_threshold

    def actions(self, view: SessionView) -> Iterator[Action]:
        rulebase = load_core_rules()
        wm = WorkingMemory()
        scan_ranges = common_scan_ranges()
        for machine_id in sorted(view.machine_ids):
            fingerprint = fingerprint_of(self.network, machine_id, self.cfg.neighbor_radius)
            record = self.store.by_target(machine_id) or self._best_match(fingerprint)

            if self._verification_eligible(machine_id) and record is not None:
                matched = yield from self._verify(view, machine_id, record)
                if matched:
                    continue

            replayed = False
            if record is not None:
                replayed = yield from self._replay_chain(view, machine_id, record, wm)
            if not replayed:
                yield from rule_flow_assess(view, machine_id, rulebase, wm, scan_ranges)

    def _verification_eligible(self, machine_id: str) -> bool:
        return (
            self.changeset is not None
            and machine_id not in self.changeset.mutated_machines
        )

    def _best_match(self, fingerprint: frozenset[str]) -> ExpertiseRecord | None:
        ranked = self.store.match_context(fingerprint, self.threshold)
        return self.store.get(ranked[0]) if ranked else None

    def _verify(self, view: SessionView, machine_id: str, record: ExpertiseRecord):
        """Ping plus spot-check; True iff the prior picture still holds."""
        expected = _expected_open_ports(record.vector)
        yield Action("Ping", machine_id)
        on = view.machine_status.get(machine_id) == "ON"
        if not expected:
            return True  # nothing was exposed before; the ping is the check
        if not on:
            return False
        yield port_scan(machine_id, sorted(expected))
        return expected <= view.open_ports.get(machine_id, set())

    def _replay_chain(self, view: SessionView, machine_id: str, record: ExpertiseRecord, wm):
        """Execute the stored chain against this machine; False on failure."""
        chain = record.vector.chain
        attempted: set[str] = set()
        pinged = view.machine_status.get(machine_id) == "ON"
        for action in chain:
            kind = action.kind
            if kind == "Ping":
                if pinged:
                    continue
                pinged = True
                yield Action("Ping", machine_id)
                status = view.machine_status.get(machine_id)
                wm.assert_fact(Fact(machine_id, "Machine_Status", status or "UNKNOWN"))
                if status != "ON" and len(chain) > 1:
                    return False
            elif kind == "PortScan":
                if not pinged:
                    pinged = True
                    yield Action("Ping", machine_id)
                    wm.assert_fact(
                        Fact(
                            machine_id,
                            "Machine_Status",
                            view.machine_status.get(machine_id, "UNKNOWN"),
                        )
                    )
                    if view.machine_status.get(machine_id) != "ON":
                        return False
                yield port_scan(machine_id, action.params["ports"])
                for port in sorted(view.open_ports.get(machine_id, ())):
                    subject = f"{machine_id}:{port}"
                    wm.assert_fact(Fact(subject, "Port_Status", "OPEN"))
                    wm.assert_fact(Fact(subject, "Service_Traffic", "FALSE"))
            elif kind == "ServiceDetect":
                port = action.params["port"]
                if port not in view.open_ports.get(machine_id, set()):
                    return False
                yield Action("ServiceDetect", machine_id, dict(action.params))
                found = view.services.get((machine_id, port))
                subject = f"{machine_id}:{port}"
                if found is None:
                    wm.assert_fact(Fact(subject, "Service_Detect", "FALSE"))
                    return False
                wm.assert_fact(Fact(subject, "Service_Detect", "TRUE"))
            elif kind == "VulnDetect":
                port = action.params["port"]
                if (machine_id, port) not in view.services:
                    return False
                yield Action("VulnDetect", machine_id, dict(action.params))
                subject = f"{machine_id}:{port}"
                hits = [v for v, p in view.detected_vulns(machine_id).items() if p == port]
                wm.assert_fact(Fact(subject, "Vuln_Detect", "TRUE" if hits else "FALSE"))
            elif kind == "Exploit":
                if view.mode != "PT":
                    continue
                vuln = action.params.get("vuln")
                if vuln not in view.detected_vulns(machine_id):
                    continue  # not detected here: patched or missed, skip quietly
                params = dict(action.params)
                params["port"] = view.detected_vulns(machine_id)[vuln]
                attempted.add(vuln)
                yield Action("Exploit", machine_id, params)
                result = view.exploit_results.get((machine_id, params["exploit"]))
                if result is None or not result.success:
                    return False
            elif kind == "PostExploit":
                if view.mode != "PT" or machine_id not in view.compromised:
                    continue
                yield Action("PostExploit", machine_id, dict(action.params))
        if view.mode == "PT":
            residual = sorted(set(view.detected_vulns(machine_id)) - attempted)
            if residual:
                yield from exploit_until_success(view, machine_id, residual)
        return True


def _expected_open_ports(vector: AttackVector) -> set[int]:
    ports = {
        a.params["port"] for a in vector.chain if a.kind == "ServiceDetect"
    }
    if not ports:
        for action in vector.chain:
            if action.kind == "PortScan":
                for lo, hi in action.params["ports"]:
                    if hi - lo <= 16:
                        ports.update(range(lo, hi + 1))
    return ports


def replay_plan(
    network: Network,
    changeset: ChangeSet | None,
    store: ExpertiseStore,
    *,
    cfg: ExtractionConfig | None = None,
    similarity_threshold: float = DEFAULT_SIMILARITY,
) -> EsascfPolicy:
    """Build the esascf policy for a network, optionally changeset-aware."""
    return EsascfPolicy(
        network, changeset, store, cfg=cfg, similarity_threshold=similarity_threshold
    )
