"""Generalization of pruned attack vectors into reusable DSL rules.

Each chain step becomes one rule: the conditions are the state attribute the
step's predecessor establishes plus the fingerprint features the step relies
on, the consequent names the step's action. Concrete machine ids disappear;
the rules apply to any subject whose facts match.
"""

from __future__ import annotations

import hashlib

from ..netmodel.model import Network
from ..rules import Condition, Rule
from .extract import AttackVector
from .fingerprint import version_tag, port_class

ACTION_SYMBOL = {
    "Ping": "Ping",
    "PortScan": "Port_Scan",
    "ServiceDetect": "Service_Detect",
    "VulnDetect": "Vuln_Detect",
    "Exploit": "Vuln_Exploitation",
    "PostExploit": "Post_Exploitation",
}


def generalize_to_rules(vector: AttackVector, network: Network) -> list[Rule]:
    """Rewrite a pruned chain into rules that parse under the DSL."""
    machine = network.by_id.get(vector.target)
    digest = hashlib.sha256(
        ("|".join(sorted(vector.fingerprint)) + vector.outcome).encode()
    ).hexdigest()[:8]
    group = f"VEC::{digest}"
    rules = []
    for index, action in enumerate(vector.chain):
        conditions = _conditions_for(action, machine)
        rules.append(
            Rule(
                group=group,
                index=index,
                conditions=tuple(conditions),
                consequent=Condition("Next_Action", ACTION_SYMBOL[action.kind]),
            )
        )
    return rules


def _conditions_for(action, machine) -> list[Condition]:
    kind = action.kind
    if kind == "Ping":
        return [Condition("Machine_Status", "UNKNOWN")]
    if kind == "PortScan":
        return [Condition("Machine_Status", "ON")]

    port = action.params.get("port")
    service = machine.service_at(port) if (machine and port is not None) else None

    if kind == "ServiceDetect":
        conds = [Condition("Port_Status", "OPEN")]
        if port is not None:
            conds.append(Condition("Port_Class", port_class(port)))
        return conds
    if kind == "VulnDetect":
        conds = [Condition("Service_Detect", "TRUE")]
        if service is not None:
            conds.append(Condition("Service_Name", service.name))
            conds.append(
                Condition("Service_Version", version_tag(service.name, service.version))
            )
        return conds
    if kind == "Exploit":
        conds = [Condition("Vuln_Detect", "TRUE")]
        if service is not None:
            conds.append(Condition("Service_Name", service.name))
        if machine is not None:
            conds.append(Condition("OS_Family", machine.os_family))
        return conds
    if kind == "PostExploit":
        return [Condition("Machine_Compromised", "TRUE")]
    raise ValueError(f"cannot generalize action kind {kind!r}")
