"""
Constraint families. Every generated constraint and every reported violation
carries one of these tags so that a program row or a failed check can be
traced back to the rule it enforces.

SPDX-License-Identifier: EUPL-1.2
"""

from syssynth._config import StrEnum


class Family(StrEnum):
    # task assignment and routing
    ATOMIC_TASK = "atomic_task"
    FLOW = "flow"
    BUDGET = "budget"
    BANDWIDTH = "bandwidth"
    # structure synthesis
    ACTIVE_DEVICES = "active_devices"
    CNX_CAPACITY = "cnx_capacity"
    FULL_BUDGET = "full_budget"
    SELECT_TASK = "select_task"
    DATATYPES = "datatypes"
    ALL_INPUTS = "all_inputs"
    ACTIVE_LINKS = "active_links"
    LINK_SEMANTICS = "link_semantics"
    ACTIVE_FLOWS = "active_flows"
    LINEAR_ACTIVE_FLOWS = "linear_active_flows"
    ALL_ACTIVE = "all_active"
    CONS_ROUTES = "cons_routes"
    # context-aware functional modularity
    CONTEXT = "context"
    ATOMIC_MOD_TASK = "atomic_mod_task"
    ATOMIC_MOD_DEVS = "atomic_mod_devs"
    MISSION = "mission"
    PLUMBING = "plumbing"


# Families of the full synthesis program. DATATYPES is satisfied by
# construction (mismatched links never get a variable) and the two flow
# families are alternatives selected by the flow mode.
PROGRAM_FAMILIES: frozenset[Family] = frozenset(
    {
        Family.MISSION,
        Family.CONTEXT,
        Family.ATOMIC_MOD_TASK,
        Family.ATOMIC_MOD_DEVS,
        Family.SELECT_TASK,
        Family.ALL_ACTIVE,
        Family.FULL_BUDGET,
        Family.ACTIVE_DEVICES,
        Family.CNX_CAPACITY,
        Family.ALL_INPUTS,
        Family.LINK_SEMANTICS,
        Family.ACTIVE_LINKS,
        Family.CONS_ROUTES,
        Family.BANDWIDTH,
    }
)
STRUCTURAL_FAMILIES: frozenset[Family] = frozenset({Family.DATATYPES})
FLOW_FAMILIES: frozenset[Family] = frozenset(
    {Family.ACTIVE_FLOWS, Family.LINEAR_ACTIVE_FLOWS}
)
