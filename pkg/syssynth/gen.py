"""
Seeded generation of synthetic problem instances and mission variants.

Generation uses numpy's PCG64 bit generator seeded with `GenSpec.seed` and
draws in a fixed order:

1. one transport bandwidth (integer in [50, 1000]) and overhead (1 + k/10, k
   in [0, 2]) per transport,
2. a permutation of the D + P elements (devices first, then tasks); the first
   N elements seed one module each, every other element draws its module,
3. per device: resources ([1, 8] each), connection capacities ([0, 2] each),
   per transport an exposure flag (probability 0.2) and if set the resource
   index and amount ([1, 4]), then the cost ([1, 19]),
4. per task: a compatibility flag per device and if set a consumption per
   resource ([0, 2]); a context flag per context dimension; the output count
   ([0, 1]) with message type, provided amount per semantic dimension ([1, 3])
   and nominal rate ([1, 9]) per output; an input flag (port-match
   probability) and if set its message type,
5. per module: capability per function ([0, 3]) and overhead ([0, 4]),
6. the mission context (0 or 1 per dimension).

Requirements are the tightness share of the total capability per function,
so generated instances are valid but not necessarily feasible.

SPDX-License-Identifier: EUPL-1.2
"""

import itertools
from dataclasses import dataclass
from decimal import Decimal
from typing import Literal

import numpy as np
from pydantic import confloat, conint, root_validator

from syssynth._config import SynthModel
from syssynth.catalog import (
    Device,
    Dimensions,
    InputPort,
    Mission,
    Module,
    OutputPort,
    ProblemInstance,
    ResourceDef,
    Task,
    TransportDef,
)

Probability = confloat(ge=0, le=1)
Count = conint(ge=0)


class GenSpec(SynthModel):
    seed: conint(ge=0, lt=2**64) = 0  # type: ignore[valid-type]
    devices: Count = 0  # type: ignore[valid-type]
    tasks: Count = 0  # type: ignore[valid-type]
    modules: Count = 0  # type: ignore[valid-type]
    resources: Count = 2  # type: ignore[valid-type]
    transports: Count = 2  # type: ignore[valid-type]
    context_dims: Count = 2  # type: ignore[valid-type]
    function_dims: Count = 2  # type: ignore[valid-type]
    message_types: Count = 3  # type: ignore[valid-type]
    semantic_dims: Count = 1  # type: ignore[valid-type]
    port_match_probability: Probability = 0.3  # type: ignore[valid-type]
    compatibility_probability: Probability = 0.5  # type: ignore[valid-type]
    context_probability: Probability = 0.2  # type: ignore[valid-type]
    module_size_distribution: Literal["uniform", "geometric"] = "uniform"
    tightness: Probability = 0.5  # type: ignore[valid-type]

    @root_validator(skip_on_failure=True)
    @classmethod
    def _modules_fit(cls, values: dict) -> dict:
        elements = values["devices"] + values["tasks"]
        if values["modules"] > elements:
            raise ValueError(
                f"Can't partition {elements} devices and tasks into"
                f" {values['modules']} non-empty modules"
            )
        if values["modules"] == 0 and elements > 0:
            raise ValueError("Devices and tasks need at least one module")
        return values

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.devices, self.tasks, self.modules)


PRESETS: dict[str, GenSpec] = {
    # shape of the underwater vehicle catalog
    "underwater": GenSpec(devices=18, tasks=36, modules=12, function_dims=4),
    # shape of the search-and-rescue catalog
    "search_rescue": GenSpec(devices=19, tasks=25, modules=29, function_dims=4),
}


def _draw_modules(spec: GenSpec, rng: np.random.Generator) -> list[int]:
    """Module index per element, devices first."""
    total = spec.devices + spec.tasks
    owner = [0] * total
    for position, element in enumerate(rng.permutation(total)):
        if position < spec.modules:
            owner[int(element)] = position
        elif spec.module_size_distribution == "geometric":
            owner[int(element)] = min(int(rng.geometric(0.5)) - 1, spec.modules - 1)
        else:
            owner[int(element)] = int(rng.integers(0, spec.modules))
    return owner


def generate(spec: GenSpec) -> ProblemInstance:
    rng = np.random.default_rng(spec.seed)

    resources = [f"r{i}" for i in range(spec.resources)]
    context = [f"c{i}" for i in range(spec.context_dims)]
    functions = [f"q{i}" for i in range(spec.function_dims)]
    msg_types = [f"m{i}" for i in range(spec.message_types)]
    semantics = [f"s{i}" for i in range(spec.semantic_dims)]
    transports = []
    for i in range(spec.transports):
        bandwidth = int(rng.integers(50, 1001))
        overhead = Decimal(10 + int(rng.integers(0, 3))) / 10
        transports.append(
            TransportDef(id=f"x{i}", bandwidth=bandwidth, overhead_factor=overhead)
        )
    dims = Dimensions(
        resources=[ResourceDef(id=r, unit="u") for r in resources],
        transports=transports,
        context_dims=context,
        function_dims=functions,
        message_types=msg_types,
        semantic_dims=semantics,
    )

    owner = _draw_modules(spec, rng)
    device_ids = [f"d{i}" for i in range(spec.devices)]
    task_ids = [f"p{i}" for i in range(spec.tasks)]

    devices = []
    for d in device_ids:
        own = {r: int(rng.integers(1, 9)) for r in resources}
        capacity = {x.id: int(rng.integers(0, 3)) for x in transports}
        exposes = {}
        for x in transports:
            if rng.random() < 0.2 and resources:
                r = resources[int(rng.integers(0, len(resources)))]
                exposes[x.id] = {r: int(rng.integers(1, 5))}
        devices.append(
            Device(
                id=d,
                resources=own,
                cnx_capacity=capacity,
                exposes=exposes,
                cost=int(rng.integers(1, 20)),
            )
        )

    tasks = []
    for p in task_ids:
        consumption = {}
        for d in device_ids:
            if rng.random() < spec.compatibility_probability:
                consumption[d] = {r: int(rng.integers(0, 3)) for r in resources}
        context_req = {j: 1 for j in context if rng.random() < spec.context_probability}
        outputs = []
        for o in range(int(rng.integers(0, 2)) if msg_types else 0):
            msg_type = msg_types[int(rng.integers(0, len(msg_types)))]
            provides = {s: int(rng.integers(1, 4)) for s in semantics}
            outputs.append(
                OutputPort(
                    id=f"out{o}",
                    msg_type=msg_type,
                    provides=provides,
                    nominal_rate=int(rng.integers(1, 10)),
                )
            )
        inputs = []
        if msg_types and rng.random() < spec.port_match_probability:
            msg_type = msg_types[int(rng.integers(0, len(msg_types)))]
            inputs.append(
                InputPort(id="in0", msg_type=msg_type, requires={s: 1 for s in semantics})
            )
        tasks.append(
            Task(
                id=p,
                consumption=consumption,
                context_req=context_req,
                inputs=inputs,
                outputs=outputs,
            )
        )

    modules = []
    for m in range(spec.modules):
        modules.append(
            Module(
                id=f"mod{m}",
                devices=[d for i, d in enumerate(device_ids) if owner[i] == m],
                tasks=[
                    p for i, p in enumerate(task_ids) if owner[spec.devices + i] == m
                ],
                capability={q: int(rng.integers(0, 4)) for q in functions},
                overhead_cost=int(rng.integers(0, 5)),
            )
        )

    mission_context = {j: int(rng.integers(0, 2)) for j in context}
    requirements = {}
    for q in functions:
        total = sum(int(m.capability.get(q, 0)) for m in modules)
        requirements[q] = (Decimal(total) * Decimal(str(spec.tightness))).quantize(
            Decimal("0.001")
        )

    return ProblemInstance(
        dims=dims,
        devices=devices,
        tasks=tasks,
        modules=modules,
        mission=Mission(context=mission_context, requirements=requirements),
    )


@dataclass(frozen=True)
class MissionVariant:
    context: tuple[tuple[str, int], ...]
    functions: tuple[str, ...]
    instance: ProblemInstance

    @property
    def context_label(self) -> str:
        return ",".join(f"{j}={x}" for j, x in self.context) or "-"

    @property
    def functions_label(self) -> str:
        return "+".join(self.functions)


def mission_variants(
    inst: ProblemInstance,
    context_dims: list[str] | None = None,
    functions: list[str] | None = None,
) -> list[MissionVariant]:
    """
    Every 0/1 setting of the chosen context dimensions crossed with every
    non-empty subset of the chosen functional requirements. Chosen functions
    outside the subset are not required; those inside keep their requirement,
    or require 1 when the instance requires none.
    """
    context_dims = list(inst.dims.context_dims if context_dims is None else context_dims)
    functions = list(inst.dims.function_dims if functions is None else functions)
    mission = inst.mission

    variants = []
    for size in range(1, len(functions) + 1):
        for subset in itertools.combinations(functions, size):
            for bits in itertools.product((0, 1), repeat=len(context_dims)):
                context = {**mission.context, **dict(zip(context_dims, bits))}
                requirements = dict(mission.requirements)
                for q in functions:
                    if q not in subset:
                        requirements[q] = Decimal(0)
                    elif not requirements.get(q):
                        requirements[q] = Decimal(1)
                variant = inst.copy(
                    update={
                        "mission": mission.copy(
                            update={"context": context, "requirements": requirements}
                        )
                    }
                )
                variants.append(
                    MissionVariant(
                        context=tuple(zip(context_dims, bits)),
                        functions=subset,
                        instance=variant,
                    )
                )
    return variants
