"""
Exact branch-and-bound solver for the generated 0/1 programs.

The search is a depth-first traversal with an explicit stack. Each node
propagates its fixings, computes an admissible bound and prunes against the
incumbent. Among equally cheap optima the lexicographically least vector in
branching order wins, which makes the deterministic mode reproducible down to
the returned vector.

SPDX-License-Identifier: EUPL-1.2
"""

from __future__ import annotations

import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from pydantic import BaseSettings, PositiveFloat, PositiveInt

from syssynth._config import StrEnum, SynthModel
from syssynth.model.program import KIND_ORDER, Program, VarId, VarKind
from syssynth.solver.bounds import Bounder, lower_bound
from syssynth.solver.propagation import FREE, Propagation, Propagator, propagate

# how often the limits are looked at
_CHECK_EVERY = 1024


class SolverStatus(StrEnum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    TIMEOUT_INCUMBENT = "TIMEOUT_INCUMBENT"
    TIMEOUT_NONE = "TIMEOUT_NONE"

    @property
    def has_solution(self) -> bool:
        return self in (SolverStatus.OPTIMAL, SolverStatus.TIMEOUT_INCUMBENT)


class SolverSettings(BaseSettings):
    """Solver knobs read from the environment, e.g. ``SYNTH_TIME_LIMIT=60``."""

    deterministic: bool = True
    time_limit: PositiveFloat = 300.0
    node_limit: PositiveInt = 10_000_000
    # unset means one worker when deterministic, one per CPU otherwise
    jobs: PositiveInt | None = None

    class Config:
        env_prefix = "SYNTH_"


class SolverConfig(SynthModel):
    time_limit: PositiveFloat = 300.0
    node_limit: PositiveInt = 10_000_000
    deterministic: bool = True
    jobs: PositiveInt = 1
    branch_order: tuple[VarKind, ...] = KIND_ORDER

    @classmethod
    def from_env(cls, **overrides) -> SolverConfig:
        """Environment settings with explicit, non-`None` overrides on top."""
        settings = SolverSettings().dict()
        settings.update({k: v for k, v in overrides.items() if v is not None})
        if settings["jobs"] is None:
            settings["jobs"] = 1 if settings["deterministic"] else os.cpu_count() or 1
        return cls(**settings)


class SolverStats(SynthModel):
    nodes: int = 0
    propagations: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True, eq=False)
class Solution:
    status: SolverStatus
    values: Mapping[VarId, int] = field(default_factory=dict)
    objective: Fraction | None = None
    # proven bound on the optimum; equals the objective when optimal
    lower_bound: Fraction | None = None
    stats: SolverStats = field(default_factory=SolverStats)
    backend: str = "builtin"

    def active(self, kind: VarKind | None = None) -> list[VarId]:
        return [
            v for v, x in self.values.items() if x and (kind is None or v.kind == kind)
        ]


@dataclass
class _Outcome:
    best: list[int] | None
    best_cost: int | None
    # smallest bound of the subtrees left unexplored, `None` when exhausted
    open_bound: Fraction | None
    nodes: int
    propagations: int


class _Search:
    def __init__(self, program: Program, config: SolverConfig, deadline: float):
        self.program = program
        self.config = config
        self.deadline = deadline
        self.engine = Propagator(program)
        self.bounder = Bounder(program, self.engine.index)
        priority = {kind: p for p, kind in enumerate(config.branch_order)}
        n = len(program.variables)
        self.order = sorted(
            range(n),
            key=lambda i: (priority.get(program.variables[i].kind, len(priority)), i),
        )
        self.eager = [
            program.variables[i].kind in (VarKind.DEV, VarKind.ASG) for i in range(n)
        ]
        self.nodes = 0

    def _lex_less(self, a: Sequence[int], b: Sequence[int]) -> bool:
        for i in self.order:
            if a[i] != b[i]:
                return a[i] < b[i]
        return False

    def _may_beat(self, values: list[int], best: list[int]) -> bool:
        """Whether the subtree can still hold a lexicographically smaller vector."""
        for i in self.order:
            x = values[i]
            if x == FREE or x < best[i]:
                return True
            if x > best[i]:
                return False
        return False

    def _next_free(self, values: list[int]) -> int | None:
        for i in self.order:
            if values[i] == FREE:
                return i
        return None

    def run(self, fixed: Mapping[int, int] | None = None) -> _Outcome:
        engine, bounder = self.engine, self.bounder
        values = [FREE] * len(self.program.variables)
        trail: list[int] = []
        for i, x in (fixed or {}).items():
            engine.assign(values, trail, i, x)
        if engine.propagate_all(values, trail) is not None:
            return _Outcome(None, None, None, 0, engine.propagations)

        best: list[int] | None = None
        best_cost: int | None = None
        # (trail length, variable, untried value, bound at the branching node)
        stack: list[tuple[int, int, int | None, Fraction]] = []

        def pruned(bound: Fraction) -> bool:
            if best_cost is None:
                return False
            if bound > best_cost:
                return True
            return bound == best_cost and not self._may_beat(values, best)  # type: ignore[arg-type]

        def backtrack() -> bool:
            while stack:
                length, i, untried, bound = stack.pop()
                engine.undo(values, trail, length)
                if untried is None or pruned(bound):
                    continue
                stack.append((length, i, None, bound))
                engine.assign(values, trail, i, untried)
                if engine.propagate_from(values, trail, [i]) is None:
                    return True
            return False

        while True:
            self.nodes += 1
            if self.nodes > self.config.node_limit or (
                self.nodes % _CHECK_EVERY == 0 and time.perf_counter() >= self.deadline
            ):
                open_bounds = [b for _, _, untried, b in stack if untried is not None]
                open_bounds.append(bounder.bound(values))
                return _Outcome(
                    best, best_cost, min(open_bounds), self.nodes, engine.propagations
                )

            bound = bounder.bound(values)
            if not pruned(bound):
                i = self._next_free(values)
                if i is None:
                    cost = bounder.cost(values)
                    if (
                        best_cost is None
                        or cost < best_cost
                        or (cost == best_cost and self._lex_less(values, best))  # type: ignore[arg-type]
                    ):
                        best, best_cost = list(values), cost
                else:
                    first = 1 if self.eager[i] and bounder.unmet(values) else 0
                    stack.append((len(trail), i, 1 - first, bound))
                    engine.assign(values, trail, i, first)
                    if engine.propagate_from(values, trail, [i]) is None:
                        continue
            if not backtrack():
                return _Outcome(best, best_cost, None, self.nodes, engine.propagations)


def _solution(
    program: Program,
    outcome: _Outcome,
    scale: int,
    started: float,
) -> Solution:
    stats = SolverStats(
        nodes=outcome.nodes,
        propagations=outcome.propagations,
        wall_time=time.perf_counter() - started,
    )
    values: dict[VarId, int] = {}
    objective = None
    if outcome.best is not None:
        values = {v: outcome.best[i] for i, v in enumerate(program.variables)}
        objective = Fraction(outcome.best_cost, scale)  # type: ignore[arg-type]

    if outcome.open_bound is None:
        status = SolverStatus.OPTIMAL if objective is not None else SolverStatus.INFEASIBLE
        return Solution(status, values, objective, objective, stats)

    bound = outcome.open_bound / scale
    if objective is not None:
        bound = min(bound, objective)
        status = SolverStatus.TIMEOUT_INCUMBENT
    else:
        status = SolverStatus.TIMEOUT_NONE
    warnings.warn(f"Solver stopped at its limit after {outcome.nodes} nodes ({status})")
    return Solution(status, values, objective, bound, stats)


def _solve_subtree(
    program: Program, config: SolverConfig, deadline_in: float, fixed: dict[int, int]
) -> _Outcome:
    search = _Search(program, config, time.perf_counter() + deadline_in)
    return search.run(fixed)


def _split(program: Program, config: SolverConfig) -> list[dict[int, int]]:
    """Fix the first few branching variables to all combinations of values."""
    search = _Search(program, config, 0.0)
    depth = min(len(search.order), max(1, (2 * config.jobs - 1).bit_length()))
    heads = search.order[:depth]
    return [
        {i: (bits >> pos) & 1 for pos, i in enumerate(heads)}
        for bits in range(2**depth)
    ]


def _solve_parallel(program: Program, config: SolverConfig, started: float) -> Solution:
    search = _Search(program, config, 0.0)
    scale = search.bounder.scale
    parts = _split(program, config)
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        outcomes = list(
            pool.map(
                _solve_subtree,
                [program] * len(parts),
                [config] * len(parts),
                [config.time_limit] * len(parts),
                parts,
            )
        )

    best: _Outcome | None = None
    for o in outcomes:
        if o.best is None:
            continue
        if (
            best is None
            or o.best_cost < best.best_cost  # type: ignore[operator]
            or (o.best_cost == best.best_cost and search._lex_less(o.best, best.best))  # type: ignore[arg-type]
        ):
            best = o
    open_bounds = [o.open_bound for o in outcomes if o.open_bound is not None]
    merged = _Outcome(
        best=best.best if best else None,
        best_cost=best.best_cost if best else None,
        open_bound=min(open_bounds) if open_bounds else None,
        nodes=sum(o.nodes for o in outcomes),
        propagations=sum(o.propagations for o in outcomes),
    )
    return _solution(program, merged, scale, started)


def solve(program: Program, config: SolverConfig | None = None) -> Solution:
    """
    Minimize the program. The status tells whether the returned vector is
    proven optimal, whether the program has no solution, or whether a limit
    was hit with or without an incumbent.
    """
    config = config or SolverConfig()
    started = time.perf_counter()
    if not config.deterministic and config.jobs > 1 and program.variables:
        return _solve_parallel(program, config, started)
    search = _Search(program, config, started + config.time_limit)
    outcome = search.run()
    return _solution(program, outcome, search.bounder.scale, started)


__all__ = [
    "Propagation",
    "Solution",
    "SolverConfig",
    "SolverSettings",
    "SolverStats",
    "SolverStatus",
    "lower_bound",
    "propagate",
    "solve",
]
