"""
sub-commands for timing the solver over instance sets and mission variants

SPDX-License-Identifier: EUPL-1.2
"""

import pathlib
import time
from concurrent.futures import ProcessPoolExecutor
from statistics import mean
from typing import Annotated, Optional

import rich
import typer
from click import UsageError
from pydantic import ValidationError
from rich.markup import escape
from rich.progress import BarColumn, Progress, TaskProgressColumn, TextColumn
from rich.table import Table

from syssynth._config import StrEnum
from syssynth.catalog import InstanceError, ProblemInstance, read_instance
from syssynth.expansion import Candidates, expand
from syssynth.gen import GenSpec, generate, mission_variants
from syssynth.model import BuildOptions, FlowMode, Program, build_program
from syssynth.report import (
    RunRecord,
    instance_digest,
    tool_version,
    write_run_records,
    write_time_table,
)
from syssynth.solver import Solution, SolverConfig, solve


class Backend(StrEnum):
    BUILTIN = "builtin"
    CBC = "cbc"


def solve_with(
    backend: Backend, program: Program, config: SolverConfig, cands: Candidates
) -> Solution:
    if backend == Backend.CBC:
        # pulp looks for its solver binaries on import
        from syssynth.solver.external import solve_with_cbc

        return solve_with_cbc(program, config, cands)
    return solve(program, config)


def _instances(
    target: pathlib.Path, count: int
) -> list[tuple[str, ProblemInstance]]:
    """Instances of a directory, of a single file or generated from a spec."""
    if target.is_dir():
        paths = sorted(target.glob("*.json"))
        if not paths:
            raise UsageError(f"No instance documents (*.json) in {target}")
    else:
        paths = [target]

    loaded = []
    for path in paths:
        try:
            loaded.append((path.stem, read_instance(path)))
            continue
        except OSError as e:
            raise UsageError(f"Could not read {path}: {e}") from e
        except InstanceError as e:
            if target.is_dir():
                raise UsageError(f"Could not parse {path}: {e}") from e
        try:
            spec = GenSpec.parse_file(path)
        except (ValidationError, ValueError) as e:
            raise UsageError(
                f"{path} is neither an instance nor a generator spec: {e}"
            ) from e
        for i in range(count):
            seeded = GenSpec(**{**spec.dict(), "seed": spec.seed + i})
            loaded.append((f"{path.stem}-{seeded.seed}", generate(seeded)))
    return loaded


def run_once(
    name: str,
    inst: ProblemInstance,
    trial: int,
    flow_mode: FlowMode,
    backend: Backend,
    config: SolverConfig,
) -> RunRecord:
    """Build and solve one instance; failures end up in the record."""
    record = {
        "instance": name,
        "digest": instance_digest(inst),
        "trial": trial,
        "flow_mode": flow_mode,
        "backend": str(backend),
        "time_limit": config.time_limit,
        "tool_version": tool_version(),
    }
    started = time.perf_counter()
    try:
        cands = expand(inst)
        program = build_program(cands, BuildOptions(flow_mode=flow_mode))
        solution = solve_with(backend, program, config, cands)
    except Exception as e:  # pylint: disable=broad-exception-caught
        return RunRecord(
            **record,
            status="ERROR",
            wall_time=time.perf_counter() - started,
            error=f"{type(e).__name__}: {e}",
        )
    return RunRecord(
        **record,
        status=str(solution.status),
        objective=None if solution.objective is None else float(solution.objective),
        wall_time=solution.stats.wall_time,
        nodes=solution.stats.nodes,
    )


def _run_all(jobs_list: list[tuple], workers: int, description: str) -> list[RunRecord]:
    with Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        transient=True,
    ) as progress:
        task = progress.add_task(description, total=len(jobs_list))
        records = []
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for record in pool.map(run_once, *zip(*jobs_list)):
                    records.append(record)
                    progress.advance(task)
        else:
            for args in jobs_list:
                records.append(run_once(*args))
                progress.advance(task)
    return records


def _config(time_limit: Optional[float]) -> SolverConfig:
    # benchmark runs each solve on one process, parallelism is across runs
    try:
        return SolverConfig.from_env(time_limit=time_limit, jobs=1)
    except ValidationError as e:
        raise UsageError(f"Invalid solver settings: {e}") from e


def bench(
    target: Annotated[
        pathlib.Path,
        typer.Argument(
            help="Instance file, directory of instances or generator spec",
            show_default=False,
        ),
    ],
    output: Annotated[
        pathlib.Path,
        typer.Option("--output", "-o", help="CSV file for the run records"),
    ] = pathlib.Path("bench.csv"),
    trials: Annotated[int, typer.Option(min=1, help="Runs per instance")] = 3,
    count: Annotated[
        int, typer.Option(min=1, help="Instances drawn from a generator spec")
    ] = 10,
    jobs: Annotated[int, typer.Option(min=1, help="Runs solved concurrently")] = 1,
    flow_mode: Annotated[
        FlowMode, typer.Option(help="Encoding of the flow conservation rows")
    ] = FlowMode.DIRECTED,
    backend: Annotated[Backend, typer.Option(help="Solver backend")] = Backend.BUILTIN,
    time_limit: Annotated[
        Optional[float], typer.Option(help="Time limit per run in seconds")
    ] = None,
):
    """
    Time the solver over a set of instances, several trials each.

    .. code-block:: bash

        syssynth bench instances/ --trials 5 -o runs.csv
        syssynth bench rover_spec.json --count 20 --jobs 4
    """
    instances = _instances(target, count)
    config = _config(time_limit)
    runs = [
        (name, inst, trial, flow_mode, backend, config)
        for name, inst in instances
        for trial in range(trials)
    ]
    records = _run_all(runs, jobs, f"Solving {len(instances)} instances")
    write_run_records(output, records)

    table = Table(title="Benchmark")
    for column in ("instance", "status", "objective", "mean time [s]"):
        table.add_column(column)
    for name, _ in instances:
        mine = [r for r in records if r.instance == name]
        times = [r.wall_time for r in mine if not r.error]
        objective = next((r.objective for r in mine if r.objective is not None), None)
        table.add_row(
            escape(name),
            ", ".join(sorted({r.status for r in mine})),
            "-" if objective is None else f"{objective:.6g}",
            f"{mean(times):.3f}" if times else "-",
        )
    rich.print(table)
    failed = sum(1 for r in records if r.error)
    if failed:
        rich.print(f":warning:  [bright_yellow]{failed} runs failed[/bright_yellow]")
    rich.print(f":floppy_disk: Records written to [bright_cyan]{output}[/bright_cyan]")


def _names(text: Optional[str]) -> Optional[list[str]]:
    if text is None:
        return None
    return [n.strip() for n in text.split(",") if n.strip()]


def sweep(
    instance: Annotated[
        pathlib.Path,
        typer.Argument(help="Path to the instance document", show_default=False),
    ],
    output: Annotated[
        pathlib.Path,
        typer.Option("--output", "-o", help="CSV file for the time table"),
    ] = pathlib.Path("sweep.csv"),
    context: Annotated[
        Optional[str],
        typer.Option(help="Context dimensions to toggle [default: all]"),
    ] = None,
    functions: Annotated[
        Optional[str],
        typer.Option(help="Functional dimensions to combine [default: all]"),
    ] = None,
    trials: Annotated[int, typer.Option(min=1, help="Runs per variant")] = 1,
    jobs: Annotated[int, typer.Option(min=1, help="Runs solved concurrently")] = 1,
    flow_mode: Annotated[
        FlowMode, typer.Option(help="Encoding of the flow conservation rows")
    ] = FlowMode.DIRECTED,
    backend: Annotated[Backend, typer.Option(help="Solver backend")] = Backend.BUILTIN,
    time_limit: Annotated[
        Optional[float], typer.Option(help="Time limit per run in seconds")
    ] = None,
):
    """
    Solve every combination of mission context and required capabilities and
    tabulate the mean solution time.

    .. code-block:: bash

        syssynth sweep rover.json --context c0,c1 --functions q0,q1,q2
    """
    try:
        inst = read_instance(instance)
    except (OSError, InstanceError) as e:
        raise UsageError(f"Could not read {instance}: {e}") from e
    try:
        variants = mission_variants(inst, _names(context), _names(functions))
    except ValidationError as e:
        raise UsageError(f"Could not build mission variants: {e}") from e
    if not variants:
        raise UsageError("No functional dimension to sweep over")

    config = _config(time_limit)
    runs = []
    for i, variant in enumerate(variants):
        for trial in range(trials):
            runs.append((str(i), variant.instance, trial, flow_mode, backend, config))
    records = _run_all(runs, jobs, f"Solving {len(variants)} mission variants")

    columns = list(dict.fromkeys(v.context_label for v in variants))
    table_data: dict[str, dict[str, float | None]] = {}
    for i, variant in enumerate(variants):
        times = [r.wall_time for r in records if r.instance == str(i) and not r.error]
        row = table_data.setdefault(variant.functions_label, {})
        row[variant.context_label] = mean(times) if times else None
    write_time_table(output, table_data, columns)

    table = Table(title="Mean solution time [s]")
    table.add_column("capabilities")
    for c in columns:
        table.add_column(escape(c), justify="right")
    for label, cells in table_data.items():
        table.add_row(
            escape(label),
            *("-" if cells.get(c) is None else f"{cells[c]:.3f}" for c in columns),
        )
    rich.print(table)
    rich.print(f":floppy_disk: Time table written to [bright_cyan]{output}[/bright_cyan]")
