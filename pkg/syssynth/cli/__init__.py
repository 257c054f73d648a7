"""
syssynth command line tool

Exit codes of `synth`: 0 optimal, 1 bad input, 2 infeasible, 3 stopped at a
limit. `validate` exits with 4 when the solution violates constraints.

SPDX-License-Identifier: EUPL-1.2
"""

import importlib.metadata
import json
import pathlib
import warnings
from decimal import Decimal, InvalidOperation
from typing import Annotated, Optional

import rich
import typer
import typer.rich_utils
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from syssynth._utils import json_default
from syssynth.catalog import (
    InstanceError,
    ProblemInstance,
    read_instance,
    validate_instance,
    write_instance,
)
from syssynth.cli import bench
from syssynth.cli.bench import Backend, solve_with
from syssynth.expansion import Candidates, expand
from syssynth.gen import PRESETS, GenSpec, generate
from syssynth.model import BuildOptions, FlowMode, ProgramError, build_program
from syssynth.model.export import write_lp, write_mps
from syssynth.number import fraction_to_str, number_to_str
from syssynth.report import (
    SolutionDocument,
    hardware_dot,
    infeasibility_hints,
    instance_digest,
    read_solution,
    software_dot,
    system_document,
)
from syssynth.solver import Solution, SolverConfig, SolverStatus
from syssynth.verify import check_solution, extract_system

# https://github.com/tiangolo/typer/issues/437
typer.rich_utils.STYLE_HELPTEXT = ""

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3
EXIT_VIOLATIONS = 4

err_console = Console(stderr=True)

cli = typer.Typer(
    rich_markup_mode="rich",
    context_settings={"help_option_names": ["-h", "--help"]},
)

cli.command("bench")(bench.bench)
cli.command("sweep")(bench.sweep)


@cli.callback()
def cli_root():
    ...


def fail(message: str, code: int = EXIT_INPUT):
    err_console.print(f":x: [red]{escape(message)}[/red]")
    raise typer.Exit(code)


def load_or_fail(path: pathlib.Path, force: bool = False) -> ProblemInstance:
    try:
        inst = read_instance(path)
    except OSError as e:
        fail(f"Could not read {path}: {e}")
    except InstanceError as e:
        fail(f"Could not parse {path}: {e}")
    violations = validate_instance(inst)
    if violations:
        body = "\n".join(f"- {escape(str(v))}" for v in violations)
        if not force:
            err_console.print(Panel.fit(body, title=f"Invalid instance {path}"))
            raise typer.Exit(EXIT_INPUT)
        warnings.warn(f"Ignoring {len(violations)} instance violations in {path}")
    return inst


def parse_weights(text: str) -> tuple[Decimal, Decimal, Decimal]:
    try:
        parts = tuple(Decimal(p.strip()) for p in text.split(","))
    except InvalidOperation as e:
        raise typer.BadParameter(f"'{text}' is not a list of numbers") from e
    if len(parts) != 3 or any(p < 0 for p in parts):
        raise typer.BadParameter("Expected three non-negative weights 'w1,w2,w3'")
    return parts  # type: ignore[return-value]


def _breakdown_table(cands: Candidates, solution: Solution, options: BuildOptions):
    system = extract_system(cands, solution.values, options.connection_epsilon)
    table = Table(title="Objective")
    table.add_column("part")
    table.add_column("value", justify="right")
    for part in ("module", "execution", "connection", "routing", "total"):
        table.add_row(part, number_to_str(getattr(system.objective, part)))
    return system, table


@cli.command()
def synth(
    instance: Annotated[
        pathlib.Path,
        typer.Argument(help="Path to the instance document", show_default=False),
    ],
    flow_mode: Annotated[
        FlowMode, typer.Option(help="Encoding of the flow conservation rows")
    ] = FlowMode.DIRECTED,
    time_limit: Annotated[
        Optional[float], typer.Option(help="Solver time limit in seconds")
    ] = None,
    node_limit: Annotated[
        Optional[int], typer.Option(help="Solver node limit")
    ] = None,
    jobs: Annotated[
        Optional[int],
        typer.Option(help="Worker processes when SYNTH_DETERMINISTIC=0"),
    ] = None,
    backend: Annotated[
        Backend, typer.Option(help="Solve with the built-in search or with CBC")
    ] = Backend.BUILTIN,
    export_lp: Annotated[
        Optional[pathlib.Path], typer.Option(help="Write the program as LP")
    ] = None,
    export_mps: Annotated[
        Optional[pathlib.Path], typer.Option(help="Write the program as MPS")
    ] = None,
    solve_program: Annotated[
        bool, typer.Option("--solve/--no-solve", help="Solve the program")
    ] = True,
    dot_dir: Annotated[
        Optional[pathlib.Path],
        typer.Option(help="Directory for hardware.dot and software.dot"),
    ] = None,
    weights: Annotated[
        Optional[str],
        typer.Option(help="Objective weights 'w1,w2,w3'", show_default=False),
    ] = None,
    output: Annotated[
        Optional[pathlib.Path],
        typer.Option(
            "--output",
            "-o",
            help="Solution document [default: <instance>.solution.json]",
            show_default=False,
        ),
    ] = None,
    system_output: Annotated[
        Optional[pathlib.Path],
        typer.Option(
            help="System document [default: <instance>.system.json]",
            show_default=False,
        ),
    ] = None,
    force: Annotated[
        bool, typer.Option(help="Continue despite instance violations")
    ] = False,
):
    """
    Synthesize a system for an instance and write the solution and system
    documents.

    .. code-block:: bash

        syssynth synth rover.json
        syssynth synth rover.json --flow-mode dummy --dot-dir graphs
        syssynth synth rover.json --export-lp rover.lp --no-solve
        syssynth synth rover.json --weights 1,0,0 --time-limit 60
    """
    inst = load_or_fail(instance, force)
    if weights is not None:
        inst = inst.copy(update={"weights": parse_weights(weights)})

    options = BuildOptions(flow_mode=flow_mode)
    cands = expand(inst)
    try:
        program = build_program(cands, options)
    except ProgramError as e:
        fail(str(e))
    rich.print(
        f"Generated [bright_cyan]{len(program.variables)}[/bright_cyan] variables and"
        f" [bright_cyan]{len(program.constraints)}[/bright_cyan] constraints"
        f" for [bright_magenta]{escape(str(instance))}[/bright_magenta]"
    )

    if export_lp is not None:
        write_lp(export_lp, program)
        rich.print(f":page_facing_up: LP written to [bright_cyan]{export_lp}[/bright_cyan]")
    if export_mps is not None:
        write_mps(export_mps, program)
        rich.print(f":page_facing_up: MPS written to [bright_cyan]{export_mps}[/bright_cyan]")
    if not solve_program:
        raise typer.Exit(EXIT_OK)

    try:
        config = SolverConfig.from_env(
            time_limit=time_limit, node_limit=node_limit, jobs=jobs
        )
    except ValidationError as e:
        fail(f"Invalid solver settings: {e}")

    with Progress(
        SpinnerColumn(), TextColumn("[progress.description]{task.description}"), transient=True
    ) as progress:
        progress.add_task("Solving ...", total=None)
        solution = solve_with(backend, program, config, cands)

    digest = instance_digest(inst)
    output = output or instance.with_name(f"{instance.stem}.solution.json")
    document = SolutionDocument.of(solution, digest, flow_mode)
    output.write_text(document.json(indent=2) + "\n", encoding="utf-8")

    status = solution.status
    summary = (
        f"status [bold]{status}[/bold]\n"
        f"objective {fraction_to_str(solution.objective) if solution.objective is not None else '-'}\n"
        f"lower bound {fraction_to_str(solution.lower_bound) if solution.lower_bound is not None else '-'}\n"
        f"nodes {solution.stats.nodes}, wall time {solution.stats.wall_time:.3f}s"
    )
    rich.print(Panel.fit(summary, title=":gear: Solver"))

    if status.has_solution:
        system, table = _breakdown_table(cands, solution, options)
        system_output = system_output or instance.with_name(
            f"{instance.stem}.system.json"
        )
        system_output.write_text(
            json.dumps(
                system_document(system, cands, digest), indent=2, default=json_default
            )
            + "\n",
            encoding="utf-8",
        )
        if dot_dir is not None:
            dot_dir.mkdir(parents=True, exist_ok=True)
            (dot_dir / "hardware.dot").write_text(hardware_dot(system), encoding="utf-8")
            (dot_dir / "software.dot").write_text(software_dot(system), encoding="utf-8")
        rich.print(table)
        rich.print(
            f":sparkles: [green]Selected modules[/green]"
            f" [bright_magenta]{escape(', '.join(system.selected_modules) or '-')}[/bright_magenta]"
        )

    if status == SolverStatus.INFEASIBLE:
        hints = infeasibility_hints(cands)
        if hints:
            err_console.print(
                f":warning:  Requirements beyond the capability of usable modules:"
                f" [bright_magenta]{escape(', '.join(hints))}[/bright_magenta]"
            )
        else:
            err_console.print(":warning:  No system meets all constraints")
        raise typer.Exit(EXIT_INFEASIBLE)
    if status in (SolverStatus.TIMEOUT_INCUMBENT, SolverStatus.TIMEOUT_NONE):
        raise typer.Exit(EXIT_LIMIT)


@cli.command()
def validate(
    instance: Annotated[
        pathlib.Path,
        typer.Argument(help="Path to the instance document", show_default=False),
    ],
    solution: Annotated[
        pathlib.Path,
        typer.Argument(help="Path to the solution document", show_default=False),
    ],
):
    """
    Check a solution document against an instance, independently of the
    program that produced it.

    .. code-block:: bash

        syssynth validate rover.json rover.solution.json
    """
    inst = load_or_fail(instance)
    try:
        document = read_solution(solution)
    except OSError as e:
        fail(f"Could not read {solution}: {e}")
    except ValueError as e:
        fail(f"Could not parse {solution}: {e}")

    if document.instance_digest != instance_digest(inst):
        message = f"{solution} was produced for a different instance than {instance}"
        warnings.warn(message)
        err_console.print(f":warning:  [bright_yellow]{escape(message)}[/bright_yellow]")

    cands = expand(inst)
    values = document.primary_values(cands)
    report = check_solution(cands, values)

    if report.ok:
        rich.print(
            f":white_check_mark: [green]{escape(str(solution))} satisfies every constraint[/green]"
        )
        raise typer.Exit(EXIT_OK)

    body = "\n".join(
        f":x: [red]{v.tag}[/red] {escape(', '.join(v.elements))}: {escape(v.detail)}"
        for v in report.violations
    )
    rich.print(Panel.fit(body, title=f"{len(report.violations)} violations"))
    raise typer.Exit(EXIT_VIOLATIONS)


def _parse_shape(text: str) -> tuple[int, int, int]:
    try:
        d, p, n = (int(x) for x in text.split(","))
    except ValueError as e:
        raise typer.BadParameter("Expected a shape 'D,P,N'") from e
    return d, p, n


@cli.command()
def gen(
    output: Annotated[
        pathlib.Path,
        typer.Option("--output", "-o", help="Instance file to write", show_default=False),
    ],
    seed: Annotated[Optional[int], typer.Option(help="Generator seed")] = None,
    shape: Annotated[
        Optional[str], typer.Option(help="Counts 'D,P,N'", show_default=False)
    ] = None,
    preset: Annotated[
        Optional[str],
        typer.Option(help=f"Start from a preset: {', '.join(PRESETS)}"),
    ] = None,
    spec: Annotated[
        Optional[pathlib.Path],
        typer.Option(help="Start from a generator spec file", show_default=False),
    ] = None,
    tightness: Annotated[
        Optional[float], typer.Option(help="Share of the total capability required")
    ] = None,
):
    """
    Generate a random instance.

    .. code-block:: bash

        syssynth gen --seed 7 --shape 4,6,3 -o tiny.json
        syssynth gen --preset search_rescue --seed 1 -o sar.json
    """
    if preset is not None and spec is not None:
        raise typer.BadParameter("Use either --preset or --spec")
    if preset is not None:
        if preset not in PRESETS:
            raise typer.BadParameter(f"Unknown preset '{preset}'")
        base = PRESETS[preset]
    elif spec is not None:
        try:
            base = GenSpec.parse_file(spec)
        except (OSError, ValueError) as e:
            fail(f"Could not read generator spec {spec}: {e}")
    else:
        base = GenSpec()

    overrides: dict = {}
    if seed is not None:
        overrides["seed"] = seed
    if shape is not None:
        overrides["devices"], overrides["tasks"], overrides["modules"] = _parse_shape(shape)
    if tightness is not None:
        overrides["tightness"] = tightness
    try:
        gen_spec = GenSpec(**{**base.dict(), **overrides})
    except ValidationError as e:
        fail(f"Invalid generator spec: {e}")

    inst = generate(gen_spec)
    write_instance(output, inst)
    d, p, n = gen_spec.shape
    rich.print(
        f":sparkles: [green]Generated[/green] [bright_cyan]{escape(str(output))}[/bright_cyan]"
        f" with D={d}, P={p}, N={n} (seed {gen_spec.seed})"
    )


@cli.command()
def version():
    """
    Print the version of syssynth.

    .. code-block:: bash
        syssynth version
    """

    v = importlib.metadata.version("syssynth")

    rich.print(f"syssynth version: [bright_magenta]{v}[/bright_magenta]")
