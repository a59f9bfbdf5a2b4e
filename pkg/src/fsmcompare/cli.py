"""Command-line front door: compare, diff, logs2nfa, validate.

Exit codes: 0 on success, 1 on input parse or layout errors, 2 when lattice
completion hits the node cap.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .automata import minimize
from .ingest import (
    HidingConfig,
    NfaParseError,
    WorkspaceLoadError,
    build_pta,
    load_workspace,
    parse_log,
    parse_nfa,
    write_nfa,
)
from .levels import DEFAULT_NODE_CAP, LatticeCapExceeded
from .ltsdiff import DiffParams, diff, diff_stats
from .report import (
    build_bundle,
    default_meta,
    diff_to_dot,
    lattice_to_dot,
    level4_to_csv,
    matrix_to_csv,
    to_json,
)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")


def _parse_levels(spec: str) -> tuple[int, ...]:
    try:
        levels = tuple(sorted({int(part) for part in spec.split(",") if part.strip()}))
    except ValueError:
        raise click.BadParameter(f"cannot parse levels {spec!r}")
    if not levels or not all(1 <= lvl <= 6 for lvl in levels):
        raise click.BadParameter("levels must be a non-empty subset of 1-6")
    return levels


def _params(attenuation: float, landmark_fraction: float, landmark_ratio: float) -> DiffParams:
    try:
        return DiffParams(
            attenuation=attenuation,
            landmark_fraction=landmark_fraction,
            landmark_ratio=landmark_ratio,
        )
    except ValueError as exc:
        raise click.BadParameter(str(exc))


@click.group()
@click.version_option()
def main() -> None:
    """Compare the behavior of systems modeled as sets of finite state machines."""


@main.command("compare")
@click.option("--input", "input_dir", required=True, help="Workspace root directory.")
@click.option("--output", "output_dir", required=True, help="Directory for result files.")
@click.option("--levels", default="1,2,3,4,5,6", show_default=True, help="Comma-separated levels.")
@click.option("--hide", multiple=True, help="Event glob pattern to hide (repeatable).")
@click.option("--attenuation", default=0.5, show_default=True)
@click.option("--landmark-fraction", default=0.25, show_default=True)
@click.option("--landmark-ratio", default=1.5, show_default=True)
@click.option("--node-cap", default=DEFAULT_NODE_CAP, show_default=True)
@click.option("--entity", default=None, help="Restrict levels 5/6 to one entity.")
@click.option("--from", "from_variant", default=None, help="Level-6 source variant.")
@click.option("--to", "to_variant", default=None, help="Level-6 target variant.")
def cmd_compare(
    input_dir: str,
    output_dir: str,
    levels: str,
    hide: tuple[str, ...],
    attenuation: float,
    landmark_fraction: float,
    landmark_ratio: float,
    node_cap: int,
    entity: str | None,
    from_variant: str | None,
    to_variant: str | None,
) -> None:
    """Run the requested comparison levels and write result files."""
    selected = _parse_levels(levels)
    params = _params(attenuation, landmark_fraction, landmark_ratio)
    if (from_variant is None) != (to_variant is None):
        raise click.BadParameter("--from and --to must be given together")
    if from_variant is not None and entity is None:
        raise click.BadParameter("--from/--to require --entity")

    try:
        workspace = load_workspace(Path(input_dir), HidingConfig(tuple(hide)))
    except WorkspaceLoadError as exc:
        for error in exc.errors:
            click.echo(error, err=True)
        sys.exit(1)

    meta = default_meta(
        input_path=input_dir, levels=selected, params=params, hide=tuple(hide), node_cap=node_cap
    )
    try:
        bundle = build_bundle(
            workspace,
            levels=selected,
            params=params,
            node_cap=node_cap,
            entity=entity,
            from_variant=from_variant,
            to_variant=to_variant,
            meta=meta,
        )
    except LatticeCapExceeded as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    except KeyError as exc:
        click.echo(f"unknown selection: {exc.args[0]}", err=True)
        sys.exit(1)

    out = Path(output_dir)
    _write(out / "report.json", to_json(bundle))
    if bundle.level2 is not None:
        _write(out / "level2.dot", lattice_to_dot(bundle.level2))
    if bundle.level3 is not None:
        _write(out / "level3.csv", matrix_to_csv(bundle.level3))
    if bundle.level4 is not None:
        names = tuple(ms.name for ms in workspace.model_sets)
        _write(out / "level4.csv", level4_to_csv(bundle.level4, names))
    if bundle.level5 is not None:
        for name, lattice in bundle.level5.items():
            _write(out / "level5" / f"{name}.dot", lattice_to_dot(lattice))
    if bundle.level6 is not None:
        for entry in bundle.level6:
            _write(
                out / "level6" / entry.entity / f"{entry.from_variant}-{entry.to_variant}.dot",
                diff_to_dot(entry.machine),
            )


def _load_machine(path: str):
    try:
        return parse_nfa(Path(path).read_text(encoding="utf-8"), path=path)
    except OSError as exc:
        click.echo(f"{path}: {exc}", err=True)
        sys.exit(1)
    except NfaParseError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)


@main.command("diff")
@click.argument("left")
@click.argument("right")
@click.option("--attenuation", default=0.5, show_default=True)
@click.option("--landmark-fraction", default=0.25, show_default=True)
@click.option("--landmark-ratio", default=1.5, show_default=True)
def cmd_diff(
    left: str, right: str, attenuation: float, landmark_fraction: float, landmark_ratio: float
) -> None:
    """Structurally diff two .nfa files; prints stats and DOT."""
    params = _params(attenuation, landmark_fraction, landmark_ratio)
    machine = diff(_load_machine(left), _load_machine(right), params)
    stats = diff_stats(machine)
    click.echo(
        f"added={stats.added_transitions} removed={stats.removed_transitions} "
        f"added_states={stats.added_states} removed_states={stats.removed_states}"
    )
    click.echo(diff_to_dot(machine), nl=False)


@main.command("logs2nfa")
@click.argument("log_file")
@click.argument("output")
@click.option("--minimize", "do_minimize", is_flag=True, help="Minimize the prefix tree.")
def cmd_logs2nfa(log_file: str, output: str, do_minimize: bool) -> None:
    """Build a prefix-tree acceptor from an execution log."""
    try:
        text = Path(log_file).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"{log_file}: {exc}", err=True)
        sys.exit(1)
    machine = build_pta(parse_log(text))
    if do_minimize:
        machine = minimize(machine).to_nfa()
    _write(Path(output), write_nfa(machine))


@main.command("validate")
@click.argument("file")
def cmd_validate(file: str) -> None:
    """Check that a .nfa file parses and satisfies the machine invariants."""
    _load_machine(file)
    click.echo(f"{file}: ok")


if __name__ == "__main__":  # pragma: no cover
    main()
