"""Command-line interface.

Exit codes are a stable contract across commands:
0 clean, 1 findings, 2 input error, 3 non-convergence.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click

from .engine import EngineConfig, run_all
from .errors import ConvergenceError, PidlintError
from .ingest import build_demo_fixture, load_graph, load_rule, save_graph, serialize_graph
from .report import RunReport, render_json, render_text
from .rules import RECOMMENDATION_LEVELS, RuleGraph, builtin_rules, builtin_rules_dir

_LEVELS = list(RECOMMENDATION_LEVELS)


def _rules_from(rules_dir: Optional[str]) -> List[RuleGraph]:
    if rules_dir is None:
        return builtin_rules()
    rules = []
    for path in sorted(Path(rules_dir).glob("*.rule.json")):
        rules.append(load_rule(path))
    rules.sort(key=lambda r: (r.meta.order, r.meta.id))
    return rules


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_graph(path: str):
    try:
        return load_graph(path)
    except FileNotFoundError:
        _fail(f"no such file: {path}", 2)
    except OSError as exc:
        _fail(str(exc), 2)
    except PidlintError as exc:
        _fail(str(exc), 2)


rules_dir_option = click.option(
    "--rules-dir", envvar="PIDLINT_RULES_DIR", default=None,
    help="Directory of *.rule.json files (default: the built-in rule library; "
         "also honors PIDLINT_RULES_DIR).",
)
level_option = click.option(
    "--level", type=click.Choice(_LEVELS), default=None,
    help="Only run rules at or above this recommendation level.",
)
milestone_option = click.option(
    "--milestone", default=None, help="Only run rules tagged with this milestone.",
)
json_option = click.option(
    "--json", "json_path", type=click.Path(dir_okay=False), default=None,
    help="Also write a machine-readable JSON report to this path.",
)


@click.group()
@click.version_option(package_name="pidlint")
def cli() -> None:
    """Rule-based checking and autocorrection for P&ID graphs."""


def _run(graph_path: str, rules_dir: Optional[str], level: str,
         milestone: Optional[str], mode: str) -> Tuple[object, object, RunReport]:
    graph = _read_graph(graph_path)
    try:
        rules = _rules_from(rules_dir)
    except PidlintError as exc:
        _fail(str(exc), 2)
    config = EngineConfig(recommendation_threshold=level,
                          milestone_filter=milestone, mode=mode)
    try:
        result = run_all(rules, graph, config)
    except ConvergenceError as exc:
        _fail(str(exc), 3)
    report = RunReport.from_result(result, graph, config)
    return graph, result, report


@cli.command()
@click.argument("graph_file", type=click.Path(dir_okay=False))
@rules_dir_option
@level_option
@milestone_option
@json_option
def check(graph_file: str, rules_dir: Optional[str], level: Optional[str],
          milestone: Optional[str], json_path: Optional[str]) -> None:
    """Detect violations without modifying the graph. Exit 1 if any are found."""
    graph, result, report = _run(graph_file, rules_dir, level or "consideration",
                                 milestone, "detect")
    click.echo(render_text(report, graph), nl=False)
    if json_path:
        Path(json_path).write_text(render_json(report), encoding="utf-8")
    sys.exit(1 if result.records else 0)


@cli.command()
@click.argument("graph_file", type=click.Path(dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Output path for the corrected graph "
                   "(default: <input>.fixed.pidg.json).")
@rules_dir_option
@level_option
@milestone_option
@json_option
def fix(graph_file: str, out_path: Optional[str], rules_dir: Optional[str],
        level: Optional[str], milestone: Optional[str],
        json_path: Optional[str]) -> None:
    """Apply corrections and write the corrected graph. Exit 1 if anything changed.

    Defaults to --level mandatory: only non-negotiable rules are applied
    unattended; suggestions belong in the interactive review.
    """
    graph, result, report = _run(graph_file, rules_dir, level or "mandatory",
                                 milestone, "fix")
    if out_path is None:
        name = Path(graph_file).name
        stem = name[:-len(".pidg.json")] if name.endswith(".pidg.json") else Path(name).stem
        out_path = str(Path(graph_file).with_name(stem + ".fixed.pidg.json"))
    try:
        save_graph(result.graph, out_path)
    except OSError as exc:
        _fail(str(exc), 2)
    click.echo(render_text(report, result.graph), nl=False)
    click.echo(f"corrected graph written to {out_path}")
    if json_path:
        Path(json_path).write_text(render_json(report), encoding="utf-8")
    sys.exit(1 if result.records else 0)


@cli.command()
@rules_dir_option
def rules(rules_dir: Optional[str]) -> None:
    """List the available rules in application order."""
    directory = Path(rules_dir) if rules_dir else builtin_rules_dir()
    loaded: List[RuleGraph] = []
    broken: List[str] = []
    for path in sorted(directory.glob("*.rule.json")):
        try:
            loaded.append(load_rule(path))
        except PidlintError as exc:
            broken.append(f"{path.name}: {exc}")
    loaded.sort(key=lambda r: (r.meta.order, r.meta.id))
    for rule in loaded:
        meta = rule.meta
        click.echo(f"{meta.id:>4}  order={meta.order:<4} {meta.recommendation:<13}"
                   f" {meta.milestone:<22} {meta.description}")
    for line in broken:
        click.echo(f"invalid rule file: {line}", err=True)
    sys.exit(2 if broken else 0)


@cli.command()
@click.argument("out_file", type=click.Path(dir_okay=False))
def fixture(out_file: str) -> None:
    """Write the built-in demonstration plant graph."""
    graph = build_demo_fixture()
    try:
        Path(out_file).write_text(serialize_graph(graph), encoding="utf-8")
    except OSError as exc:
        _fail(str(exc), 2)
    click.echo(f"wrote {out_file} ({graph.node_count} nodes, {graph.edge_count} edges)")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8880, show_default=True, type=int)
@rules_dir_option
@click.option("--ui-dir", default=None,
              help="Directory with the built web UI (default: ./frontend/dist if present).")
def serve(host: str, port: int, rules_dir: Optional[str], ui_dir: Optional[str]) -> None:
    """Serve the interactive review API (and the web UI, if built)."""
    import uvicorn

    from .service import create_app

    try:
        rule_set = _rules_from(rules_dir)
    except PidlintError as exc:
        _fail(str(exc), 2)
    app = create_app(rules=rule_set, ui_dir=ui_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except (OSError, SystemExit) as exc:
        _fail(f"cannot serve on {host}:{port}: {exc}", 2)


def main() -> None:
    cli(prog_name="pidlint")


if __name__ == "__main__":
    main()
