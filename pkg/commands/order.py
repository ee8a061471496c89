from typing import Optional

import click
from flask import Blueprint

from commands.params import FORMATS
from services.order import check_admissible, covering_pairs
from services.report import Report
from utils.codec import load_json, point_to_list, structure_from_dict
from utils.dot import export_dot, hasse_edges
from utils.report import RunReport, emit, workbench_command


def create_order_blueprint() -> Blueprint:
    bp = Blueprint("order", __name__, cli_group=None)

    @bp.cli.command("check")
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.option("--fanout", type=click.IntRange(min=1), help="Override the universe fan-out.")
    @click.option("--skip-fanout", is_flag=True, help="Do not check the fan-out condition.")
    @workbench_command("check")
    def check(run: RunReport, path: str, fanout: Optional[int], skip_fanout: bool) -> None:
        """Check that an order file describes an admissible order."""
        with run.phase("load"):
            order, barriers = structure_from_dict(load_json(path), fanout)
        with run.phase("check"):
            report = run.record(check_admissible(order, barriers, require_fanout=not skip_fanout))
        emit(run, {"points": len(order), "fanout": order.universe.fanout, "report": report.to_dict()})

    @bp.cli.command("export-dot")
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.option("--format", "fmt", type=FORMATS, default="dot", show_default=True)
    @workbench_command("export-dot")
    def export(run: RunReport, path: str, fmt: str) -> None:
        """Render the Hasse diagram of an order."""
        order, _ = structure_from_dict(load_json(path))
        with run.phase("reduce"):
            edges = sorted(hasse_edges(order))
        if fmt == "dot":
            emit(run, {"edges": len(edges)}, text=export_dot(order).rstrip("\n"))
            return
        payload = {"edges": [[point_to_list(x), point_to_list(y)] for x, y in edges]}
        if fmt == "text":
            emit(run, payload, text="\n".join(f"{x} -> {y}" for x, y in edges))
        else:
            emit(run, payload)

    @bp.cli.command("hasse-check")
    @click.argument("path", type=click.Path(dir_okay=False))
    @workbench_command("hasse-check")
    def hasse_check(run: RunReport, path: str) -> None:
        """Compare the graph-library reduction with the direct covering-pair scan."""
        order, _ = structure_from_dict(load_json(path))
        reduced, scanned = hasse_edges(order), covering_pairs(order)
        emit(run, {"agree": reduced == scanned, "edges": len(reduced)})
        if reduced != scanned:
            low, high = sorted(reduced ^ scanned)[0]
            run.record(Report.violation("hasse", (low, high), f"edge {low}->{high} found by only one method"))

    return bp
