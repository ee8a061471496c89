from typing import Optional, Tuple

import click
from flask import Blueprint, current_app

from commands.params import FORMATS, POINT
from services.order import Point, check_partial_order
from services.report import Report
from services.space import cb_derive, cover_reduction, generate_topology, separate, verify_levels
from utils.cache import cache_key, fetch_from_cache, store_in_cache
from utils.codec import (
    analysis_from_dict,
    analysis_to_dict,
    load_json,
    order_to_dict,
    point_to_list,
    points_to_list,
    structure_from_dict,
)
from utils.report import RunReport, emit, workbench_command


def create_space_blueprint(cache_client) -> Blueprint:
    bp = Blueprint("space", __name__, cli_group=None)

    def _analysis(order, cross_check: bool):
        key = cache_key("cb", order_to_dict(order))
        if not cross_check:
            cached = fetch_from_cache(cache_client, key)
            if cached is not None:
                current_app.logger.info("cb cache hit for %s", key)
                return analysis_from_dict(cached), True
        analysis = cb_derive(order, cross_check=cross_check, cap=current_app.config["TOPOLOGY_CAP"])
        store_in_cache(cache_client, key, analysis_to_dict(analysis), current_app.config["CACHE_TTL"])
        return analysis, False

    @bp.cli.command("cb")
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.option("--fanout", type=click.IntRange(min=1), help="Override the universe fan-out.")
    @click.option("--cross-check", is_flag=True, help="Re-derive isolation exhaustively below the cap.")
    @click.option("--verify-levels", "check_levels", is_flag=True, help="Require ranks to equal heights.")
    @click.option("--open-sets", is_flag=True, help="Also count the open sets of the generated topology.")
    @click.option("--format", "fmt", type=FORMATS, default="json", show_default=True)
    @workbench_command("cb")
    def cb(
        run: RunReport,
        path: str,
        fanout: Optional[int],
        cross_check: bool,
        check_levels: bool,
        open_sets: bool,
        fmt: str,
    ) -> None:
        """Cantor-Bendixson levels and cardinal sequence of an order."""
        order, _ = structure_from_dict(load_json(path), fanout)
        report = run.record(check_partial_order(order))
        if not report:
            emit(run, {"report": report.to_dict()})
            return
        with run.phase("derive"):
            analysis, cached = _analysis(order, cross_check)
        sequence = [len(level) for level in analysis.levels]
        payload = {
            "sequence": sequence,
            "scattered": analysis.scattered,
            "cached": cached,
            "analysis": analysis_to_dict(analysis),
        }
        if not analysis.scattered:
            residue = sorted(analysis.residue)
            run.record(Report.violation("scattered", (residue[0],), f"{len(residue)} points are never isolated"))
        if check_levels:
            report = run.record(verify_levels(order, analysis))
            payload["levels"] = report.to_dict()
        if open_sets:
            with run.phase("topology"):
                payload["openSets"] = len(generate_topology(order, cap=current_app.config["TOPOLOGY_CAP"]))
        text = "sequence " + " ".join(str(size) for size in sequence)
        emit(run, payload, text=text if fmt == "text" else None)

    @bp.cli.command("separate")
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.argument("x", type=POINT)
    @click.argument("y", type=POINT)
    @workbench_command("separate")
    def separate_cmd(run: RunReport, path: str, x: Point, y: Point) -> None:
        """Find a clopen set containing x and missing y."""
        order, _ = structure_from_dict(load_json(path))
        separation = separate(order, x, y)
        emit(
            run,
            {
                "pair": [point_to_list(x), point_to_list(y)],
                "kind": separation.kind,
                "anchor": point_to_list(separation.anchor),
                "witness": points_to_list(separation.witness),
            },
        )

    @bp.cli.command("cover")
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.argument("x", type=POINT)
    @click.option("--positive", "positives", type=POINT, multiple=True, help="Cone intersected into the basic set.")
    @click.option("--negative", "negatives", type=POINT, multiple=True, help="Cone removed from the basic set.")
    @workbench_command("cover")
    def cover(run: RunReport, path: str, x: Point, positives: Tuple[Point, ...], negatives: Tuple[Point, ...]) -> None:
        """Barrier points whose cones cover the part of C(x) outside a basic set."""
        order, barriers = structure_from_dict(load_json(path))
        result = cover_reduction(order, barriers, x, positives, negatives)
        run.record(result.report)
        emit(
            run,
            {
                "cover": points_to_list(result.cover),
                "basicSet": points_to_list(result.basic_set),
                "report": result.report.to_dict(),
            },
        )

    return bp

