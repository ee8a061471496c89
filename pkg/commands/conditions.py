from typing import Optional, Tuple

import click
from flask import Blueprint, current_app

from commands.params import POINT
from services.conditions import (
    add_point,
    add_point_above,
    amalgamate_conditions,
    extends,
    insert_relation,
    restrict_condition,
    validate,
)
from services.errors import AmalgamationIncompatibleError, InvalidInputError
from services.order import Point
from services.report import Report
from utils.codec import condition_from_any, condition_to_dict, iso_from_dict, load_json, ordinal_iso_from_dict
from utils.report import RunReport, emit, workbench_command


def _stages(error: AmalgamationIncompatibleError):
    return [{"stage": name, "report": report.to_dict()} for name, report in error.stages]


def create_conditions_blueprint() -> Blueprint:
    bp = Blueprint("conditions", __name__, cli_group=None)

    @bp.cli.command("cond-validate")
    @click.argument("path", type=click.Path(dir_okay=False))
    @workbench_command("cond-validate")
    def cond_validate(run: RunReport, path: str) -> None:
        """Check clauses (1)-(5) of a condition file."""
        q = condition_from_any(load_json(path))
        with run.phase("validate"):
            report = run.record(validate(q))
        emit(run, {"points": len(q.order), "nodes": len(q.system), "report": report.to_dict()})

    @bp.cli.command("cond-amalgamate")
    @click.argument("first", type=click.Path(dir_okay=False))
    @click.argument("second", type=click.Path(dir_okay=False))
    @click.argument("iso", type=click.Path(dir_okay=False))
    @click.option("--mode", type=click.Choice(["union", "into"]), default="union", show_default=True)
    @click.option("--system-iso", type=click.Path(dir_okay=False), help="Ordinal map between the two systems.")
    @click.option("--node", type=int, help="Node of the second system the first is copied into.")
    @click.option("--barrier", type=click.Choice(["b3", "B3"]), default="B3", show_default=True)
    @workbench_command("cond-amalgamate")
    def cond_amalgamate(
        run: RunReport,
        first: str,
        second: str,
        iso: str,
        mode: str,
        system_iso: Optional[str],
        node: Optional[int],
        barrier: str,
    ) -> None:
        """Amalgamate two conditions along an order isomorphism."""
        q1 = condition_from_any(load_json(first))
        q2 = condition_from_any(load_json(second))
        psi = iso_from_dict(load_json(iso))
        ordinals = ordinal_iso_from_dict(load_json(system_iso)) if system_iso else None
        try:
            with run.phase("amalgamate"):
                result = amalgamate_conditions(q1, q2, psi, mode=mode, system_iso=ordinals, node=node, barrier=barrier)
        except AmalgamationIncompatibleError as error:
            run.record(Report.violation(error.report.clause, error.report.witness, str(error)))
            emit(run, {"compatible": False, "stages": _stages(error)})
            return
        emit(run, {"compatible": True, "condition": condition_to_dict(result)})

    @bp.cli.command("cond-extend")
    @click.argument("stronger", type=click.Path(dir_okay=False))
    @click.argument("weaker", type=click.Path(dir_okay=False))
    @workbench_command("cond-extend")
    def cond_extend(run: RunReport, stronger: str, weaker: str) -> None:
        """Check that the first condition extends the second."""
        q = condition_from_any(load_json(stronger))
        p = condition_from_any(load_json(weaker))
        result = extends(q, p)
        if not result:
            run.record(Report.violation("extends", (stronger, weaker), f"{stronger} does not extend {weaker}"))
        emit(run, {"extends": result})

    @bp.cli.command("cond-add-point")
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.argument("new", type=POINT)
    @click.option("--below", "top", type=POINT, help="Existing point the new point goes under.")
    @click.option("--above", "support", type=POINT, multiple=True, help="Existing point the new point goes over.")
    @workbench_command("cond-add-point")
    def cond_add_point(run: RunReport, path: str, new: Point, top: Optional[Point], support: Tuple[Point, ...]) -> None:
        """Extend a condition by one fresh point."""
        if top is not None and support:
            raise InvalidInputError("give either --below or --above, not both")
        q = condition_from_any(load_json(path))
        result = add_point(q, new, top) if top is not None else add_point_above(q, new, support)
        run.record(validate(result))
        emit(run, {"extends": extends(result, q), "condition": condition_to_dict(result)})

    @bp.cli.command("cond-relate")
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.argument("x", type=POINT)
    @click.argument("y", type=POINT)
    @workbench_command("cond-relate")
    def cond_relate(run: RunReport, path: str, x: Point, y: Point) -> None:
        """Relate two existing points, repairing barriers or rolling back."""
        q = condition_from_any(load_json(path))
        revised = insert_relation(q, x, y)
        changed = sum(1 for pair in q.barriers.pairs() if revised.barriers.entries[pair] != q.barriers.entries[pair])
        current_app.logger.info("cond-relate %s<=%s revised %s barriers", x, y, changed)
        emit(run, {"extends": extends(revised, q), "revised": changed, "condition": condition_to_dict(revised)})

    @bp.cli.command("cond-restrict")
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.option("--node", "code", type=int, required=True, help="Node whose point view the condition is cut to.")
    @workbench_command("cond-restrict")
    def cond_restrict(run: RunReport, path: str, code: int) -> None:
        """Intersect a condition with the point view of one node."""
        q = condition_from_any(load_json(path))
        result = restrict_condition(q, code)
        run.record(validate(result))
        emit(run, {"points": len(result.order), "condition": condition_to_dict(result)})

    return bp
