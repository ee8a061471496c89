import click
from flask import Blueprint

from commands.params import FORMATS, POINT
from services.amalgam import (
    Structure,
    amalgamate_B3,
    amalgamate_b3,
    canonical_sequences,
    is_progressive,
    psi_amalgamate,
    verify_amalgam_unique,
)
from services.order import Point, check_barrier_map, check_partial_order
from utils.codec import barriers_to_list, condition_from_any, iso_from_dict, load_json, order_to_dict, point_to_list, points_to_list
from utils.dot import export_dot
from utils.report import RunReport, emit, workbench_command

BARRIERS = click.Choice(["b3", "B3"])


def _load(first_path: str, second_path: str, iso_path: str):
    first = condition_from_any(load_json(first_path))
    second = condition_from_any(load_json(second_path))
    psi = iso_from_dict(load_json(iso_path))
    return Structure(first.order, first.barriers), Structure(second.order, second.barriers), psi


def create_amalgam_blueprint() -> Blueprint:
    bp = Blueprint("amalgam", __name__, cli_group=None)

    @bp.cli.command("amalgamate")
    @click.argument("first", type=click.Path(dir_okay=False))
    @click.argument("second", type=click.Path(dir_okay=False))
    @click.argument("iso", type=click.Path(dir_okay=False))
    @click.option("--barrier", type=BARRIERS, default="B3", show_default=True)
    @click.option("--format", "fmt", type=FORMATS, default="json", show_default=True)
    @workbench_command("amalgamate")
    def amalgamate(run: RunReport, first: str, second: str, iso: str, barrier: str, fmt: str) -> None:
        """Amalgamate two orders along an isomorphism and verify the result."""
        one, two, psi = _load(first, second, iso)
        report = run.record(is_progressive(one.order, one.barriers, two.order, two.barriers, psi))
        if not report:
            emit(run, {"progressive": report.to_dict()})
            return
        with run.phase("order"):
            merged = psi_amalgamate(one.order, two.order, psi)
        with run.phase("barriers"):
            combine = amalgamate_B3 if barrier == "B3" else amalgamate_b3
            barriers = combine(one, two, psi)
        with run.phase("verify"):
            checks = {
                "partialOrder": run.record(check_partial_order(merged)),
                "unique": run.record(verify_amalgam_unique(one.order, two.order, psi, merged)),
                "barriers": run.record(check_barrier_map(merged, barriers)),
            }
        if fmt == "dot":
            emit(run, {"points": len(merged)}, text=export_dot(merged, "amalgam").rstrip("\n"))
            return
        emit(
            run,
            {
                "order": order_to_dict(merged),
                "barriers": barriers_to_list(barriers),
                "checks": {name: r.to_dict() for name, r in checks.items()},
            },
        )

    @bp.cli.command("b3")
    @click.argument("first", type=click.Path(dir_okay=False))
    @click.argument("second", type=click.Path(dir_okay=False))
    @click.argument("iso", type=click.Path(dir_okay=False))
    @click.argument("x", type=POINT)
    @click.argument("y", type=POINT)
    @click.option("--barrier", type=BARRIERS, default="b3", show_default=True)
    @workbench_command("b3")
    def b3(run: RunReport, first: str, second: str, iso: str, x: Point, y: Point, barrier: str) -> None:
        """Barrier of one pair in the amalgamated map, with its unfolding for cross pairs."""
        one, two, psi = _load(first, second, iso)
        combine = amalgamate_B3 if barrier == "B3" else amalgamate_b3
        barriers = combine(one, two, psi)
        payload = {
            "pair": [point_to_list(x), point_to_list(y)],
            "barrier": points_to_list(barriers.get(x, y)),
        }
        only1 = one.order.domain - two.order.domain
        only2 = two.order.domain - one.order.domain
        if x in only2 and y in only1:
            x, y = y, x
        if x in only1 and y in only2 and y != psi(x):
            sequences = canonical_sequences(one, two, psi, x, y)
            payload["leftPairs"] = [[point_to_list(p), point_to_list(q)] for p, q in sequences.left_pairs]
            payload["rightPairs"] = [[point_to_list(p), point_to_list(q)] for p, q in sequences.right_pairs]
        run.record(check_barrier_map(psi_amalgamate(one.order, two.order, psi), barriers))
        emit(run, payload)

    return bp
