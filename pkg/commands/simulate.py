from typing import Optional

import click
from flask import Blueprint, current_app

from commands.params import FORMATS
from services.conditions import Condition
from services.generic import full_schedule, run_schedule
from services.order import Universe, check_admissible
from services.space import cb_derive, verify_levels
from utils.codec import condition_from_any, condition_to_dict, load_json, schedule_from_dict
from utils.dot import export_dot
from utils.report import RunReport, emit, workbench_command


def create_simulate_blueprint() -> Blueprint:
    bp = Blueprint("simulate", __name__, cli_group=None)

    @bp.cli.command("simulate")
    @click.option("--width", type=click.IntRange(min=1), required=True)
    @click.option("--height", type=click.IntRange(min=1), required=True)
    @click.option("--fanout", type=click.IntRange(min=1), default=1, show_default=True)
    @click.option("--seed", type=int, required=True, help="Seed of the random choices.")
    @click.option("--schedule", "schedule_path", type=click.Path(dir_okay=False), help="Goal list; default meets every goal.")
    @click.option("--start", "start_path", type=click.Path(dir_okay=False), help="Condition the chain starts from.")
    @click.option("--format", "fmt", type=FORMATS, default="json", show_default=True)
    @workbench_command("simulate")
    def simulate(
        run: RunReport,
        width: int,
        height: int,
        fanout: int,
        seed: int,
        schedule_path: Optional[str],
        start_path: Optional[str],
        fmt: str,
    ) -> None:
        """Grow a condition meeting a density schedule and analyse the order it produces."""
        universe = Universe(width, height, fanout)
        schedule = schedule_from_dict(load_json(schedule_path)) if schedule_path else full_schedule(universe)
        start = condition_from_any(load_json(start_path)) if start_path else Condition.empty(universe)
        with run.phase("simulate"):
            chain, result = run_schedule(start, schedule, seed)
        with run.phase("check"):
            admissible = run.record(check_admissible(result.order, result.barriers))
        payload = {
            "seed": seed,
            "goals": len(schedule),
            "links": len(chain),
            "admissible": admissible.to_dict(),
        }
        if admissible:
            with run.phase("derive"):
                analysis = cb_derive(result.order, cap=current_app.config["TOPOLOGY_CAP"])
            payload["sequence"] = [len(level) for level in analysis.levels]
            payload["levels"] = run.record(verify_levels(result.order, analysis)).to_dict()
        if fmt == "dot":
            emit(run, payload, text=export_dot(result.order, "generic").rstrip("\n"))
            return
        payload["condition"] = condition_to_dict(result)
        if fmt == "text":
            sequence = " ".join(str(size) for size in payload.get("sequence", []))
            emit(run, payload, text=f"links {len(chain)} points {len(result.order)} sequence {sequence}")
            return
        emit(run, payload)

    return bp
