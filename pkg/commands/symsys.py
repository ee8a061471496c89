import click
from flask import Blueprint

from services.report import Report
from services.symsys import check_system, gap_search, verify_gap_witness
from utils.codec import gap_to_dict, load_json, system_from_dict, system_to_dict
from utils.report import RunReport, emit, workbench_command


def create_symsys_blueprint() -> Blueprint:
    bp = Blueprint("symsys", __name__, cli_group=None)

    @bp.cli.command("symsys-check")
    @click.argument("path", type=click.Path(dir_okay=False))
    @workbench_command("symsys-check")
    def symsys_check(run: RunReport, path: str) -> None:
        """Check the structural clauses of a symmetric system."""
        system = system_from_dict(load_json(path))
        with run.phase("check"):
            report = run.record(check_system(system))
        emit(run, {"nodes": len(system), "system": system_to_dict(system), "report": report.to_dict()})

    @bp.cli.command("gap-search")
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.option("--node", "code", type=int, required=True, help="Code of the node to search in.")
    @click.option("--ordinal", "i", type=click.IntRange(min=0), required=True, help="Ordinal outside the node.")
    @click.option("--outside-only", is_flag=True, help="Only nodes not contained in the searched node may block.")
    @workbench_command("gap-search")
    def gap(run: RunReport, path: str, code: int, i: int, outside_only: bool) -> None:
        """Find an interval of the node around an ordinal that smaller nodes leave empty."""
        system = system_from_dict(load_json(path))
        node = system.node(code)
        with run.phase("search"):
            witness = gap_search(system, node, i, outside_only)
        if witness is None:
            run.record(Report.violation("gap", (code, i), f"no gap around {i} in node {code}"))
            emit(run, {"node": code, "i": i, "witness": None})
            return
        report = run.record(verify_gap_witness(system, node, witness, outside_only))
        emit(run, {"node": code, "i": i, "witness": gap_to_dict(witness), "verified": report.to_dict()})

    return bp
