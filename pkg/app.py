import logging
import os
import sys
from typing import List, Optional, Sequence, Tuple

import click
from flask import Flask
from flask.cli import FlaskGroup, ScriptInfo

from commands.amalgam import create_amalgam_blueprint
from commands.conditions import create_conditions_blueprint
from commands.order import create_order_blueprint
from commands.simulate import create_simulate_blueprint
from commands.space import create_space_blueprint
from commands.symsys import create_symsys_blueprint
from services.space import DEFAULT_TOPOLOGY_CAP
from utils.cache import initialise_cache
from utils.report import EXIT_CODES, RunReport


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise RuntimeError(f"{name} must be an integer, got {raw!r}") from None


def create_app() -> Flask:
    app = Flask(__name__)
    app.logger.setLevel(logging.INFO)
    logging.getLogger("services").setLevel(logging.INFO)

    app.config["TOPOLOGY_CAP"] = _int_env("SCATTERED_FORGE_CAP", DEFAULT_TOPOLOGY_CAP)
    app.config["CACHE_TTL"] = _int_env("SCATTERED_FORGE_CACHE_TTL", 600)

    cache_client = initialise_cache(app.logger)

    app.register_blueprint(create_order_blueprint())
    app.register_blueprint(create_space_blueprint(cache_client))
    app.register_blueprint(create_amalgam_blueprint())
    app.register_blueprint(create_symsys_blueprint())
    app.register_blueprint(create_conditions_blueprint())
    app.register_blueprint(create_simulate_blueprint())

    return app


cli = FlaskGroup(create_app=create_app, add_default_commands=False, help="Scattered-space construction workbench.")


def cli_dispatch(argv: Sequence[str], info: Optional[ScriptInfo] = None) -> Tuple[int, Optional[RunReport]]:
    """Run one command; returns its exit code and the RunReport it produced."""
    info = info or ScriptInfo(create_app=create_app)
    args: List[str] = list(argv)
    try:
        code = cli.main(args, prog_name="scattered-forge", obj=info, standalone_mode=False)
    except click.exceptions.Exit as exc:
        code = exc.exit_code
    except click.ClickException as exc:
        exc.show()
        code = EXIT_CODES["error"]
    except click.exceptions.Abort:
        code = EXIT_CODES["error"]
    return (code or 0), info.data.get("report")


if __name__ == "__main__":
    sys.exit(cli_dispatch(sys.argv[1:])[0])
