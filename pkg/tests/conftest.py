import os
from pathlib import Path

import pytest
from flask.cli import ScriptInfo
from hypothesis import HealthCheck, settings

from app import create_app

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("acceptance", max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixture_path():
    def resolve(name: str) -> str:
        return str(FIXTURES / name)

    return resolve


@pytest.fixture
def app(monkeypatch):
    monkeypatch.delenv("REDIS_HOST", raising=False)
    app = create_app()
    app.config.update(TESTING=True)
    return app


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def invoke(app, runner):
    """Run a command and return the click result together with its RunReport."""

    def run(*args: str):
        info = ScriptInfo(create_app=lambda: app)
        result = runner.invoke(args=list(args), obj=info)
        return result, info.data.get("report")

    return run
