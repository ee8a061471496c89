import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import wraps
from typing import Any, Callable, Dict, Iterator, List, Optional

import click
from flask import current_app
from flask.cli import ScriptInfo

from services.errors import WorkbenchError
from services.report import Report
from utils.codec import dumps

EXIT_CODES = {"ok": 0, "violation": 1, "error": 2}


@dataclass
class RunReport:
    command: str
    status: str = "ok"
    witnesses: List[Any] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    message: str = ""
    payload: Optional[Any] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        started = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round((time.perf_counter() - started) * 1000, 3)

    def record(self, report: Report) -> Report:
        if not report and self.status == "ok":
            self.status = "violation"
            self.message = report.message
        if not report:
            self.witnesses.append(report.to_dict())
        return report

    def fail(self, error: WorkbenchError) -> None:
        self.status = "error"
        self.message = str(error)
        self.witnesses = []

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "status": self.status,
            "witnesses": self.witnesses,
            "timings": self.timings,
            "message": self.message,
        }


def emit(run: RunReport, payload: Any, text: Optional[str] = None) -> None:
    """Write the command's result to stdout; `text` replaces the JSON rendering."""
    run.payload = payload
    click.echo(text if text is not None else dumps(payload))


def workbench_command(name: str) -> Callable:
    """Wrap a command body: build its RunReport, map failures to exit codes, log one summary line."""

    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> None:
            run = RunReport(name)
            started = time.perf_counter()
            try:
                func(run, *args, **kwargs)
            except WorkbenchError as exc:
                run.fail(exc)
                click.echo(f"error [{exc.code}]: {exc}", err=True)
            run.timings["total"] = round((time.perf_counter() - started) * 1000, 3)
            ctx = click.get_current_context()
            ctx.ensure_object(ScriptInfo).data["report"] = run
            current_app.logger.info(
                "%s args=%s status=%s witnesses=%s duration_ms=%s",
                name,
                sorted(k for k, v in kwargs.items() if v not in (None, False)),
                run.status,
                len(run.witnesses),
                run.timings["total"],
            )
            if run.status == "violation":
                click.echo(f"violation: {run.message}", err=True)
            ctx.exit(run.exit_code)

        return wrapper

    return decorator
