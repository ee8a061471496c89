from typing import Any, Optional

import click

from services.order import Point


class PointParam(click.ParamType):
    """Accepts "a,b" or "(a,b)"."""

    name = "point"

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]) -> Point:
        if isinstance(value, Point):
            return value
        text = str(value).strip().strip("()")
        try:
            alpha, beta = (int(part) for part in text.split(","))
        except ValueError:
            self.fail(f"{value!r} is not a point of the form a,b", param, ctx)
        return Point(alpha, beta)


POINT = PointParam()

FORMATS = click.Choice(["json", "dot", "text"])
