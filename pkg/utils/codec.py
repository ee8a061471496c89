"""JSON encoding for every value the workbench reads or writes.

Points are [alpha, beta] lists. Reflexive pairs are left out of stored
relations and restored on load.
"""
import json
from functools import wraps
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

from services.amalgam import OrderIso
from services.conditions import Condition
from services.errors import MalformedInputError
from services.generic import CoverGoal, DensitySchedule, FanoutGoal, Goal, RelateGoal
from services.order import BarrierMap, HeightedOrder, Point, Universe, canonical_barriers, ordered
from services.space import SpaceAnalysis
from services.symsys import GapWitness, NodeModel, SymSystem

T = TypeVar("T")


def _decoder(func: Callable[..., T]) -> Callable[..., T]:
    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> T:
        try:
            return func(*args, **kwargs)
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            if isinstance(exc, MalformedInputError):
                raise
            raise MalformedInputError(f"cannot decode {func.__name__.replace('_from_dict', '')}: {exc!r}") from exc

    return wrapper


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path} is not valid JSON: {exc}") from exc
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from exc


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def point_to_list(point: Point) -> List[int]:
    return [point.alpha, point.beta]


def point_from_list(raw: Iterable[int]) -> Point:
    alpha, beta = raw
    if not isinstance(alpha, int) or not isinstance(beta, int):
        raise MalformedInputError(f"point coordinates must be integers, got {raw!r}")
    return Point(alpha, beta)


def points_to_list(points: Iterable[Point]) -> List[List[int]]:
    return [point_to_list(p) for p in sorted(points)]


def universe_to_dict(universe: Universe) -> Dict[str, int]:
    return {"width": universe.width, "height": universe.height, "fanout": universe.fanout}


@_decoder
def universe_from_dict(raw: Dict[str, Any]) -> Universe:
    return Universe(raw["width"], raw["height"], raw.get("fanout", 1))


def order_to_dict(order: HeightedOrder) -> Dict[str, Any]:
    return {
        "universe": universe_to_dict(order.universe),
        "points": points_to_list(order.domain),
        "rel": [[point_to_list(x), point_to_list(y)] for x, y in order.strict_pairs()],
    }


@_decoder
def order_from_dict(raw: Dict[str, Any], fanout: Optional[int] = None) -> HeightedOrder:
    universe = universe_from_dict(raw["universe"])
    if fanout is not None:
        universe = universe.with_fanout(fanout)
    points = [point_from_list(p) for p in raw["points"]]
    pairs = [(point_from_list(x), point_from_list(y)) for x, y in raw.get("rel", [])]
    return HeightedOrder.build(universe, points, pairs)


def barriers_to_list(bmap: BarrierMap) -> List[Dict[str, Any]]:
    rows = []
    for pair in sorted(bmap.pairs(), key=sorted):
        x, y = ordered(pair)
        rows.append({"pair": [point_to_list(x), point_to_list(y)], "set": points_to_list(bmap.entries[pair])})
    return rows


@_decoder
def barriers_from_list(raw: List[Dict[str, Any]]) -> BarrierMap:
    mapping = {}
    for row in raw:
        key = frozenset(point_from_list(p) for p in row["pair"])
        if key in mapping:
            raise MalformedInputError(f"barrier for {sorted(key)} given twice")
        mapping[key] = [point_from_list(p) for p in row["set"]]
    return BarrierMap.of(mapping)


def structure_from_dict(raw: Dict[str, Any], fanout: Optional[int] = None):
    """An order file with optional barriers; missing barriers default to the canonical map."""
    order = order_from_dict(raw, fanout)
    if "barriers" in raw:
        return order, barriers_from_list(raw["barriers"])
    return order, canonical_barriers(order)


def system_to_dict(system: SymSystem) -> Dict[str, Any]:
    return {
        "thresholdTop": system.threshold_top,
        "nodes": [
            {"code": n.code, "delta": n.delta, "elements": sorted(n.elements)} for n in system.nodes
        ],
        "contains": [list(pair) for pair in sorted(system.containment())],
    }


@_decoder
def system_from_dict(raw: Dict[str, Any]) -> SymSystem:
    top = raw["thresholdTop"]
    nodes = [NodeModel.of(n["code"], n["elements"], top, n.get("delta")) for n in raw.get("nodes", [])]
    return SymSystem.of(top, nodes, raw.get("contains"))


def condition_to_dict(q: Condition) -> Dict[str, Any]:
    return {
        "order": order_to_dict(q.order),
        "barriers": barriers_to_list(q.barriers),
        "system": system_to_dict(q.system),
        "marked": sorted(q.marked),
        "pointViews": {str(code): points_to_list(view) for code, view in sorted(q.point_views.items())},
    }


@_decoder
def condition_from_dict(raw: Dict[str, Any], fanout: Optional[int] = None) -> Condition:
    order = order_from_dict(raw["order"], fanout)
    barriers = barriers_from_list(raw["barriers"]) if "barriers" in raw else canonical_barriers(order)
    system = system_from_dict(raw["system"]) if "system" in raw else SymSystem(0)
    views = {int(code): frozenset(point_from_list(p) for p in view) for code, view in raw.get("pointViews", {}).items()}
    return Condition(order, barriers, system, frozenset(raw.get("marked", [])), views)


@_decoder
def iso_from_dict(raw: Dict[str, Any]) -> OrderIso[Point]:
    return OrderIso({point_from_list(k): point_from_list(v) for k, v in raw["map"]})


@_decoder
def ordinal_iso_from_dict(raw: Dict[str, Any]) -> OrderIso[int]:
    return OrderIso({int(k): int(v) for k, v in raw["map"]})


def goal_to_dict(goal: Goal) -> Dict[str, Any]:
    if isinstance(goal, CoverGoal):
        return {"kind": "cover", "point": point_to_list(goal.point)}
    if isinstance(goal, RelateGoal):
        return {"kind": "relate", "target": point_to_list(goal.target), "level": goal.level}
    return {"kind": "fanout", "target": point_to_list(goal.target), "level": goal.level, "m": goal.m}


@_decoder
def goal_from_dict(raw: Dict[str, Any]) -> Goal:
    kind = raw["kind"]
    if kind == "cover":
        return CoverGoal(point_from_list(raw["point"]))
    if kind == "relate":
        return RelateGoal(point_from_list(raw["target"]), raw["level"])
    if kind == "fanout":
        return FanoutGoal(point_from_list(raw["target"]), raw["level"], raw["m"])
    raise MalformedInputError(f"unknown goal kind {kind!r}")


def schedule_to_dict(schedule: DensitySchedule) -> Dict[str, Any]:
    return {"universe": universe_to_dict(schedule.universe), "goals": [goal_to_dict(g) for g in schedule.goals]}


@_decoder
def schedule_from_dict(raw: Dict[str, Any]) -> DensitySchedule:
    return DensitySchedule(universe_from_dict(raw["universe"]), tuple(goal_from_dict(g) for g in raw["goals"]))


def rank_key(point: Point) -> str:
    return f"{point.alpha},{point.beta}"


def analysis_to_dict(analysis: SpaceAnalysis) -> Dict[str, Any]:
    return {
        "levels": [points_to_list(level) for level in analysis.levels],
        "ranks": {rank_key(p): r for p, r in sorted(analysis.ranks.items())},
        "residue": points_to_list(analysis.residue),
    }


@_decoder
def analysis_from_dict(raw: Dict[str, Any]) -> SpaceAnalysis:
    levels = tuple(frozenset(point_from_list(p) for p in level) for level in raw["levels"])
    ranks = {point_from_list(int(c) for c in key.split(",")): int(r) for key, r in raw["ranks"].items()}
    return SpaceAnalysis(levels, ranks, frozenset(point_from_list(p) for p in raw["residue"]))


def gap_to_dict(witness: GapWitness) -> Dict[str, Any]:
    return {"i": witness.i, "alpha": witness.alpha, "beta": witness.beta}


def condition_from_any(raw: Dict[str, Any], fanout: Optional[int] = None) -> Condition:
    """A condition file, or a bare order file lifted to a condition with an empty system."""
    if isinstance(raw, dict) and "order" in raw:
        return condition_from_dict(raw, fanout)
    return Condition.bare(*structure_from_dict(raw, fanout))
