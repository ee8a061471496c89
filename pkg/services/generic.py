"""Grow a chain of conditions that meets a finite list of density goals."""
import logging
import random
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

from services.conditions import Condition, add_point, add_point_above, chain_union, extends, insert_relation, validate
from services.errors import InvalidInputError, InvalidPointError, MalformedInputError, ScheduleInfeasibleError
from services.order import Point, Universe

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoverGoal:
    point: Point
    kind = "cover"

    def __str__(self) -> str:
        return f"cover {self.point}"


@dataclass(frozen=True)
class RelateGoal:
    target: Point
    level: int
    kind = "relate"

    def __str__(self) -> str:
        return f"relate level {self.level} below {self.target}"


@dataclass(frozen=True)
class FanoutGoal:
    target: Point
    level: int
    m: int
    kind = "fanout"

    def __str__(self) -> str:
        return f"fanout {self.m} at level {self.level} below {self.target}"


Goal = Union[CoverGoal, RelateGoal, FanoutGoal]


@dataclass(frozen=True)
class DensitySchedule:
    universe: Universe
    goals: Tuple[Goal, ...] = ()

    def __post_init__(self) -> None:
        for goal in self.goals:
            point = goal.point if isinstance(goal, CoverGoal) else goal.target
            if not self.universe.contains(point):
                raise MalformedInputError(f"goal '{goal}' lies outside the universe", witness=(point,))
            if isinstance(goal, (RelateGoal, FanoutGoal)) and not 0 <= goal.level < goal.target.beta:
                raise MalformedInputError(f"goal '{goal}' needs a level below its target", witness=(goal.target,))
            if isinstance(goal, FanoutGoal) and goal.m < 1:
                raise MalformedInputError(f"goal '{goal}' needs a positive fan-out")

    def __len__(self) -> int:
        return len(self.goals)


def full_schedule(universe: Universe) -> DensitySchedule:
    if universe.fanout > universe.width:
        raise ScheduleInfeasibleError(
            f"fan-out {universe.fanout} exceeds the width {universe.width}", witness=(universe.fanout,)
        )
    goals: List[Goal] = []
    for beta in range(universe.height):
        for alpha in range(universe.width):
            point = Point(alpha, beta)
            if beta > 0:
                goals.append(FanoutGoal(point, beta - 1, universe.fanout))
            goals.append(CoverGoal(point))
    return DensitySchedule(universe, tuple(goals))


def _level(q: Condition, level: int) -> List[Point]:
    return sorted(p for p in q.order.domain if p.beta == level)


def _below_at(q: Condition, target: Point, level: int) -> List[Point]:
    return sorted(p for p in q.order.down(target) if p.beta == level)


def _ensure(q: Condition, goal: Goal, target: Point, level: int, m: int, rng: random.Random) -> Condition:
    universe = q.order.universe
    if m > universe.width:
        raise ScheduleInfeasibleError(f"goal '{goal}' asks for more points than the width allows", witness=(target,))
    if target not in q.order.domain:
        candidates = _level(q, level)
        if len(candidates) < m:
            raise ScheduleInfeasibleError(
                f"goal '{goal}' finds only {len(candidates)} points at level {level}", witness=(target,)
            )
        return add_point_above(q, target, rng.sample(candidates, m))
    missing = m - len(_below_at(q, target, level))
    if missing <= 0:
        return q
    free = [Point(a, level) for a in range(universe.width) if Point(a, level) not in q.order.domain]
    for new in sorted(rng.sample(free, min(missing, len(free)))):
        q = add_point(q, new, target)
        missing -= 1
    outsiders = [p for p in _level(q, level) if not q.order.le(p, target)]
    rng.shuffle(outsiders)
    for x in outsiders:
        if missing <= 0:
            break
        try:
            revised = insert_relation(q, x, target)
        except InvalidPointError as error:
            logger.debug("relation %s<=%s rolled back: %s", x, target, error)
            continue
        if extends(revised, q):
            q = revised
            missing -= 1
        else:
            logger.debug("relation %s<=%s rolled back: barriers would change", x, target)
    if missing > 0:
        raise ScheduleInfeasibleError(f"goal '{goal}' is short by {missing} points", witness=(target,))
    return q


def _advance(q: Condition, goal: Goal, rng: random.Random) -> Condition:
    if isinstance(goal, CoverGoal):
        if goal.point in q.order.domain:
            return q
        return add_point_above(q, goal.point, ())
    if isinstance(goal, RelateGoal):
        return _ensure(q, goal, goal.target, goal.level, 1, rng)
    return _ensure(q, goal, goal.target, goal.level, goal.m, rng)


def _meet(q: Condition, goal: Goal, rng: random.Random) -> Condition:
    try:
        step = _advance(q, goal, rng)
    except InvalidPointError as error:
        raise ScheduleInfeasibleError(f"goal '{goal}' cannot be met: {error}", witness=error.witness) from error
    if step is not q:
        report = validate(step)
        if not report:
            raise ScheduleInfeasibleError(
                f"goal '{goal}' breaks clause {report.clause}: {report.message}", witness=report.witness
            )
    return step


def run_schedule(seed: Condition, sched: DensitySchedule, rng_seed: int) -> Tuple[List[Condition], Condition]:
    if seed.order.universe != sched.universe:
        raise MalformedInputError("seed condition and schedule use different universes")
    report = validate(seed)
    if not report:
        raise InvalidInputError(f"seed condition fails clause {report.clause}: {report.message}", witness=report.witness)
    rng = random.Random(rng_seed)
    chain: List[Condition] = [seed]
    for goal in sched.goals:
        step = _meet(chain[-1], goal, rng)
        if step is not chain[-1]:
            chain.append(step)
    result = chain_union(chain)
    logger.info("schedule of %s goals grew %s links and %s points", len(sched), len(chain), len(result.order))
    return chain, result


def goals_of(schedule: DensitySchedule, kind: str) -> Sequence[Goal]:
    return [goal for goal in schedule.goals if goal.kind == kind]
