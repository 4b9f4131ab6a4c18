"""Content planning: constrained event skeletons whose modification is
guaranteed to change the question's answer.

A plan fixes the ordered event kinds, which slots carry an insertion, the
attribute relations that make the modified events the answer-bearing ones,
and a question template bound to slot indices. Instantiation fills the plan
semi-randomly under those constraints; distances are pairwise distinct and
times strictly increase, so every question has a unique answer.

Uniqueness universe: for reports of n >= 3 events, generated kind sequences
contain between 2 and n-1 goals ("other" events diversify every report) and
must be feasible for their question family. ``capacity`` counts exactly the
(kind sequence, family) pairs this module can emit.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import CapacityExceeded, ExhaustedRetries, NoQualifyingEvent, UnsatisfiablePlan
from .oracle import oracle_answer
from .resources import NAME_FILE, data_path
from .types import (
    GOAL,
    MAX_DISTANCE,
    MAX_TIME,
    MIN_DISTANCE,
    MIN_TIME,
    OTHER_KINDS,
    Agg,
    CompareAgg,
    Direction,
    Event,
    EventDescriptor,
    NumAttr,
    OrderAttr,
    PlayerRef,
    QuestionFamily,
    QuestionSpec,
    SamCategory,
    Target,
    ordinal,
)

DEFAULT_RETRIES = 100
# Chance of a second participant per event kind; substitutions require one.
COACTOR_PROB = {
    GOAL: 0.8,
    "substitution": 1.0,
    "foul": 0.5,
    "clearance": 0.5,
    "save": 0.6,
    "corner": 0.4,
    "injury": 0.5,
}
ROSTER_SIZE = 14


@dataclass(frozen=True)
class Relation:
    """Attribute relation against an earlier slot (acyclic by construction)."""

    attr: str
    op: str  # "gt" | "lt"
    other: int


@dataclass(frozen=True)
class EventConstraint:
    kind: str
    modified: bool = False
    needs_coactor: bool = False
    relations: tuple[Relation, ...] = ()
    time_window: tuple[int, int] | None = None


@dataclass(frozen=True)
class QuestionPlan:
    """Question template with descriptor fields bound to slot indices."""

    family: QuestionFamily
    target: Target
    attr: OrderAttr | None = None
    rank: int | None = None
    agg: Agg | None = None
    over: NumAttr | None = None
    direction: Direction | None = None
    anchor_slot: int | None = None
    compare: CompareAgg | None = None
    pair_slots: tuple[int, int] | None = None


@dataclass(frozen=True)
class ContentPlan:
    slots: tuple[EventConstraint, ...]
    question: QuestionPlan
    modified_slots: tuple[int, ...]

    @property
    def kind_seq(self) -> tuple[str, ...]:
        return tuple(s.kind for s in self.slots)

    @property
    def uniqueness_key(self) -> tuple[tuple[str, ...], str]:
        return (self.kind_seq, self.question.family.value)


def family_feasible(kind_seq: Sequence[str], family: QuestionFamily) -> bool:
    """Whether the kind sequence admits at least one plan for the family."""
    goals = [i for i, k in enumerate(kind_seq) if k == GOAL]
    if len(goals) < 2:
        return False
    if family is QuestionFamily.BRIDGE:
        return max_sam_bound(kind_seq, family) >= 1
    return True


def max_sam_bound(kind_seq: Sequence[str], family: QuestionFamily) -> int:
    """Largest modification count a plan over this sequence can carry."""
    goals = [i for i, k in enumerate(kind_seq) if k == GOAL]
    if family is QuestionFamily.BRIDGE:
        best = 0
        for i, kind in enumerate(kind_seq):
            if kind == GOAL:
                continue
            before = sum(1 for g in goals if g < i)
            after = sum(1 for g in goals if g > i)
            best = max(best, before - 1, after - 1)
        return min(3, best)
    return min(3, len(goals) - 1)


def in_universe(kind_seq: Sequence[str]) -> bool:
    n = len(kind_seq)
    n_goals = sum(1 for k in kind_seq if k == GOAL)
    return n >= 3 and 2 <= n_goals <= n - 1


def capacity(n_events: int, families: Sequence[QuestionFamily] = tuple(QuestionFamily)) -> int:
    """Exact count of unique (kind sequence, family) pairs the generator can emit."""
    total = 0
    for seq in itertools.product((GOAL,) + OTHER_KINDS, repeat=n_events):
        if not in_universe(seq):
            continue
        total += sum(1 for fam in families if family_feasible(seq, fam))
    return total


def sample_kind_seq(family: QuestionFamily, n_events: int, rng: random.Random) -> tuple[str, ...]:
    """Draw a feasible kind sequence from the uniqueness universe."""
    if n_events < 3:
        raise UnsatisfiablePlan("generated reports need at least 3 events")
    for _ in range(DEFAULT_RETRIES):
        n_goals = rng.randint(2, n_events - 1)
        positions = set(rng.sample(range(n_events), n_goals))
        seq = tuple(
            GOAL if i in positions else rng.choice(OTHER_KINDS) for i in range(n_events)
        )
        if family_feasible(seq, family):
            return seq
    raise UnsatisfiablePlan(f"could not sample a feasible kind sequence for {family.value}")


def build_plan(
    family: QuestionFamily,
    n_events: int,
    n_sam: int | None,
    rng: random.Random,
    kind_seq: Sequence[str] | None = None,
) -> ContentPlan:
    """Build a plan whose modified slots change the question's answer.

    The modified events are placed so that excluding them shifts the answer:
    extremum questions modify the top or bottom goals, rank questions the
    ranks the question touches, bridge questions the goals nearest the
    anchor, and comparisons the winning member of the pair.
    """
    if n_sam is not None and n_sam < 1:
        raise UnsatisfiablePlan("a plan without modifications cannot change the answer")
    if kind_seq is None:
        kind_seq = sample_kind_seq(family, n_events, rng)
    kind_seq = tuple(kind_seq)
    if len(kind_seq) != n_events:
        raise UnsatisfiablePlan(f"kind sequence length {len(kind_seq)} != n_events {n_events}")
    if not family_feasible(kind_seq, family):
        raise UnsatisfiablePlan(f"kind sequence {kind_seq} infeasible for {family.value}")
    bound = max_sam_bound(kind_seq, family)
    if n_sam is None:
        n_sam = rng.randint(1, bound)
    if not 1 <= n_sam <= bound:
        raise UnsatisfiablePlan(
            f"{family.value} over {kind_seq} supports 1..{bound} modifications, not {n_sam}"
        )

    goals = [i for i, k in enumerate(kind_seq) if k == GOAL]
    if family is QuestionFamily.ARGSELECT:
        question, modified, relations = _plan_argselect(goals, n_sam, rng)
    elif family is QuestionFamily.ORDER:
        question, modified, relations = _plan_order(goals, n_sam, rng)
    elif family is QuestionFamily.BRIDGE:
        question, modified, relations = _plan_bridge(kind_seq, goals, n_sam, rng)
    else:
        question, modified, relations = _plan_compare(goals, n_sam, rng)

    needs_coactor = set()
    if question.target is Target.COACTOR:
        if question.pair_slots is not None:
            needs_coactor = set(question.pair_slots)
        else:
            needs_coactor = set(goals)
    by_slot: dict[int, list[Relation]] = {}
    for slot_idx, rel in relations:
        by_slot.setdefault(slot_idx, []).append(rel)
    slots = tuple(
        EventConstraint(
            kind=kind,
            modified=i in modified,
            needs_coactor=i in needs_coactor,
            relations=tuple(by_slot.get(i, ())),
        )
        for i, kind in enumerate(kind_seq)
    )
    return ContentPlan(slots=slots, question=question, modified_slots=tuple(sorted(modified)))


def _plan_argselect(goals, n_sam, rng):
    agg = rng.choice([Agg.MAX, Agg.MIN])
    target = rng.choice([Target.ACTOR, Target.TIME, Target.DISTANCE])
    modified = set(rng.sample(goals, n_sam))
    relations = []
    for m in modified:
        for u in goals:
            if u in modified:
                continue
            # modified distances sit above (MAX) or below (MIN) all others
            later, earlier = max(m, u), min(m, u)
            if agg is Agg.MAX:
                op = "gt" if later == m else "lt"
            else:
                op = "lt" if later == m else "gt"
            relations.append((later, Relation("distance", op, earlier)))
    question = QuestionPlan(
        family=QuestionFamily.ARGSELECT, target=target, agg=agg, over=NumAttr.DISTANCE
    )
    return question, modified, relations


def _plan_order(goals, n_sam, rng):
    g = len(goals)
    attr = rng.choice([OrderAttr.POSITION, OrderAttr.TIME])
    target = rng.choice([Target.ACTOR, Target.COACTOR, Target.TIME, Target.DISTANCE])
    ranks = list(range(0, g - n_sam)) + list(range(n_sam - g, 0))
    rank = rng.choice(ranks)
    if rank >= 0:
        modified = {goals[r] for r in range(rank, rank + n_sam)}
    else:
        top = g + rank
        modified = {goals[r] for r in range(top - n_sam + 1, top + 1)}
    question = QuestionPlan(family=QuestionFamily.ORDER, target=target, attr=attr, rank=rank)
    return question, modified, []


def _plan_bridge(kind_seq, goals, n_sam, rng):
    target = rng.choice([Target.ACTOR, Target.TIME, Target.DISTANCE])
    options = []
    for i, kind in enumerate(kind_seq):
        if kind == GOAL:
            continue
        before = [g for g in goals if g < i]
        after = [g for g in goals if g > i]
        if len(before) >= n_sam + 1:
            options.append((i, Direction.BEFORE, before))
        if len(after) >= n_sam + 1:
            options.append((i, Direction.AFTER, after))
    if not options:
        raise UnsatisfiablePlan("no anchor has enough goals on one side")
    anchor_slot, direction, side = rng.choice(options)
    if direction is Direction.BEFORE:
        modified = set(side[-n_sam:])
    else:
        modified = set(side[:n_sam])
    question = QuestionPlan(
        family=QuestionFamily.BRIDGE, target=target, direction=direction, anchor_slot=anchor_slot
    )
    return question, modified, []


def _plan_compare(goals, n_sam, rng):
    agg = rng.choice(list(CompareAgg))
    target = rng.choice([Target.ACTOR, Target.COACTOR])
    a, b = rng.sample(goals, 2)
    if agg is CompareAgg.EARLIER:
        winner, loser = min(a, b), max(a, b)
    elif agg is CompareAgg.LATER:
        winner, loser = max(a, b), min(a, b)
    else:
        winner, loser = a, b
    relations = []
    if agg in (CompareAgg.FARTHER, CompareAgg.CLOSER):
        later, earlier = max(winner, loser), min(winner, loser)
        if agg is CompareAgg.FARTHER:
            op = "gt" if later == winner else "lt"
        else:
            op = "lt" if later == winner else "gt"
        relations.append((later, Relation("distance", op, earlier)))
    extras = rng.sample([g for g in goals if g not in (winner, loser)], n_sam - 1)
    modified = {winner, *extras}
    pair = [winner, loser]
    rng.shuffle(pair)  # surface order must not leak the answer
    question = QuestionPlan(
        family=QuestionFamily.COMPARE, target=target, compare=agg, pair_slots=tuple(pair)
    )
    return question, modified, relations


def load_names(path=None) -> tuple[tuple[str, ...], tuple[str, ...]]:
    path = path or data_path(NAME_FILE)
    given, family = [], []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tag, _, name = line.partition(" ")
            if tag == "GIVEN":
                given.append(name.strip())
            elif tag == "FAMILY":
                family.append(name.strip())
            else:
                raise ValueError(f"malformed name line {line!r}")
    return tuple(given), tuple(family)


def roster_size_for(n_events: int) -> int:
    """Roster big enough for one actor per event plus all possible coactors."""
    return max(ROSTER_SIZE, 2 * n_events + 2)


def sample_roster(
    names: tuple[tuple[str, ...], tuple[str, ...]], rng: random.Random, size: int = ROSTER_SIZE
) -> tuple[tuple[str, str], ...]:
    """Draw ``size`` players with pairwise distinct full names."""
    given, family = names
    roster: list[tuple[str, str]] = []
    seen = set()
    while len(roster) < size:
        pair = (rng.choice(given), rng.choice(family))
        if pair not in seen:
            seen.add(pair)
            roster.append(pair)
    return tuple(roster)


def instantiate(
    plan: ContentPlan,
    roster: Sequence[tuple[str, str]],
    rng: random.Random,
    retries: int = DEFAULT_RETRIES,
) -> tuple[Event, ...]:
    """Fill the plan with concrete events satisfying every constraint."""
    n = len(plan.slots)
    needed = n + sum(1 for s in plan.slots if s.needs_coactor or s.kind == "substitution")
    if len(roster) < needed:
        raise UnsatisfiablePlan(f"roster of {len(roster)} too small for up to {needed} players")

    for _ in range(retries):
        events = _try_instantiate(plan, roster, rng)
        if events is not None:
            check_constraints(plan, events)
            return events
    raise ExhaustedRetries(f"no constraint-satisfying instantiation in {retries} attempts")


def _try_instantiate(plan, roster, rng):
    n = len(plan.slots)
    indices = list(range(len(roster)))
    rng.shuffle(indices)
    actor_idx = indices[:n]
    spare = indices[n:]

    players = {}
    coactors: dict[int, int | None] = {}
    spare_pos = 0
    remaining_required = sum(
        1 for s in plan.slots if s.needs_coactor or s.kind == "substitution"
    )
    for i, slot in enumerate(plan.slots):
        required = slot.needs_coactor or slot.kind == "substitution"
        if required:
            remaining_required -= 1
            coactors[i] = spare[spare_pos]
            spare_pos += 1
            continue
        # optional coactors may not eat into spares reserved for required ones
        wants = rng.random() < COACTOR_PROB.get(slot.kind, 0.0)
        if wants and spare_pos < len(spare) - remaining_required:
            coactors[i] = spare[spare_pos]
            spare_pos += 1
        else:
            coactors[i] = None

    times = sorted(rng.sample(range(MIN_TIME, MAX_TIME + 1), n))
    for i, slot in enumerate(plan.slots):
        if slot.time_window and not slot.time_window[0] <= times[i] <= slot.time_window[1]:
            return None

    distances: dict[int, int] = {}
    for i, slot in enumerate(plan.slots):
        if slot.kind != GOAL:
            continue
        lo, hi = MIN_DISTANCE, MAX_DISTANCE
        for rel in slot.relations:
            if rel.attr != "distance":
                continue
            ref = distances[rel.other]
            if rel.op == "gt":
                lo = max(lo, ref + 1)
            else:
                hi = min(hi, ref - 1)
        pool = [d for d in range(lo, hi + 1) if d not in distances.values()]
        if not pool:
            return None
        distances[i] = rng.choice(pool)

    def player(idx: int) -> PlayerRef:
        if idx not in players:
            given, family = roster[idx]
            players[idx] = PlayerRef(index=idx, given=given, family=family)
        return players[idx]

    events = []
    for i, slot in enumerate(plan.slots):
        cat = rng.choice(list(SamCategory)) if slot.modified else None
        events.append(
            Event(
                id=i,
                kind=slot.kind if slot.kind != "any" else rng.choice((GOAL,) + OTHER_KINDS),
                actor=player(actor_idx[i]),
                coactor=player(coactors[i]) if coactors[i] is not None else None,
                time=times[i],
                distance=distances.get(i),
                modified=slot.modified,
                sam=(cat,) if cat else (),
            )
        )
    return tuple(events)


def check_constraints(plan: ContentPlan, events: Sequence[Event]) -> None:
    """Generic re-checker: raises if any plan or report invariant is violated."""
    if len(events) != len(plan.slots):
        raise UnsatisfiablePlan("event count differs from plan")
    for event, slot in zip(events, plan.slots):
        if slot.kind != "any" and event.kind != slot.kind:
            raise UnsatisfiablePlan(f"slot {event.id}: kind {event.kind} != {slot.kind}")
        if event.modified != slot.modified:
            raise UnsatisfiablePlan(f"slot {event.id}: modified flag mismatch")
        if slot.needs_coactor and event.coactor is None:
            raise UnsatisfiablePlan(f"slot {event.id}: coactor required")
        if slot.time_window and not slot.time_window[0] <= event.time <= slot.time_window[1]:
            raise UnsatisfiablePlan(f"slot {event.id}: time outside window")
        for rel in slot.relations:
            mine = getattr(event, rel.attr)
            theirs = getattr(events[rel.other], rel.attr)
            if rel.op == "gt" and not mine > theirs:
                raise UnsatisfiablePlan(f"slot {event.id}: {rel.attr} !> slot {rel.other}")
            if rel.op == "lt" and not mine < theirs:
                raise UnsatisfiablePlan(f"slot {event.id}: {rel.attr} !< slot {rel.other}")
    times = [e.time for e in events]
    if times != sorted(set(times)):
        raise UnsatisfiablePlan("times must increase strictly")
    dists = [e.distance for e in events if e.is_goal]
    if len(dists) != len(set(dists)):
        raise UnsatisfiablePlan("goal distances must be pairwise distinct")
    actors = [e.actor.index for e in events] + [
        e.coactor.index for e in events if e.coactor is not None
    ]
    if len(actors) != len(set(actors)):
        raise UnsatisfiablePlan("players must be pairwise distinct")


RANK_WORDS = {0: "first", 1: "second", 2: "third", 3: "fourth", 4: "fifth", 5: "sixth"}
NEG_RANK_WORDS = {-1: "last", -2: "second to last", -3: "third to last", -4: "fourth to last"}


def rank_word(rank: int) -> str:
    if rank >= 0:
        return RANK_WORDS.get(rank, ordinal(rank + 1))
    return NEG_RANK_WORDS.get(rank, f"{ordinal(-rank)} to last")

ANCHOR_PHRASES = {
    "foul": "{} was fouled",
    "clearance": "{} cleared the ball",
    "save": "{} made a save",
    "corner": "{} won a corner",
    "substitution": "{} came on",
    "injury": "{} went down injured",
}


def bind_question(plan: ContentPlan, events: Sequence[Event]) -> QuestionSpec:
    """Resolve the plan's question template against instantiated events."""
    q = plan.question
    if q.family is QuestionFamily.ORDER:
        noun = f"the {rank_word(q.rank)} goal"
        if q.attr is OrderAttr.TIME:
            noun += " of the match"
        surface = {
            Target.ACTOR: f"Who scored {noun}?",
            Target.COACTOR: f"Who assisted {noun}?",
            Target.TIME: f"When was {noun} scored?",
            Target.DISTANCE: f"From what distance was {noun} scored?",
        }[q.target]
        return QuestionSpec(
            family=q.family, target=q.target, surface=surface, attr=q.attr, rank=q.rank
        )
    if q.family is QuestionFamily.ARGSELECT:
        word = {
            (Agg.MAX, NumAttr.DISTANCE): "farthest",
            (Agg.MIN, NumAttr.DISTANCE): "closest",
            (Agg.MAX, NumAttr.TIME): "latest",
            (Agg.MIN, NumAttr.TIME): "earliest",
        }[(q.agg, q.over)]
        surface = {
            Target.ACTOR: f"Who scored the {word} goal?",
            Target.TIME: f"When was the {word} goal scored?",
            Target.DISTANCE: f"What was the distance of the {word} goal?",
        }[q.target]
        return QuestionSpec(
            family=q.family, target=q.target, surface=surface, agg=q.agg, over=q.over
        )
    if q.family is QuestionFamily.BRIDGE:
        anchor_event = events[q.anchor_slot]
        descriptor = EventDescriptor(kind=anchor_event.kind, actor=anchor_event.actor)
        phrase = ANCHOR_PHRASES[anchor_event.kind].format(anchor_event.actor.full_name)
        position = "last goal before" if q.direction is Direction.BEFORE else "first goal after"
        surface = {
            Target.ACTOR: f"Who scored the {position} {phrase}?",
            Target.TIME: f"When was the {position} {phrase}?",
            Target.DISTANCE: f"From what distance came the {position} {phrase}?",
        }[q.target]
        return QuestionSpec(
            family=q.family,
            target=q.target,
            surface=surface,
            direction=q.direction,
            anchor=descriptor,
        )
    first, second = (events[i] for i in q.pair_slots)
    pair = (
        EventDescriptor(kind=GOAL, actor=first.actor),
        EventDescriptor(kind=GOAL, actor=second.actor),
    )
    verb = "scored" if q.target is Target.ACTOR else "assisted"
    surface = (
        f"Who {verb} the {q.compare.value} goal, "
        f"{first.actor.full_name} or {second.actor.full_name}?"
    )
    return QuestionSpec(
        family=q.family, target=q.target, surface=surface, compare=q.compare, pair=pair
    )


class _UniquenessPool:
    """Tracks used (kind sequence, family) keys and samples unused ones."""

    def __init__(self, n_events: int):
        self.n_events = n_events
        self.used: set[tuple[tuple[str, ...], str]] = set()
        self._universe: dict[str, list[tuple[str, ...]]] = {}

    def claim(self, plan: ContentPlan) -> bool:
        key = plan.uniqueness_key
        if key in self.used:
            return False
        self.used.add(key)
        return True

    def sample(self, family: QuestionFamily, rng: random.Random) -> tuple[str, ...] | None:
        for _ in range(DEFAULT_RETRIES):
            seq = sample_kind_seq(family, self.n_events, rng)
            if (seq, family.value) not in self.used:
                return seq
        remaining = [
            seq for seq in self._family_universe(family) if (seq, family.value) not in self.used
        ]
        if not remaining:
            return None
        return rng.choice(remaining)

    def _family_universe(self, family: QuestionFamily) -> list[tuple[str, ...]]:
        if family.value not in self._universe:
            self._universe[family.value] = sorted(
                seq
                for seq in itertools.product((GOAL,) + OTHER_KINDS, repeat=self.n_events)
                if in_universe(seq) and family_feasible(seq, family)
            )
        return self._universe[family.value]


def unique_type_orders(
    plans: Sequence[ContentPlan], rng: random.Random, max_sam: int = 3
) -> list[ContentPlan]:
    """Enforce unique (event kind order, question family) pairs across a batch.

    Colliding plans are rebuilt on a fresh unused kind sequence, keeping
    their family while it has capacity and reallocating to another family
    otherwise. Raises CapacityExceeded when the whole universe is spent.
    """
    if not plans:
        return []
    n_events = len(plans[0].slots)
    pool = _UniquenessPool(n_events)
    result = []
    for plan in plans:
        if len(plan.slots) != n_events:
            raise UnsatisfiablePlan("all plans in a batch must share the event count")
        if pool.claim(plan):
            result.append(plan)
            continue
        families = [plan.question.family] + [
            f for f in QuestionFamily if f is not plan.question.family
        ]
        rebuilt = None
        for family in families:
            seq = pool.sample(family, rng)
            if seq is None:
                continue
            n_sam = min(len(plan.modified_slots), max_sam, max_sam_bound(seq, family))
            rebuilt = build_plan(family, n_events, max(1, n_sam), rng, kind_seq=seq)
            break
        if rebuilt is None or not pool.claim(rebuilt):
            raise CapacityExceeded(len(plans), capacity(n_events))
        result.append(rebuilt)
    return result


def meaningful(plan: ContentPlan, events: Sequence[Event]) -> bool:
    """True iff excluding the modified events changes the answer."""
    question = bind_question(plan, events)
    try:
        return oracle_answer(question, events, False) != oracle_answer(question, events, True)
    except NoQualifyingEvent:
        return False
