"""Symbolic answer oracle: the gold answer for any (question, event list) pair.

``oracle_answer`` is a pure function. With ``honor_sam=True`` every modified
event is excluded before the question semantics apply, which is equivalent
to physically deleting those events and answering with ``honor_sam=False``.
"""

from __future__ import annotations

from collections.abc import Sequence

from .errors import NoQualifyingEvent
from .types import (
    Agg,
    CompareAgg,
    Direction,
    Event,
    EventDescriptor,
    NumAttr,
    QuestionFamily,
    QuestionSpec,
    Target,
    format_distance,
    format_time,
)


def oracle_select(question: QuestionSpec, events: Sequence[Event], honor_sam: bool) -> Event:
    """Return the event whose ``target`` attribute answers the question."""
    pool = [e for e in events if not (honor_sam and e.modified)]
    if not pool:
        raise NoQualifyingEvent("no events left after exclusion")
    goals = [e for e in pool if e.is_goal]

    if question.family is QuestionFamily.ORDER:
        # Times increase with report position, so both sort attributes
        # produce the same order; sort anyway to honour the declared key.
        ranked = sorted(goals, key=lambda e: e.time)
        rank = question.rank
        idx = rank if rank >= 0 else len(ranked) + rank
        if not 0 <= idx < len(ranked):
            raise NoQualifyingEvent(f"rank {rank} needs more than {len(ranked)} goals")
        selected = ranked[idx]
    elif question.family is QuestionFamily.ARGSELECT:
        if not goals:
            raise NoQualifyingEvent("no goal events to select from")
        key = _num_attr_key(question.over)
        selected = (max if question.agg is Agg.MAX else min)(goals, key=key)
    elif question.family is QuestionFamily.BRIDGE:
        anchors = [e for e in pool if _matches(e, question.anchor)]
        if len(anchors) != 1:
            raise NoQualifyingEvent(f"anchor matches {len(anchors)} events, need exactly 1")
        anchor = anchors[0]
        if question.direction is Direction.BEFORE:
            side = [e for e in goals if e.id < anchor.id]
            if not side:
                raise NoQualifyingEvent("no goal before the anchor")
            selected = side[-1]
        else:
            side = [e for e in goals if e.id > anchor.id]
            if not side:
                raise NoQualifyingEvent("no goal after the anchor")
            selected = side[0]
    elif question.family is QuestionFamily.COMPARE:
        matched = [e for e in goals if any(_matches(e, d) for d in question.pair)]
        if not matched:
            raise NoQualifyingEvent("neither compared event is present")
        if len(matched) == 1:
            selected = matched[0]
        else:
            agg = question.compare
            if agg is CompareAgg.EARLIER:
                selected = min(matched, key=lambda e: e.time)
            elif agg is CompareAgg.LATER:
                selected = max(matched, key=lambda e: e.time)
            elif agg is CompareAgg.FARTHER:
                selected = max(matched, key=lambda e: e.distance)
            else:
                selected = min(matched, key=lambda e: e.distance)
    else:
        raise NoQualifyingEvent(f"unknown question family {question.family}")

    if question.target is Target.COACTOR and selected.coactor is None:
        raise NoQualifyingEvent(f"event {selected.id} has no second participant")
    return selected


def answer_text(target: Target, event: Event) -> str:
    """Render the target attribute of an event as the gold answer string."""
    if target is Target.ACTOR:
        return event.actor.full_name
    if target is Target.COACTOR:
        if event.coactor is None:
            raise NoQualifyingEvent(f"event {event.id} has no second participant")
        return event.coactor.full_name
    if target is Target.TIME:
        return format_time(event.time)
    return format_distance(event.distance)


def oracle_answer(question: QuestionSpec, events: Sequence[Event], honor_sam: bool) -> str:
    """Answer the question over the events, excluding modified ones if asked."""
    return answer_text(question.target, oracle_select(question, events, honor_sam))


def _matches(event: Event, descriptor: EventDescriptor) -> bool:
    return event.kind == descriptor.kind and event.actor == descriptor.actor


def _num_attr_key(attr: NumAttr):
    if attr is NumAttr.DISTANCE:
        return lambda e: e.distance
    return lambda e: e.time
