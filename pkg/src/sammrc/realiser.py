"""Turns structured events into sentences via templates and the grammar.

Each event becomes exactly one sentence. Realisation is pure given the rng;
the grammar and templates are read-only after load. Baseline sentences never
contain an insertion: the anchor expands to nothing and the verb takes its
past form. Coactor clauses render empty when the event has no coactor.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import DepthExceeded, MissingExpansion, NoApplicableTemplate
from .grammar import (
    ACTOR_SLOT,
    COACTOR_SLOT,
    CONNECTIVE_SLOT,
    MAX_DEPTH,
    SAM_ANCHOR,
    SHE_SLOT,
    Grammar,
    Template,
    TemplateSet,
)
from .sentences import RealisedReport, RealisedSentence
from .types import Event, VerbLexeme, format_distance, format_time


@dataclass(frozen=True)
class RealisationContext:
    """Cross-sentence state read by context-sensitive substitutions."""

    position: int = 0
    mentioned: frozenset[str] = frozenset()
    prev_connective: str | None = None


class _NoCoactor(Exception):
    """Internal: abort a clause expansion that needs an absent coactor."""


def realise_sentence(
    event: Event,
    template: Template,
    grammar: Grammar,
    verbs: dict[str, list[VerbLexeme]],
    ctx: RealisationContext,
    rng: random.Random,
) -> RealisedSentence:
    if event.kind not in template.kinds:
        raise NoApplicableTemplate(f"template {template.id} does not accept {event.kind!r}")
    words: list[str] = []
    attr_words: dict[str, tuple[int, int]] = {}
    connective = ""
    verb_word_idx: int | None = None
    verb: VerbLexeme | None = None

    def mark(attr: str, attr_tokens: list[str]):
        if attr in attr_words:
            raise ValueError(f"template {template.id} surfaces {attr} twice")
        attr_words[attr] = (len(words), len(words) + len(attr_tokens))
        words.extend(attr_tokens)

    for tok in template.tokens:
        if tok == CONNECTIVE_SLOT:
            rule = "Con.First" if ctx.position == 0 else "Con.Later"
            options = [" ".join(alt) for alt in grammar.alternatives(rule)]
            fresh = [o for o in options if o != ctx.prev_connective] or options
            connective = rng.choice(fresh)
            words.extend(connective.split())
        elif tok == ACTOR_SLOT:
            mark("actor", [event.actor.given, event.actor.family])
        elif tok == COACTOR_SLOT:
            if event.coactor is None:
                raise ValueError(f"template {template.id} requires a coactor")
            mark("coactor", [event.coactor.given, event.coactor.family])
        elif tok == SHE_SLOT:
            if "actor" not in attr_words:
                raise ValueError(f"template {template.id}: pronoun before its antecedent")
            words.append("she")
        elif tok == SAM_ANCHOR:
            continue  # anchor position == the verb slot that follows
        elif tok.startswith("$V."):
            frame = tok[3:]
            if frame not in verbs:
                raise MissingExpansion(f"no verbs for frame {frame!r}")
            verb = rng.choice(verbs[frame])
            verb_word_idx = len(words)
            words.append(verb.past)
            if verb.particle:
                words.append(verb.particle)
        elif tok.startswith("$"):
            try:
                buf, marks = _expand(grammar, tok[1:], rng, event)
            except _NoCoactor:
                continue
            base = len(words)
            for attr, i, j in marks:
                if attr in attr_words:
                    raise ValueError(f"template {template.id} surfaces {attr} twice")
                attr_words[attr] = (base + i, base + j)
            words.extend(buf)
        else:
            words.append(tok)

    _check_coverage(event, template, attr_words)
    return RealisedSentence(
        event_id=event.id,
        template_id=template.id,
        words=tuple(words),
        attr_words=attr_words,
        connective=connective,
        verb_word_idx=verb_word_idx,
        verb=verb,
    )


def realise_report(
    events: Sequence[Event],
    templates: TemplateSet,
    grammar: Grammar,
    verbs: dict[str, list[VerbLexeme]],
    rng: random.Random,
) -> RealisedReport:
    sentences = []
    mentioned: set[str] = set()
    prev_connective: str | None = None
    for position, event in enumerate(events):
        pool = templates.applicable(event.kind)
        if not pool:
            raise NoApplicableTemplate(f"no template for event kind {event.kind!r}")
        template = rng.choice(pool)
        ctx = RealisationContext(position, frozenset(mentioned), prev_connective)
        sentence = realise_sentence(event, template, grammar, verbs, ctx, rng)
        sentences.append(sentence)
        prev_connective = sentence.connective or prev_connective
        mentioned.add(event.actor.full_name)
        if event.coactor is not None:
            mentioned.add(event.coactor.full_name)
    return RealisedReport(tuple(sentences))


def _expand(grammar, name, rng, event, depth=0):
    """Expand a nonterminal into (words, attr marks), aborting on a missing coactor."""
    if depth > MAX_DEPTH:
        raise DepthExceeded(f"expansion of {name!r} exceeded depth {MAX_DEPTH}")
    alternative = rng.choice(grammar.alternatives(name))
    buf: list[str] = []
    marks: list[tuple[str, int, int]] = []
    for tok in alternative:
        if tok.startswith("$"):
            sub_buf, sub_marks = _expand(grammar, tok[1:], rng, event, depth + 1)
            marks.extend((a, len(buf) + i, len(buf) + j) for a, i, j in sub_marks)
            buf.extend(sub_buf)
        elif tok == "{dist}":
            if event.distance is None:
                raise ValueError(f"event {event.id} has no distance to realise")
            dist = format_distance(event.distance).split()
            marks.append(("distance", len(buf), len(buf) + len(dist)))
            buf.extend(dist)
        elif tok == "{time}":
            time = format_time(event.time).split()
            marks.append(("time", len(buf), len(buf) + len(time)))
            buf.extend(time)
        elif tok == "{actor}":
            marks.append(("actor", len(buf), len(buf) + 2))
            buf.extend([event.actor.given, event.actor.family])
        elif tok == "{coactor}":
            if event.coactor is None:
                raise _NoCoactor
            marks.append(("coactor", len(buf), len(buf) + 2))
            buf.extend([event.coactor.given, event.coactor.family])
        else:
            buf.append(tok)
    return buf, marks


def _check_coverage(event, template, attr_words):
    # Goal attributes are answer candidates and must all be locatable;
    # non-goal events are context and may realise any subset.
    if not event.is_goal:
        return
    required = {"actor", "distance", "time"}
    if event.coactor is not None:
        required.add("coactor")
    missing = required - set(attr_words)
    if missing:
        raise ValueError(
            f"template {template.id} left attributes {sorted(missing)} unsurfaced for event {event.id}"
        )
