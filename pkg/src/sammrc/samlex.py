"""Insertion lexicon, verb lexicon, and the passage modification operations.

``make_intervention`` rewrites the sentences of the modified events by
inserting one lexicon expression each, directly before the verb phrase,
inflecting the verb to the form the entry governs. ``make_control`` removes
those sentences entirely. Both recompute all answer spans.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from pathlib import Path

from .errors import AllSentencesRemoved, VerbFormUnavailable
from .resources import SAM_LEXICON_FILE, VERB_FILE, data_path
from .sentences import RealisedReport
from .types import Event, SamCategory, SamEntry, VerbForm, VerbLexeme


def load_verbs(path: Path | None = None) -> dict[str, list[VerbLexeme]]:
    """Read ``VERB <frame> <base> <past> <gerund> [<particle>]`` lines."""
    path = path or data_path(VERB_FILE)
    frames: dict[str, list[VerbLexeme]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] != "VERB" or len(parts) not in (5, 6):
                raise ValueError(f"{path}:{lineno}: malformed VERB line")
            _, frame, base, past, gerund, *rest = parts
            frames.setdefault(frame, []).append(
                VerbLexeme(base=base, past=past, gerund=gerund, particle=rest[0] if rest else None)
            )
    return frames


class SamLexicon:
    """All insertion entries, indexed by category."""

    def __init__(self, entries: Sequence[SamEntry]):
        self.entries = tuple(entries)
        self.by_category: dict[SamCategory, tuple[SamEntry, ...]] = {}
        for cat in SamCategory:
            group = tuple(e for e in entries if e.category is cat)
            if not group:
                raise ValueError(f"lexicon lacks entries for category {cat.value}")
            self.by_category[cat] = group

    def surfaces(self) -> list[str]:
        return [e.surface for e in self.entries]


def load_sam_lexicon(path: Path | None = None) -> SamLexicon:
    """Read ``SAM <category> <verb_form> :: <surface>`` lines."""
    path = path or data_path(SAM_LEXICON_FILE)
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, sep, surface = line.partition("::")
            parts = head.split()
            if parts[0] != "SAM" or len(parts) != 3 or not sep or not surface.strip():
                raise ValueError(f"{path}:{lineno}: malformed SAM line")
            try:
                form = VerbForm(parts[2])
            except ValueError:
                raise VerbFormUnavailable(f"{path}:{lineno}: unknown verb form {parts[2]!r}") from None
            entries.append(
                SamEntry(category=SamCategory.from_label(parts[1]), surface=surface.strip(), verb_form=form)
            )
    return SamLexicon(entries)


def insert_sam(pre: str, verb: VerbLexeme, post: str, entry: SamEntry) -> str:
    """Insert the entry between the pre-verb text and the verb phrase.

    The verb is inflected to the entry's form; its particle stays adjacent.
    """
    words = entry.surface.split() + verb.inflect(entry.verb_form)
    if verb.particle:
        words.append(verb.particle)
    return " ".join(p for p in [pre.strip(), " ".join(words), post.strip()] if p)


def make_intervention(
    report: RealisedReport, events: Sequence[Event], entries: Mapping[int, SamEntry]
) -> RealisedReport:
    """Rewrite the modified events' sentences; all other sentences unchanged."""
    modified_ids = [e.id for e in events if e.modified]
    if not modified_ids:
        raise ValueError("no modified events: an intervention would equal the baseline")
    if set(entries) != set(modified_ids):
        raise ValueError(f"need one entry per modified event {modified_ids}, got {sorted(entries)}")
    if not 1 <= len(entries) <= 3:
        raise ValueError("interventions carry between one and three insertions")
    sentences = tuple(
        s.with_insertion(entries[s.event_id]) if s.event_id in entries else s
        for s in report.sentences
    )
    return RealisedReport(sentences)


def make_control(report: RealisedReport, modified_ids: Sequence[int]) -> RealisedReport:
    """Delete the modified sentences, keeping the rest in order."""
    drop = set(modified_ids)
    unknown = drop - {s.event_id for s in report.sentences}
    if unknown:
        raise ValueError(f"no sentence for event ids {sorted(unknown)}")
    kept = tuple(s for s in report.sentences if s.event_id not in drop)
    if not kept:
        raise AllSentencesRemoved("deleting all modified sentences empties the passage")
    return RealisedReport(kept)
