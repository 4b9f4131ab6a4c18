"""Word-level sentence and report records produced by realisation.

Sentences are kept as word lists so that later insertion and deletion can
recompute every character span exactly. Rendering joins words with single
spaces; a word starting with closing punctuation attaches to the previous
word without a space.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .types import SamEntry, VerbLexeme

_ATTACH = (",", ".", ";", ":", "!", "?")

ATTRS = ("actor", "coactor", "distance", "time")


def render_words(words: list[str] | tuple[str, ...]) -> tuple[str, list[tuple[int, int]]]:
    """Join words into text, returning each word's character span."""
    text = []
    spans = []
    pos = 0
    for i, word in enumerate(words):
        if i > 0 and not word.startswith(_ATTACH):
            text.append(" ")
            pos += 1
        text.append(word)
        spans.append((pos, pos + len(word)))
        pos += len(word)
    return "".join(text), spans


@dataclass(frozen=True)
class RealisedSentence:
    """One event's sentence with word-index spans for its attributes."""

    event_id: int
    template_id: str
    words: tuple[str, ...]
    attr_words: dict[str, tuple[int, int]]
    connective: str
    verb_word_idx: int | None = None
    verb: VerbLexeme | None = None
    sam_entry: SamEntry | None = None

    def text(self) -> str:
        return render_words(self.words)[0]

    def with_insertion(self, entry: SamEntry) -> "RealisedSentence":
        """Insert the expression at the anchor and inflect the verb."""
        if self.verb_word_idx is None or self.verb is None:
            raise ValueError(f"sentence for event {self.event_id} has no insertion anchor")
        v = self.verb_word_idx
        inserted = entry.surface.split() + self.verb.inflect(entry.verb_form)
        new_words = self.words[:v] + tuple(inserted) + self.words[v + 1:]
        delta = len(inserted) - 1
        shifted = {
            attr: (i + delta, j + delta) if i >= v else (i, j)
            for attr, (i, j) in self.attr_words.items()
        }
        return replace(
            self,
            words=new_words,
            attr_words=shifted,
            verb_word_idx=v + len(inserted) - 1,
            sam_entry=entry,
        )


@dataclass(frozen=True)
class ReportText:
    """Rendered passage with character spans for sentences and attributes."""

    text: str
    sentence_spans: tuple[tuple[int, int], ...]
    attr_spans: dict[int, dict[str, tuple[int, int]]]

    def attr_text(self, event_id: int, attr: str) -> str:
        start, end = self.attr_spans[event_id][attr]
        return self.text[start:end]


@dataclass(frozen=True)
class RealisedReport:
    sentences: tuple[RealisedSentence, ...]

    def render(self) -> ReportText:
        parts: list[str] = []
        sentence_spans = []
        attr_spans: dict[int, dict[str, tuple[int, int]]] = {}
        base = 0
        for i, sentence in enumerate(self.sentences):
            if i > 0:
                parts.append(" ")
                base += 1
            text, word_spans = render_words(sentence.words)
            sentence_spans.append((base, base + len(text)))
            spans = {}
            for attr, (wi, wj) in sentence.attr_words.items():
                spans[attr] = (base + word_spans[wi][0], base + word_spans[wj - 1][1])
            attr_spans[sentence.event_id] = spans
            parts.append(text)
            base += len(text)
        return ReportText("".join(parts), tuple(sentence_spans), attr_spans)
