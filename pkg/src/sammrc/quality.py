"""Data-quality diagnostics: lexical similarity, a naturality proxy, and
insertion-expression corpus scanning.

Naturality is an openly labelled proxy built from two adjacent-sentence
cohesion indices (content-word lemma overlap and argument overlap); a
pronoun-antecedent index is reported alongside. It is not expected to match
any externally published cohesion figure.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import TooShort
from .textutil import find_token_seq, split_sentences, word_tokens
from .types import SamEntry

STOPWORDS = frozenset(
    """a an the and or of in on at to from for with as by was were is are it its
    this that then there when who she her had have his he they them out up down
    into over after before during while""".split()
)

PRONOUNS = frozenset({"she", "her", "hers"})

NATURALITY_INDICES = ("content_overlap", "argument_overlap")


def _lemma(token: str) -> str:
    t = token.lower()
    for suffix in ("ies", "es", "s"):
        if t.endswith(suffix) and len(t) - len(suffix) >= 3:
            return t[: len(t) - len(suffix)] + ("y" if suffix == "ies" else "")
    return t


def _content_lemmas(tokens: Sequence[str]) -> set[str]:
    return {_lemma(t) for t in tokens if t.lower() not in STOPWORDS and t.isalpha()}


def _names(tokens: Sequence[str]) -> set[str]:
    return {t for i, t in enumerate(tokens) if i > 0 and t[:1].isupper() and t.isalpha()}


def jaccard(tokens_a: set[str], tokens_b: set[str]) -> float:
    if not tokens_a and not tokens_b:
        return 1.0
    union = tokens_a | tokens_b
    return len(tokens_a & tokens_b) / len(union)


def lexical_similarity(paragraphs: Sequence[str], sample_pairs: int = 200, seed: int = 0) -> float:
    """Mean Jaccard word overlap over sampled unordered paragraph pairs."""
    if len(paragraphs) < 2:
        raise ValueError("need at least two paragraphs")
    token_sets = [set(w.lower() for w in word_tokens(p)) for p in paragraphs]
    rng = random.Random(seed)
    total = 0.0
    for _ in range(sample_pairs):
        i, j = rng.sample(range(len(token_sets)), 2)
        total += jaccard(token_sets[i], token_sets[j])
    return total / sample_pairs


@dataclass(frozen=True)
class NaturalityResult:
    score: float
    indices: dict[str, float] = field(default_factory=dict)


def naturality(paragraphs: Sequence[str]) -> NaturalityResult:
    """Mean of adjacent-sentence cohesion indices over the paragraphs."""
    content_scores, argument_scores, pronoun_scores = [], [], []
    for paragraph in paragraphs:
        sentences = split_sentences(paragraph)
        if len(sentences) < 2:
            raise TooShort("naturality needs paragraphs of at least two sentences")
        tokenised = [word_tokens(s) for s in sentences]
        content, argument = [], []
        for prev, cur in zip(tokenised, tokenised[1:]):
            content.append(jaccard(_content_lemmas(prev), _content_lemmas(cur)))
            argument.append(_argument_overlap(prev, cur))
        content_scores.append(sum(content) / len(content))
        argument_scores.append(sum(argument) / len(argument))
        pronoun_scores.append(_pronoun_antecedent(tokenised))
    indices = {
        "content_overlap": sum(content_scores) / len(content_scores),
        "argument_overlap": sum(argument_scores) / len(argument_scores),
        "pronoun_antecedent": sum(pronoun_scores) / len(pronoun_scores),
    }
    score = sum(indices[name] for name in NATURALITY_INDICES) / len(NATURALITY_INDICES)
    return NaturalityResult(score=score, indices=indices)


def _argument_overlap(prev: list[str], cur: list[str]) -> float:
    """1.0 when adjacent sentences share an argument: a name, a shared
    noun-like lemma, or a pronoun with a person available before it."""
    names_prev, names_cur = _names(prev), _names(cur)
    if names_prev & names_cur:
        return 1.0
    nouns_prev = _content_lemmas(prev) - {w.lower() for w in names_prev}
    nouns_cur = _content_lemmas(cur) - {w.lower() for w in names_cur}
    if nouns_prev & nouns_cur:
        return 1.0
    if any(t.lower() in PRONOUNS for t in cur) and names_prev:
        return 1.0
    return 0.0


def _pronoun_antecedent(tokenised: list[list[str]]) -> float:
    """Fraction of pronouns with a person name somewhere before them."""
    pronouns = 0
    anchored = 0
    seen_name = False
    for sentence in tokenised:
        for i, token in enumerate(sentence):
            if token.lower() in PRONOUNS:
                pronouns += 1
                if seen_name or _names(sentence[:i]):
                    anchored += 1
            if i > 0 and token[:1].isupper() and token.isalpha():
                seen_name = True
    return anchored / pronouns if pronouns else 1.0


@dataclass(frozen=True)
class ScanResult:
    """Fractions of passages containing an insertion expression at all, and
    within ``window`` characters of an expected answer."""

    frac_any: float
    frac_near: float
    n_passages: int


def scan_corpus(
    passages: Sequence[str],
    entries: Sequence[SamEntry],
    answers: Sequence[Sequence[tuple[int, int]]] | None = None,
    window: int = 100,
) -> ScanResult:
    """Count passages carrying any lexicon expression, optionally near answers."""
    if window < 0:
        raise ValueError("window must be non-negative")
    surfaces = [e.surface.split() for e in entries]
    n_any = n_near = 0
    for idx, passage in enumerate(passages):
        spans = _expression_spans(passage, surfaces)
        if not spans:
            continue
        n_any += 1
        if answers is None:
            continue
        for a_start, a_end in answers[idx]:
            if any(_gap(span, (a_start, a_end)) <= window for span in spans):
                n_near += 1
                break
    n = len(passages)
    return ScanResult(
        frac_any=n_any / n if n else 0.0,
        frac_near=n_near / n if n else 0.0,
        n_passages=n,
    )


def _expression_spans(passage: str, surfaces: list[list[str]]) -> list[tuple[int, int]]:
    raw_tokens = passage.split()
    stripped = [t.strip(".,;:!?\"'()[]") for t in raw_tokens]
    offsets = []
    pos = 0
    for tok in raw_tokens:
        start = passage.index(tok, pos)
        offsets.append((start, start + len(tok)))
        pos = start + len(tok)
    spans = []
    for surface in surfaces:
        for i in find_token_seq(stripped, surface):
            spans.append((offsets[i][0], offsets[i + len(surface) - 1][1]))
    return spans


def _gap(a: tuple[int, int], b: tuple[int, int]) -> int:
    if a[1] <= b[0]:
        return b[0] - a[1]
    if b[1] <= a[0]:
        return a[0] - b[1]
    return 0


@dataclass(frozen=True)
class QualityReport:
    lexical_similarity: float
    naturality: float
    n: int
    indices: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.lexical_similarity <= 1:
            raise ValueError("similarity must lie in [0, 1]")
        if not 0 <= self.naturality <= 1:
            raise ValueError("naturality must lie in [0, 1]")


def quality_report(paragraphs: Sequence[str], sample_pairs: int = 200, seed: int = 0) -> QualityReport:
    similarity = lexical_similarity(paragraphs, sample_pairs=sample_pairs, seed=seed)
    nat = naturality(paragraphs)
    return QualityReport(
        lexical_similarity=similarity,
        naturality=nat.score,
        n=len(paragraphs),
        indices=nat.indices,
    )
