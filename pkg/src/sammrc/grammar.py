"""Seed templates and the generative grammar behind sentence realisation.

File format (line-oriented, UTF-8, ``#`` comments):

    SPLIT train|eval                     assigns following templates to a split
    TEMPLATE <id> <kinds>: <tokens>      one seed template
    RULE <NonTerminal> -> <alternative>  one expansion alternative per line

Template and rule tokens:

    %Con         context-sensitive connective (Con.First / Con.Later)
    #Actor       actor full name            #Coactor   coactor full name
    ~She         pronoun, antecedent must precede it in the sentence
    @SAM         insertion anchor, directly before the verb slot
    $V.<Frame>   verb slot filled from the verb lexicon
    $<Name>      grammar nonterminal        {dist} {time} {actor} {coactor}
    anything else is a literal token; "," and "." attach to the previous word.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DepthExceeded, MissingExpansion
from .resources import GRAMMAR_FILE, TEMPLATE_FILE, data_path

CONNECTIVE_SLOT = "%Con"
ACTOR_SLOT = "#Actor"
COACTOR_SLOT = "#Coactor"
SHE_SLOT = "~She"
SAM_ANCHOR = "@SAM"
PLACEHOLDERS = ("{dist}", "{time}", "{actor}", "{coactor}")

MAX_DEPTH = 16


@dataclass(frozen=True)
class Template:
    """A seed sentence skeleton for one or more event kinds."""

    id: str
    kinds: tuple[str, ...]
    tokens: tuple[str, ...]
    split: str

    @property
    def has_sam_anchor(self) -> bool:
        return SAM_ANCHOR in self.tokens

    def verb_frame(self) -> str | None:
        for tok in self.tokens:
            if tok.startswith("$V."):
                return tok[3:]
        return None


@dataclass
class Grammar:
    """Production rules: nonterminal name -> list of token-tuple alternatives."""

    rules: dict[str, list[tuple[str, ...]]] = field(default_factory=dict)

    def alternatives(self, name: str) -> list[tuple[str, ...]]:
        try:
            return self.rules[name]
        except KeyError:
            raise MissingExpansion(f"no rule for nonterminal {name!r}") from None

    def expand(self, name: str, rng: random.Random, fill, depth: int = 0) -> list[str]:
        """Expand a nonterminal to a flat word list.

        ``fill`` maps a placeholder token to its word list (or raises).
        """
        if depth > MAX_DEPTH:
            raise DepthExceeded(f"expansion of {name!r} exceeded depth {MAX_DEPTH}")
        alt = rng.choice(self.alternatives(name))
        words: list[str] = []
        for tok in alt:
            if tok.startswith("$"):
                words.extend(self.expand(tok[1:], rng, fill, depth + 1))
            elif tok in PLACEHOLDERS:
                words.extend(fill(tok))
            else:
                words.append(tok)
        return words

    def count(self, name: str, _stack: tuple[str, ...] = ()) -> int:
        """Number of derivations of a nonterminal (placeholders count as 1)."""
        if name in _stack or len(_stack) > MAX_DEPTH:
            raise DepthExceeded(f"cycle through nonterminal {name!r}")
        total = 0
        for alt in self.alternatives(name):
            n = 1
            for tok in alt:
                if tok.startswith("$"):
                    n *= self.count(tok[1:], _stack + (name,))
            total += n
        return total


@dataclass(frozen=True)
class TemplateSet:
    templates: tuple[Template, ...]

    def for_split(self, split: str) -> "TemplateSet":
        if split == "full":
            return self
        return TemplateSet(tuple(t for t in self.templates if t.split == split))

    def applicable(self, kind: str) -> list[Template]:
        return [t for t in self.templates if kind in t.kinds]

    def by_id(self, template_id: str) -> Template:
        for t in self.templates:
            if t.id == template_id:
                return t
        raise KeyError(template_id)


def parse_lines(lines, source: str = "<memory>") -> tuple[list[Template], Grammar]:
    """Parse TEMPLATE/RULE/SPLIT lines; either section may be absent."""
    templates: list[Template] = []
    grammar = Grammar()
    split = "train"
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("SPLIT "):
            split = line.split(None, 1)[1].strip()
            if split not in ("train", "eval"):
                raise ValueError(f"{source}:{lineno}: unknown split {split!r}")
        elif line.startswith("TEMPLATE "):
            head, _, body = line.partition(":")
            parts = head.split()
            if len(parts) != 3 or not body.strip():
                raise ValueError(f"{source}:{lineno}: malformed TEMPLATE line")
            _, tid, kinds = parts
            templates.append(
                Template(
                    id=tid,
                    kinds=tuple(kinds.split(",")),
                    tokens=tuple(body.split()),
                    split=split,
                )
            )
        elif line.startswith("RULE "):
            head, arrow, rhs = line[5:].partition("->")
            if not arrow:
                raise ValueError(f"{source}:{lineno}: RULE line lacks '->'")
            grammar.rules.setdefault(head.strip(), []).append(tuple(rhs.split()))
        else:
            raise ValueError(f"{source}:{lineno}: unrecognised line {line!r}")
    return templates, grammar


def load_templates_and_grammar(
    template_path: Path | None = None, grammar_path: Path | None = None
) -> tuple[TemplateSet, Grammar]:
    template_path = template_path or data_path(TEMPLATE_FILE)
    grammar_path = grammar_path or data_path(GRAMMAR_FILE)
    templates: list[Template] = []
    grammar = Grammar()
    for path in (template_path, grammar_path):
        with open(path, encoding="utf-8") as fh:
            ts, gr = parse_lines(fh, source=str(path))
        templates.extend(ts)
        for name, alts in gr.rules.items():
            grammar.rules.setdefault(name, []).extend(alts)
    tset = TemplateSet(tuple(templates))
    validate(tset, grammar)
    return tset, grammar


def validate(templates: TemplateSet, grammar: Grammar) -> None:
    """Check structural invariants of the shipped templates and grammar."""
    from .samlex import load_verbs  # deferred: samlex imports this module's types

    verbs = load_verbs()
    for t in templates.templates:
        is_goal = "goal" in t.kinds
        n_anchor = sum(1 for tok in t.tokens if tok == SAM_ANCHOR)
        n_verb = sum(1 for tok in t.tokens if tok.startswith("$V."))
        if is_goal:
            if n_anchor != 1 or n_verb != 1:
                raise ValueError(f"goal template {t.id} needs exactly one @SAM and one $V slot")
            anchor_at = t.tokens.index(SAM_ANCHOR)
            if not t.tokens[anchor_at + 1].startswith("$V."):
                raise ValueError(f"template {t.id}: @SAM must directly precede the verb slot")
            if t.verb_frame() not in verbs:
                raise ValueError(f"template {t.id}: unknown verb frame {t.verb_frame()!r}")
        elif n_anchor or n_verb:
            raise ValueError(f"non-goal template {t.id} must not carry @SAM or $V slots")
        if SHE_SLOT in t.tokens and t.tokens.index(SHE_SLOT) < t.tokens.index(ACTOR_SLOT):
            raise ValueError(f"template {t.id}: pronoun precedes its antecedent")
        for tok in t.tokens:
            if tok.startswith("$") and not tok.startswith("$V."):
                grammar.count(tok[1:])  # raises MissingExpansion / DepthExceeded
    if CONNECTIVE_SLOT in {tok for t in templates.templates for tok in t.tokens}:
        grammar.alternatives("Con.First")
        grammar.alternatives("Con.Later")


def count_realisations(template: Template, grammar: Grammar, verb_counts: dict[str, int]) -> int:
    """Number of distinct derivations of a template.

    Context-sensitive connectives contribute their maximum branching over
    contexts; names and numbers are event attributes, not lexical choices,
    and count as 1.
    """
    n = 1
    for tok in template.tokens:
        if tok == CONNECTIVE_SLOT:
            n *= max(len(grammar.alternatives("Con.First")), len(grammar.alternatives("Con.Later")))
        elif tok.startswith("$V."):
            frame = tok[3:]
            if frame not in verb_counts:
                raise MissingExpansion(f"no verbs for frame {frame!r}")
            n *= verb_counts[frame]
        elif tok.startswith("$"):
            n *= grammar.count(tok[1:])
    return n
