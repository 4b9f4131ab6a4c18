"""Domain types shared across the generation and evaluation pipeline.

All types are immutable after construction and safe to share between
threads or worker processes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


GOAL = "goal"
OTHER_KINDS = ("foul", "clearance", "save", "corner", "substitution", "injury")
EVENT_KINDS = (GOAL,) + OTHER_KINDS

MIN_DISTANCE, MAX_DISTANCE = 5, 50
MIN_TIME, MAX_TIME = 1, 90


class SamCategory(enum.Enum):
    """The six insertion categories, keyed by their short labels."""

    MODAL_NEGATION = "I1"
    ADVERBIAL_MODIFICATION = "I2"
    IMPLICIT_NEGATION = "I3"
    EXPLICIT_NEGATION = "I4"
    POLARITY_REVERSING = "I5"
    NEGATED_POLARITY_PRESERVING = "I6"

    @classmethod
    def from_label(cls, label: str) -> "SamCategory":
        return cls(label)


@dataclass(frozen=True)
class PlayerRef:
    """A player slot in a report roster, with the resolved surface name."""

    index: int
    given: str
    family: str

    @property
    def full_name(self) -> str:
        return f"{self.given} {self.family}"


@dataclass(frozen=True)
class Event:
    """One match event; realised as exactly one report sentence.

    Goal events always carry ``distance`` (metres) and every event carries
    ``time`` (match minute). Within a report, goal distances are pairwise
    distinct and times increase strictly with ``id``, so extremum and
    ordering questions have a unique answer.
    """

    id: int
    kind: str
    actor: PlayerRef
    time: int
    coactor: PlayerRef | None = None
    distance: int | None = None
    modified: bool = False
    sam: tuple[SamCategory, ...] = ()

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.is_goal and self.distance is None:
            raise ValueError("goal events must carry a distance")
        if self.distance is not None and not MIN_DISTANCE <= self.distance <= MAX_DISTANCE:
            raise ValueError(f"distance {self.distance} outside [{MIN_DISTANCE}, {MAX_DISTANCE}]")
        if not MIN_TIME <= self.time <= MAX_TIME:
            raise ValueError(f"time {self.time} outside [{MIN_TIME}, {MAX_TIME}]")
        if self.modified != bool(self.sam):
            raise ValueError("modified events carry categories, unmodified carry none")

    @property
    def is_goal(self) -> bool:
        return self.kind == GOAL


class QuestionFamily(enum.Enum):
    ORDER = "order"
    ARGSELECT = "argselect"
    BRIDGE = "bridge"
    COMPARE = "compare"


class Target(enum.Enum):
    ACTOR = "actor"
    COACTOR = "coactor"
    TIME = "time"
    DISTANCE = "distance"


class OrderAttr(enum.Enum):
    POSITION = "position"
    TIME = "time"


class Agg(enum.Enum):
    MAX = "max"
    MIN = "min"


class NumAttr(enum.Enum):
    DISTANCE = "distance"
    TIME = "time"


class Direction(enum.Enum):
    BEFORE = "before"
    AFTER = "after"


class CompareAgg(enum.Enum):
    EARLIER = "earlier"
    LATER = "later"
    FARTHER = "farther"
    CLOSER = "closer"


@dataclass(frozen=True)
class EventDescriptor:
    """Identifies one event by kind and acting player (unique per report)."""

    kind: str
    actor: PlayerRef


@dataclass(frozen=True)
class QuestionSpec:
    """A typed question over a report, with its realised surface text.

    Exactly the fields of the question's family are set:

    * ORDER uses ``attr``, ``rank`` (negative counts from the end) and picks
      among goals sorted by report position or match minute;
    * ARGSELECT uses ``agg``/``over`` and picks the extremum goal;
    * BRIDGE uses ``direction``/``anchor`` and picks the goal nearest to the
      anchor event on the given side;
    * COMPARE uses ``compare``/``pair`` and picks between the two described
      goals.

    ``target`` names the attribute of the selected event that forms the
    answer; the answer type is a player name for ACTOR/COACTOR and a
    number-plus-unit string for TIME/DISTANCE.
    """

    family: QuestionFamily
    target: Target
    surface: str
    attr: OrderAttr | None = None
    rank: int | None = None
    agg: Agg | None = None
    over: NumAttr | None = None
    direction: Direction | None = None
    anchor: EventDescriptor | None = None
    compare: CompareAgg | None = None
    pair: tuple[EventDescriptor, EventDescriptor] | None = None


@dataclass(frozen=True)
class MRCInstance:
    """One extractive question-answering instance."""

    id: str
    question: str
    context: str
    answer: str
    answer_start: int

    def __post_init__(self):
        found = self.context[self.answer_start:self.answer_start + len(self.answer)]
        if found != self.answer:
            raise ValueError(
                f"answer span mismatch in {self.id}: expected {self.answer!r}, found {found!r}"
            )


@dataclass(frozen=True)
class TripleMeta:
    """Generation record for one aligned triple; the oracle's replay input."""

    serial: int
    question_type: str
    sam_categories: tuple[SamCategory, ...]
    n_sam: int
    modified_sentences: tuple[int, ...]
    template_ids: tuple[str, ...]
    question: QuestionSpec
    events: tuple[Event, ...] = field(repr=False)


@dataclass(frozen=True)
class AlignedTriple:
    """Baseline, intervention and control instances sharing one question."""

    baseline: MRCInstance
    intervention: MRCInstance
    control: MRCInstance
    meta: TripleMeta

    def __post_init__(self):
        if not (self.baseline.question == self.intervention.question == self.control.question):
            raise ValueError("aligned instances must share the question")
        if self.intervention.answer == self.baseline.answer:
            raise ValueError("modification must change the answer")
        if self.intervention.answer != self.control.answer:
            raise ValueError("intervention and control must share the answer")

    @property
    def instances(self) -> tuple[MRCInstance, MRCInstance, MRCInstance]:
        return (self.baseline, self.intervention, self.control)


class VerbForm(enum.Enum):
    """Inflection an insertion imposes on the verb it precedes."""

    BARE = "bare"
    PAST = "past"
    GERUND = "gerund"
    TO_INF = "to_inf"


@dataclass(frozen=True)
class VerbLexeme:
    """A goal verb with its explicit inflections and optional particle."""

    base: str
    past: str
    gerund: str
    particle: str | None = None

    def __post_init__(self):
        if not (self.base and self.past and self.gerund):
            raise ValueError("verb forms must be non-empty")

    def inflect(self, form: VerbForm) -> list[str]:
        """Head words for the requested form; the particle stays separate."""
        if form is VerbForm.PAST:
            return [self.past]
        if form is VerbForm.BARE:
            return [self.base]
        if form is VerbForm.GERUND:
            return [self.gerund]
        return ["to", self.base]


@dataclass(frozen=True)
class SamEntry:
    """One insertion expression and the verb form it governs."""

    category: SamCategory
    surface: str
    verb_form: VerbForm

    def __post_init__(self):
        if not 1 <= len(self.surface.split()) <= 4:
            raise ValueError(f"surface {self.surface!r} must be 1-4 words")


def format_distance(metres: int) -> str:
    return f"{metres} metres"


def ordinal(n: int) -> str:
    if 10 <= n % 100 <= 20:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return f"{n}{suffix}"


def format_time(minute: int) -> str:
    return f"{ordinal(minute)} minute"
