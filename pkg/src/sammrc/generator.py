"""End-to-end challenge set generation and (de)serialization.

Output format: a SQuAD-v1.1-style ``challenge.json`` holding one article per
instance (ids ``<serial>-b|i|c``) and a ``meta.jsonl`` sidecar with one
record per triple carrying the structured question and raw event list, so
every gold answer can be re-derived independently by the oracle.

Determinism: every triple draws from rng streams derived from
(master seed, serial), so a set is byte-identical across reruns and across
``jobs`` settings; workers realise triples in any order and a single writer
assembles them by serial.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import random
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from .errors import ExhaustedRetries, SamError
from .grammar import Grammar, TemplateSet, load_templates_and_grammar
from .oracle import oracle_answer, oracle_select
from .planner import (
    ContentPlan,
    bind_question,
    build_plan,
    instantiate,
    load_names,
    max_sam_bound,
    roster_size_for,
    sample_kind_seq,
    sample_roster,
    unique_type_orders,
)
from .realiser import realise_report
from .samlex import SamLexicon, load_sam_lexicon, load_verbs, make_control, make_intervention
from .sentences import RealisedReport
from .textutil import has_digit, word_tokens
from .types import (
    AlignedTriple,
    Event,
    EventDescriptor,
    MRCInstance,
    PlayerRef,
    QuestionFamily,
    QuestionSpec,
    SamCategory,
    Target,
    TripleMeta,
    VerbLexeme,
)

CHALLENGE_FILE = "challenge.json"
META_FILE = "meta.jsonl"
VERSION = "sam-1.0"

_TARGET_ATTR = {
    Target.ACTOR: "actor",
    Target.COACTOR: "coactor",
    Target.TIME: "time",
    Target.DISTANCE: "distance",
}


@dataclass(frozen=True)
class GenerationConfig:
    seed: int
    size: int
    events: int = 6
    max_sam: int = 3
    split: str = "full"

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be at least 1")
        if self.events < 3:
            raise ValueError("reports need at least 3 events")
        if not 1 <= self.max_sam <= 3:
            raise ValueError("max_sam must be in [1, 3]")
        if self.split not in ("train", "eval", "full"):
            raise ValueError(f"unknown template split {self.split!r}")


@dataclass(frozen=True)
class Resources:
    templates: TemplateSet
    grammar: Grammar
    verbs: dict[str, list[VerbLexeme]]
    lexicon: SamLexicon
    names: tuple[tuple[str, ...], tuple[str, ...]]


_RESOURCE_CACHE: dict[tuple[str, str], Resources] = {}


def load_resources(split: str = "full") -> Resources:
    from .resources import data_dir

    key = (split, str(data_dir()))
    if key not in _RESOURCE_CACHE:
        templates, grammar = load_templates_and_grammar()
        _RESOURCE_CACHE[key] = Resources(
            templates=templates.for_split(split),
            grammar=grammar,
            verbs=load_verbs(),
            lexicon=load_sam_lexicon(),
            names=load_names(),
        )
    return _RESOURCE_CACHE[key]


def derive_seed(master: int, *parts) -> int:
    payload = "|".join([str(master), *map(str, parts)]).encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def plan_batch(config: GenerationConfig) -> list[ContentPlan]:
    """Sequential planning phase: one plan per serial, unique type orders."""
    families = list(QuestionFamily)
    plans = []
    for serial in range(1, config.size + 1):
        rng = random.Random(derive_seed(config.seed, "plan", serial))
        family = rng.choice(families)
        seq = sample_kind_seq(family, config.events, rng)
        n_sam = rng.randint(1, min(config.max_sam, max_sam_bound(seq, family)))
        plans.append(build_plan(family, config.events, n_sam, rng, kind_seq=seq))
    return unique_type_orders(
        plans, random.Random(derive_seed(config.seed, "uniq")), config.max_sam
    )


def build_triple(serial: int, plan: ContentPlan, config: GenerationConfig, res: Resources) -> AlignedTriple:
    rng = random.Random(derive_seed(config.seed, "real", serial))
    events = None
    for attempt in range(3):
        roster = sample_roster(res.names, rng, size=roster_size_for(len(plan.slots)))
        try:
            events = instantiate(plan, roster, rng)
            break
        except ExhaustedRetries:
            continue
    if events is None:
        raise ExhaustedRetries(f"triple {serial}: instantiation failed")

    question = bind_question(plan, events)
    answer_base = oracle_answer(question, events, honor_sam=False)
    answer_mod = oracle_answer(question, events, honor_sam=True)
    if answer_base == answer_mod:
        raise SamError(f"triple {serial}: modification does not change the answer")

    base_report = realise(events, res, rng)
    entries = {
        e.id: rng.choice(res.lexicon.by_category[e.sam[0]]) for e in events if e.modified
    }
    modified_ids = sorted(entries)
    interv_report = make_intervention(base_report, events, entries)
    control_report = make_control(interv_report, modified_ids)

    event_base = oracle_select(question, events, honor_sam=False)
    event_mod = oracle_select(question, events, honor_sam=True)
    attr = _TARGET_ATTR[question.target]

    base = _instance(f"{serial}-b", question, base_report, event_base.id, attr, answer_base)
    interv = _instance(f"{serial}-i", question, interv_report, event_mod.id, attr, answer_mod)
    control = _instance(f"{serial}-c", question, control_report, event_mod.id, attr, answer_mod)

    meta = TripleMeta(
        serial=serial,
        question_type=question.family.value,
        sam_categories=tuple(e.sam[0] for e in events if e.modified),
        n_sam=len(modified_ids),
        modified_sentences=tuple(modified_ids),
        template_ids=tuple(s.template_id for s in base_report.sentences),
        question=question,
        events=events,
    )
    return AlignedTriple(baseline=base, intervention=interv, control=control, meta=meta)


def realise(events: Sequence[Event], res: Resources, rng: random.Random) -> RealisedReport:
    return realise_report(events, res.templates, res.grammar, res.verbs, rng)


def _instance(instance_id, question, report, event_id, attr, answer) -> MRCInstance:
    rendered = report.render()
    start, end = rendered.attr_spans[event_id][attr]
    if rendered.text[start:end] != answer:
        raise SamError(
            f"{instance_id}: span {rendered.text[start:end]!r} != answer {answer!r}"
        )
    return MRCInstance(
        id=instance_id,
        question=question.surface,
        context=rendered.text,
        answer=answer,
        answer_start=start,
    )


_WORKER_STATE: dict = {}


def _worker_init(config: GenerationConfig):
    _WORKER_STATE["config"] = config
    _WORKER_STATE["resources"] = load_resources(config.split)


def _worker_build(args) -> AlignedTriple:
    serial, plan = args
    return build_triple(serial, plan, _WORKER_STATE["config"], _WORKER_STATE["resources"])


def generate_set(config: GenerationConfig, jobs: int = 1) -> list[AlignedTriple]:
    """Generate ``config.size`` aligned triples; pure given the config."""
    plans = plan_batch(config)
    tasks = list(enumerate(plans, start=1))
    if jobs <= 1:
        _worker_init(config)
        triples = [_worker_build(t) for t in tasks]
    else:
        with multiprocessing.Pool(jobs, initializer=_worker_init, initargs=(config,)) as pool:
            triples = pool.map(_worker_build, tasks, chunksize=64)
    return triples


def to_squad(triples: Sequence[AlignedTriple]) -> dict:
    data = []
    for triple in triples:
        for inst in triple.instances:
            data.append(
                {
                    "title": inst.id,
                    "paragraphs": [
                        {
                            "context": inst.context,
                            "qas": [
                                {
                                    "id": inst.id,
                                    "question": inst.question,
                                    "answers": [
                                        {"text": inst.answer, "answer_start": inst.answer_start}
                                    ],
                                }
                            ],
                        }
                    ],
                }
            )
    return {"version": VERSION, "data": data}


def meta_record(triple: AlignedTriple) -> dict:
    m = triple.meta
    return {
        "id": str(m.serial),
        "question_type": m.question_type,
        "sam_categories": [c.value for c in m.sam_categories],
        "n_sam": m.n_sam,
        "modified_sentences": list(m.modified_sentences),
        "templates": list(m.template_ids),
        "question": qspec_to_dict(m.question),
        "events": [event_to_dict(e) for e in m.events],
    }


def write_set(triples: Sequence[AlignedTriple], out_dir: Path, force: bool = False) -> None:
    """Write challenge.json and meta.jsonl; no partial files are left behind."""
    import os

    out_dir = Path(out_dir)
    if out_dir.exists() and any(out_dir.iterdir()) and not force:
        raise SamError(f"output directory {out_dir} is not empty (use force to overwrite)")
    out_dir.mkdir(parents=True, exist_ok=True)
    tmp_paths = [out_dir / (name + ".tmp") for name in (CHALLENGE_FILE, META_FILE)]
    try:
        with open(tmp_paths[0], "w", encoding="utf-8") as fh:
            json.dump(to_squad(triples), fh, ensure_ascii=True, indent=None, separators=(",", ":"))
        with open(tmp_paths[1], "w", encoding="utf-8") as fh:
            for triple in triples:
                fh.write(json.dumps(meta_record(triple), ensure_ascii=True, separators=(",", ":")))
                fh.write("\n")
        os.replace(tmp_paths[0], out_dir / CHALLENGE_FILE)
        os.replace(tmp_paths[1], out_dir / META_FILE)
    except BaseException:
        for tmp in tmp_paths:
            tmp.unlink(missing_ok=True)
        raise


# --- serialization of the structured sidecar ---------------------------------


def player_to_dict(p: PlayerRef | None):
    if p is None:
        return None
    return {"index": p.index, "given": p.given, "family": p.family}


def player_from_dict(d) -> PlayerRef | None:
    if d is None:
        return None
    return PlayerRef(index=d["index"], given=d["given"], family=d["family"])


def event_to_dict(e: Event) -> dict:
    return {
        "id": e.id,
        "kind": e.kind,
        "actor": player_to_dict(e.actor),
        "coactor": player_to_dict(e.coactor),
        "distance": e.distance,
        "time": e.time,
        "modified": e.modified,
        "sam": [c.value for c in e.sam],
    }


def event_from_dict(d) -> Event:
    return Event(
        id=d["id"],
        kind=d["kind"],
        actor=player_from_dict(d["actor"]),
        coactor=player_from_dict(d["coactor"]),
        distance=d["distance"],
        time=d["time"],
        modified=d["modified"],
        sam=tuple(SamCategory.from_label(c) for c in d["sam"]),
    )


def _descriptor_to_dict(d: EventDescriptor | None):
    if d is None:
        return None
    return {"kind": d.kind, "actor": player_to_dict(d.actor)}


def _descriptor_from_dict(d) -> EventDescriptor | None:
    if d is None:
        return None
    return EventDescriptor(kind=d["kind"], actor=player_from_dict(d["actor"]))


def qspec_to_dict(q: QuestionSpec) -> dict:
    return {
        "family": q.family.value,
        "target": q.target.value,
        "surface": q.surface,
        "attr": q.attr.value if q.attr else None,
        "rank": q.rank,
        "agg": q.agg.value if q.agg else None,
        "over": q.over.value if q.over else None,
        "direction": q.direction.value if q.direction else None,
        "anchor": _descriptor_to_dict(q.anchor),
        "compare": q.compare.value if q.compare else None,
        "pair": [_descriptor_to_dict(p) for p in q.pair] if q.pair else None,
    }


def qspec_from_dict(d) -> QuestionSpec:
    from .types import Agg, CompareAgg, Direction, NumAttr, OrderAttr

    return QuestionSpec(
        family=QuestionFamily(d["family"]),
        target=Target(d["target"]),
        surface=d["surface"],
        attr=OrderAttr(d["attr"]) if d["attr"] else None,
        rank=d["rank"],
        agg=Agg(d["agg"]) if d["agg"] else None,
        over=NumAttr(d["over"]) if d["over"] else None,
        direction=Direction(d["direction"]) if d["direction"] else None,
        anchor=_descriptor_from_dict(d["anchor"]),
        compare=CompareAgg(d["compare"]) if d["compare"] else None,
        pair=tuple(_descriptor_from_dict(p) for p in d["pair"]) if d["pair"] else None,
    )


# --- loading and statistics ---------------------------------------------------


@dataclass(frozen=True)
class LoadedInstance:
    id: str
    question: str
    context: str
    answer: str
    answer_start: int


@dataclass(frozen=True)
class LoadedTriple:
    serial: int
    baseline: LoadedInstance
    intervention: LoadedInstance
    control: LoadedInstance
    question_type: str
    sam_categories: tuple[str, ...]
    n_sam: int
    modified_sentences: tuple[int, ...]
    template_ids: tuple[str, ...]
    question: QuestionSpec
    events: tuple[Event, ...]

    def instance(self, role: str) -> LoadedInstance:
        return {"b": self.baseline, "i": self.intervention, "c": self.control}[role]

    @property
    def instances(self):
        return (self.baseline, self.intervention, self.control)

    def control_events(self) -> tuple[Event, ...]:
        return tuple(e for e in self.events if not e.modified)


@dataclass(frozen=True)
class ChallengeSet:
    triples: tuple[LoadedTriple, ...]

    def __len__(self):
        return len(self.triples)

    def all_instances(self):
        for t in self.triples:
            yield from t.instances


def load_challenge(path: Path) -> ChallengeSet:
    """Read a challenge directory (or its challenge.json) plus the sidecar."""
    path = Path(path)
    if path.is_dir():
        challenge_path, meta_path = path / CHALLENGE_FILE, path / META_FILE
    else:
        challenge_path, meta_path = path, path.parent / META_FILE
    with open(challenge_path, encoding="utf-8") as fh:
        payload = json.load(fh)
    instances: dict[str, LoadedInstance] = {}
    for article in payload["data"]:
        for para in article["paragraphs"]:
            for qa in para["qas"]:
                answer = qa["answers"][0]
                instances[qa["id"]] = LoadedInstance(
                    id=qa["id"],
                    question=qa["question"],
                    context=para["context"],
                    answer=answer["text"],
                    answer_start=answer["answer_start"],
                )
    triples = []
    with open(meta_path, encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            serial = int(rec["id"])
            triples.append(
                LoadedTriple(
                    serial=serial,
                    baseline=instances[f"{serial}-b"],
                    intervention=instances[f"{serial}-i"],
                    control=instances[f"{serial}-c"],
                    question_type=rec["question_type"],
                    sam_categories=tuple(rec["sam_categories"]),
                    n_sam=rec["n_sam"],
                    modified_sentences=tuple(rec["modified_sentences"]),
                    template_ids=tuple(rec["templates"]),
                    question=qspec_from_dict(rec["question"]),
                    events=tuple(event_from_dict(e) for e in rec["events"]),
                )
            )
    triples.sort(key=lambda t: t.serial)
    return ChallengeSet(tuple(triples))


@dataclass(frozen=True)
class CorpusStats:
    avg_words: float
    avg_entities: float
    avg_numbers: float
    n_passages: int


def corpus_statistics(challenge: ChallengeSet) -> CorpusStats:
    """Average length, distinct names and numbers over baseline passages."""
    if not challenge.triples:
        raise ValueError("challenge set is empty")
    words = entities = numbers = 0
    for triple in challenge.triples:
        context = triple.baseline.context
        if not context.strip():
            raise ValueError(f"triple {triple.serial} has an empty passage")
        tokens = context.split()
        words += len(tokens)
        numbers += sum(1 for t in tokens if has_digit(t))
        names = {p.full_name for e in triple.events for p in (e.actor, e.coactor) if p}
        stripped = word_tokens(context)
        entities += sum(1 for name in names if _name_occurs(stripped, name))
    n = len(challenge.triples)
    return CorpusStats(words / n, entities / n, numbers / n, n)


def _name_occurs(tokens: list[str], name: str) -> bool:
    from .textutil import contains_token_seq

    return contains_token_seq(tokens, name.split())


def verify_triple(triple: LoadedTriple) -> None:
    """Re-derive both answers from the sidecar events; raise on any mismatch."""
    q = triple.question
    answer_base = oracle_answer(q, triple.events, honor_sam=False)
    answer_mod = oracle_answer(q, triple.events, honor_sam=True)
    checks = [
        (triple.baseline, answer_base),
        (triple.intervention, answer_mod),
        (triple.control, answer_mod),
    ]
    if answer_base == answer_mod:
        raise SamError(f"triple {triple.serial}: answers coincide")
    if oracle_answer(q, triple.control_events(), honor_sam=False) != answer_mod:
        raise SamError(f"triple {triple.serial}: control events disagree with intervention")
    for inst, expected in checks:
        if inst.answer != expected:
            raise SamError(f"{inst.id}: stored answer {inst.answer!r} != oracle {expected!r}")
        found = inst.context[inst.answer_start:inst.answer_start + len(inst.answer)]
        if found != inst.answer:
            raise SamError(f"{inst.id}: span text {found!r} != answer {inst.answer!r}")
