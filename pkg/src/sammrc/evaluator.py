"""Scoring of prediction files against aligned challenge sets.

The consistency score is the fraction of triples answered correctly in all
three versions among those answered correctly in baseline and control; the
conditioning discounts domain-shift effects. Correctness is relaxed exact
match: a prediction of at most k words that contains the gold answer.
"""

from __future__ import annotations

import json
import math
import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from statistics import NormalDist

from .errors import EmptyBasis, EmptySet
from .generator import ChallengeSet, LoadedTriple
from .oracle import oracle_answer
from .textutil import find_token_seq, has_digit, word_tokens

PredictionSet = dict[str, str]

_EXACT_FISHER_LIMIT = 1000


@dataclass(frozen=True)
class EvalConfig:
    k: int = 5
    alpha: float = 0.05
    char_substring: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")


def rem_k(prediction: str, gold: str, k: int = 5, char_substring: bool = False) -> int:
    """Relaxed exact match: 1 iff the prediction has at most k words and
    contains the gold answer, else 0.

    Containment is token-contiguous and case-insensitive with punctuation
    stripped at token edges; ``char_substring`` switches to raw
    case-insensitive character containment.
    """
    if len(prediction.split()) > k:
        return 0
    if char_substring:
        return int(gold.lower() in prediction.lower())
    gold_tokens = [t.lower() for t in word_tokens(gold)]
    pred_tokens = [t.lower() for t in word_tokens(prediction)]
    if not gold_tokens:
        return 0
    return int(bool(find_token_seq(pred_tokens, gold_tokens)))


def ci_halfwidth(p: float, n: int, alpha: float = 0.05) -> float:
    """Normal-approximation confidence interval half-width for a proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    z = NormalDist().inv_cdf(1 - alpha / 2)
    return z * math.sqrt(p * (1 - p) / n)


@dataclass(frozen=True)
class DiceScore:
    """Consistency over one instance subset; ``dice`` is None when the
    subset's basis is empty (undefined, never reported as 0)."""

    dice: float | None
    ci: float | None
    n_basis: int
    n: int


@dataclass(frozen=True)
class EvalResult:
    b_plus: frozenset[int]
    i_plus: frozenset[int]
    c_plus: frozenset[int]
    dice: float
    ci: float
    n_basis: int
    acc_b: float
    acc_i: float
    acc_c: float
    n: int
    missing: int
    by_category: dict[str, DiceScore]
    by_n_sam: dict[int, DiceScore]


def _memberships(challenge: ChallengeSet, predictions: Mapping[str, str], cfg: EvalConfig):
    b_plus, i_plus, c_plus = set(), set(), set()
    missing = 0
    for t in challenge.triples:
        for role, member in (("b", b_plus), ("i", i_plus), ("c", c_plus)):
            inst = t.instance(role)
            pred = predictions.get(inst.id)
            if pred is None:
                missing += 1
                continue
            if rem_k(pred, inst.answer, cfg.k, cfg.char_substring):
                member.add(t.serial)
    return frozenset(b_plus), frozenset(i_plus), frozenset(c_plus), missing


def _subset_score(serials, b_plus, i_plus, c_plus, alpha) -> DiceScore:
    basis = serials & b_plus & c_plus
    if not basis:
        return DiceScore(dice=None, ci=None, n_basis=0, n=len(serials))
    hits = len(basis & i_plus)
    p = hits / len(basis)
    return DiceScore(dice=p, ci=ci_halfwidth(p, len(basis), alpha), n_basis=len(basis), n=len(serials))


def dice(challenge: ChallengeSet, predictions: Mapping[str, str], cfg: EvalConfig | None = None) -> EvalResult:
    """Score a prediction set; raises EmptyBasis when the score is undefined."""
    cfg = cfg or EvalConfig()
    if not challenge.triples:
        raise EmptySet("challenge set is empty")
    b_plus, i_plus, c_plus, missing = _memberships(challenge, predictions, cfg)
    serials = frozenset(t.serial for t in challenge.triples)
    n = len(serials)
    basis = b_plus & c_plus
    if not basis:
        raise EmptyBasis(
            "no instance was solved in both baseline and control; consistency undefined"
        )
    overall = _subset_score(serials, b_plus, i_plus, c_plus, cfg.alpha)

    categories = sorted({c for t in challenge.triples for c in t.sam_categories})
    by_category = {
        cat: _subset_score(
            frozenset(t.serial for t in challenge.triples if cat in t.sam_categories),
            b_plus, i_plus, c_plus, cfg.alpha,
        )
        for cat in categories
    }
    by_n_sam = {
        k: _subset_score(
            frozenset(t.serial for t in challenge.triples if t.n_sam == k),
            b_plus, i_plus, c_plus, cfg.alpha,
        )
        for k in sorted({t.n_sam for t in challenge.triples})
    }
    return EvalResult(
        b_plus=b_plus,
        i_plus=i_plus,
        c_plus=c_plus,
        dice=overall.dice,
        ci=overall.ci,
        n_basis=overall.n_basis,
        acc_b=len(b_plus) / n,
        acc_i=len(i_plus) / n,
        acc_c=len(c_plus) / n,
        n=n,
        missing=missing,
        by_category=by_category,
        by_n_sam=by_n_sam,
    )


# --- Fisher's exact test ------------------------------------------------------


@dataclass(frozen=True)
class FisherResult:
    p_value: float
    table: tuple[tuple[int, int], tuple[int, int]]
    degenerate: bool


def fisher_exact(table: Sequence[Sequence[int]]) -> FisherResult:
    """Two-sided exact test on a 2x2 table by hypergeometric enumeration.

    Sums the probabilities of all tables with the observed margins whose
    point probability does not exceed the observed table's. A table with a
    zero margin is degenerate: p = 1.0 by convention, flagged.
    """
    (a, b), (c, d) = table
    if min(a, b, c, d) < 0:
        raise ValueError("table entries must be non-negative")
    r1, r2, c1, c2 = a + b, c + d, a + c, b + d
    n = r1 + r2
    if 0 in (r1, r2, c1, c2):
        return FisherResult(1.0, ((a, b), (c, d)), degenerate=True)
    kmin, kmax = max(0, c1 - r2), min(r1, c1)
    if n <= _EXACT_FISHER_LIMIT:
        denom = math.comb(n, c1)
        probs = {
            k: Fraction(math.comb(r1, k) * math.comb(r2, c1 - k), denom)
            for k in range(kmin, kmax + 1)
        }
        p = sum(pr for pr in probs.values() if pr <= probs[a])
        return FisherResult(float(min(p, Fraction(1))), ((a, b), (c, d)), degenerate=False)
    log_denom = _lchoose(n, c1)
    logs = {k: _lchoose(r1, k) + _lchoose(r2, c1 - k) - log_denom for k in range(kmin, kmax + 1)}
    cutoff = logs[a] + math.log1p(1e-7)
    p = sum(math.exp(lp) for lp in logs.values() if lp <= cutoff)
    return FisherResult(min(p, 1.0), ((a, b), (c, d)), degenerate=False)


def _lchoose(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def fisher_compare(result_a: EvalResult, result_b: EvalResult) -> FisherResult:
    """Compare two scored runs: success = solved in all three versions,
    within each run's basis."""
    rows = []
    for r in (result_a, result_b):
        successes = len(r.b_plus & r.i_plus & r.c_plus)
        rows.append((successes, r.n_basis - successes))
    return fisher_exact(rows)


# --- error analysis -----------------------------------------------------------


@dataclass(frozen=True)
class ErrorAnalysis:
    """How often a failed intervention still answers with the baseline answer."""

    fraction: float
    ci: float
    n: int


def error_analysis(
    challenge: ChallengeSet, predictions: Mapping[str, str], cfg: EvalConfig | None = None
) -> ErrorAnalysis:
    cfg = cfg or EvalConfig()
    b_plus, i_plus, c_plus, _ = _memberships(challenge, predictions, cfg)
    pool = (b_plus & c_plus) - i_plus
    if not pool:
        raise EmptySet("no instance failed only on the intervention")
    hits = 0
    for t in challenge.triples:
        if t.serial not in pool:
            continue
        pred = predictions.get(t.intervention.id, "")
        hits += rem_k(pred, t.baseline.answer, cfg.k, cfg.char_substring)
    p = hits / len(pool)
    return ErrorAnalysis(fraction=p, ci=ci_halfwidth(p, len(pool), cfg.alpha), n=len(pool))


# --- baselines ----------------------------------------------------------------


def answer_candidates(context: str, names: Sequence[str]) -> list[str]:
    """All named-entity occurrences plus digit-bearing tokens with their unit."""
    tokens = word_tokens(context)
    candidates: list[str] = []
    for name in names:
        candidates.extend(name for _ in find_token_seq(tokens, name.split()))
    for i, tok in enumerate(tokens):
        if has_digit(tok):
            if i + 1 < len(tokens):
                candidates.append(f"{tok} {tokens[i + 1]}")
            else:
                candidates.append(tok)
    return candidates


def typed_candidates(question: str, candidates: Sequence[str]) -> tuple[list[str], bool]:
    """Filter candidates by the question's expected answer type.

    Returns the pool and whether it fell back to the full pool because the
    filter matched nothing.
    """
    q = question.lower()
    numeric = [c for c in candidates if has_digit(c)]
    if q.startswith("who"):
        pool = [c for c in candidates if not has_digit(c)]
    elif q.startswith("when"):
        pool = [c for c in numeric if "minute" in c.lower()]
    elif "distance" in q or "far" in q:
        pool = [c for c in numeric if "metre" in c.lower()]
    else:
        pool = numeric
    if pool:
        return pool, False
    return list(candidates), True


def _triple_names(triple: LoadedTriple) -> list[str]:
    names = {p.full_name for e in triple.events for p in (e.actor, e.coactor) if p}
    return sorted(names)


def baseline_random(challenge: ChallengeSet, seed: int) -> PredictionSet:
    """Uniform choice among each passage's answer candidates."""
    rng = random.Random(seed)
    predictions: PredictionSet = {}
    for t in challenge.triples:
        names = _triple_names(t)
        for inst in t.instances:
            pool = answer_candidates(inst.context, names)
            predictions[inst.id] = rng.choice(pool) if pool else ""
    return predictions


def baseline_informed(challenge: ChallengeSet, seed: int) -> PredictionSet:
    """Uniform choice among candidates matching the expected answer type."""
    rng = random.Random(seed)
    predictions: PredictionSet = {}
    for t in challenge.triples:
        names = _triple_names(t)
        for inst in t.instances:
            pool, _ = typed_candidates(inst.question, answer_candidates(inst.context, names))
            predictions[inst.id] = rng.choice(pool) if pool else ""
    return predictions


def oracle_predictions(challenge: ChallengeSet, honor_sam: bool) -> PredictionSet:
    """Replay the answer oracle over every passage's events.

    The baseline and control passages carry no insertions, so their readings
    never exclude events; ``honor_sam`` governs only how the intervention
    passage is read. With ``honor_sam=False`` this is the modification-blind
    reader: right on baseline and control, wrong on every intervention.
    """
    predictions: PredictionSet = {}
    for t in challenge.triples:
        predictions[t.baseline.id] = oracle_answer(t.question, t.events, False)
        predictions[t.intervention.id] = oracle_answer(t.question, t.events, honor_sam)
        predictions[t.control.id] = oracle_answer(t.question, t.control_events(), False)
    return predictions


def gold_predictions(challenge: ChallengeSet) -> PredictionSet:
    return {inst.id: inst.answer for inst in challenge.all_instances()}


# --- prediction file I/O --------------------------------------------------------


def load_predictions(path: Path) -> PredictionSet:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in payload.items()
    ):
        raise ValueError(f"{path}: prediction files map instance id to answer string")
    return payload


def save_predictions(predictions: PredictionSet, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(predictions, fh, ensure_ascii=True, indent=0, sort_keys=True)


def result_to_dict(result: EvalResult, errors: ErrorAnalysis | None = None) -> dict:
    def sub(score: DiceScore) -> dict:
        return {"dice": score.dice, "ci": score.ci, "n_basis": score.n_basis, "n": score.n}

    payload = {
        "dice": result.dice,
        "ci": result.ci,
        "n_basis": result.n_basis,
        "acc_b": result.acc_b,
        "acc_i": result.acc_i,
        "acc_c": result.acc_c,
        "n": result.n,
        "missing": result.missing,
        "by_category": {k: sub(v) for k, v in result.by_category.items()},
        "by_n_sam": {str(k): sub(v) for k, v in result.by_n_sam.items()},
        "error_analysis": None,
    }
    if errors is not None:
        payload["error_analysis"] = {
            "fraction": errors.fraction,
            "ci": errors.ci,
            "n": errors.n,
        }
    return payload
