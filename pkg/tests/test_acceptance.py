"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s``. The adapter round-trip
criterion lives in the adapter package's own test suite (adapter/tests),
since the adapter consumes this package only through its file formats.
"""

import difflib
import itertools
import math
import random
import time
from fractions import Fraction
import pytest

from sammrc.cli import main as cli_main
from sammrc.errors import CapacityExceeded
from sammrc.evaluator import (
    EvalConfig,
    baseline_informed,
    baseline_random,
    ci_halfwidth,
    dice,
    error_analysis,
    fisher_exact,
    gold_predictions,
    oracle_predictions,
    rem_k,
)
from sammrc.generator import (
    GenerationConfig,
    corpus_statistics,
    generate_set,
    load_challenge,
    load_resources,
    verify_triple,
    write_set,
)
from sammrc.grammar import count_realisations
from sammrc.planner import build_plan, capacity, unique_type_orders
from sammrc.quality import lexical_similarity, scan_corpus
from sammrc.textutil import split_sentences
from sammrc.types import GOAL, OTHER_KINDS, QuestionFamily


def check(ok: bool, label: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {label}", flush=True)
    assert ok, label


@pytest.fixture(scope="module")
def big_set(tmp_path_factory):
    """Criterion 1's 10,000-triple set, serialized and reloaded."""
    out = tmp_path_factory.mktemp("big") / "set"
    start = time.monotonic()
    triples = generate_set(GenerationConfig(seed=20260810, size=10_000), jobs=2)
    write_set(triples, out)
    challenge = load_challenge(out)
    return challenge, time.monotonic() - start


@pytest.fixture(scope="module")
def full_scale_set(tmp_path_factory):
    out = tmp_path_factory.mktemp("full") / "set"
    write_set(generate_set(GenerationConfig(seed=77, size=4200), jobs=2), out)
    return load_challenge(out)


@pytest.fixture(scope="module")
def resources():
    return load_resources("full")


def test_criterion_1_oracle_consistency(big_set):
    challenge, elapsed = big_set
    start = time.monotonic()
    for triple in challenge.triples:
        verify_triple(triple)  # A != A', oracle replay, span offsets
    elapsed += time.monotonic() - start
    ok = len(challenge.triples) == 10_000 and elapsed < 300
    check(ok, f"C1 oracle consistency: 10,000 triples verified in {elapsed:.1f}s (< 300s)")


def test_criterion_2_perfect_predictor(full_scale_set):
    result = dice(full_scale_set, gold_predictions(full_scale_set))
    ok = (
        result.dice == 1.0
        and result.acc_b == 1.0
        and result.acc_i == 1.0
        and result.acc_c == 1.0
    )
    check(ok, f"C2 perfect predictor: dice={result.dice}, accs=({result.acc_b}, {result.acc_i}, {result.acc_c})")


def test_criterion_3_sam_blind_predictor(full_scale_set):
    predictions = oracle_predictions(full_scale_set, honor_sam=False)
    result = dice(full_scale_set, predictions)
    errors = error_analysis(full_scale_set, predictions)
    ok = (
        result.acc_b == 1.0
        and result.acc_c == 1.0
        and result.dice == 0.0
        and errors.fraction == 1.0
    )
    check(
        ok,
        "C3 modification-blind reader: "
        f"acc_b={result.acc_b}, acc_c={result.acc_c}, dice={result.dice}, "
        f"baseline-copy fraction={errors.fraction}",
    )


def test_criterion_4_relaxed_match_cases():
    cases = [
        (rem_k("from 26 metres", "26 metres", 5), 1),
        (rem_k("26 metres", "26 metres", 5), 1),
        (rem_k("the goal came from 26 metres", "26 metres", 5), 0),
        (rem_k("Naomi", "Naomi Daniel", 5), 0),
    ]
    ok = all(got == want for got, want in cases)
    check(ok, f"C4 relaxed exact match cases: {[got for got, _ in cases]} == [1, 1, 0, 0]")


def test_criterion_5_ci_arithmetic():
    hw = ci_halfwidth(0.87, 100, 0.05)
    ok = abs(hw - 0.0659) <= 0.0005 and round(100 * hw) == 7
    check(ok, f"C5 confidence interval: half-width {hw:.5f} within 0.0659 +/- 0.0005, rounds to 7")


def _brute_force_fisher(a, b, c, d):
    r1, r2, c1 = a + b, c + d, a + c
    n = r1 + r2
    denom = math.comb(n, c1)
    observed = Fraction(math.comb(r1, a) * math.comb(r2, c1 - a), denom)
    total = Fraction(0)
    for k in range(max(0, c1 - r2), min(r1, c1) + 1):
        p = Fraction(math.comb(r1, k) * math.comb(r2, c1 - k), denom)
        if p <= observed:
            total += p
    return float(total)


def test_criterion_6_fisher_matches_enumeration():
    mismatches = 0
    checked = 0
    for n in range(1, 31):
        for a in range(n + 1):
            for b in range(n + 1 - a):
                for c in range(n + 1 - a - b):
                    d = n - a - b - c
                    result = fisher_exact([[a, b], [c, d]])
                    if 0 in (a + b, c + d, a + c, b + d):
                        if not (result.p_value == 1.0 and result.degenerate):
                            mismatches += 1
                        continue
                    checked += 1
                    expected = _brute_force_fisher(a, b, c, d)
                    if abs(result.p_value - expected) > 1e-12:
                        mismatches += 1
    symmetric = fisher_exact([[1, 0], [0, 1]]).p_value == 1.0
    ok = mismatches == 0 and symmetric and checked > 10_000
    check(ok, f"C6 exact test vs enumeration: {checked} tables (N <= 30), {mismatches} mismatches; [[1,0],[0,1]] -> 1.0")


def test_criterion_7_baseline_bands(full_scale_set):
    cfg = EvalConfig()
    n = len(full_scale_set.triples)
    in_band = True
    informed_beats_random = True
    for seed in range(5):
        rand = dice(full_scale_set, baseline_random(full_scale_set, seed), cfg)
        accs = (rand.acc_b, rand.acc_i, rand.acc_c)
        if not all(0.03 <= acc <= 0.09 for acc in accs):
            in_band = False
        informed = baseline_informed(full_scale_set, seed)
        informed_c = sum(
            rem_k(informed[t.control.id], t.control.answer, cfg.k)
            for t in full_scale_set.triples
        ) / n
        if informed_c < rand.acc_c:
            informed_beats_random = False
    ok = in_band and informed_beats_random
    check(ok, "C7 baseline bands: random B/I/C in [0.03, 0.09] and informed >= random on control, 5 seeds")


def _edit_bound_ok(base_sentence, mod_sentence, surfaces):
    base_words, mod_words = base_sentence.split(), mod_sentence.split()
    regions = [
        op for op in difflib.SequenceMatcher(
            a=base_words, b=mod_words, autojunk=False
        ).get_opcodes()
        if op[0] != "equal"
    ]
    if len(regions) != 1:
        return False
    _, i1, i2, j1, j2 = regions[0]
    removed, inserted = base_words[i1:i2], mod_words[j1:j2]
    if len(removed) > 1:
        return False
    for surface in sorted(surfaces, key=len, reverse=True):
        tokens = surface.split()
        if inserted[: len(tokens)] == tokens and 1 <= len(tokens) <= 4:
            rest = inserted[len(tokens):]
            if not removed:
                return rest == []  # past tense kept: pure insertion
            return 1 <= len(rest) <= 2  # inflected head, possibly "to" + base
    return False


def test_criterion_8_edit_bound(big_set, resources):
    challenge, _ = big_set
    rng = random.Random(0)
    sample = rng.sample(list(challenge.triples), 1000)
    surfaces = resources.lexicon.surfaces()
    bad_edits = 0
    for triple in sample:
        base = split_sentences(triple.baseline.context)
        mod = split_sentences(triple.intervention.context)
        if len(base) != len(mod):
            bad_edits += 1
            continue
        for idx in triple.modified_sentences:
            if not _edit_bound_ok(base[idx], mod[idx], surfaces):
                bad_edits += 1
        for idx, (x, y) in enumerate(zip(base, mod)):
            if idx not in triple.modified_sentences and x != y:
                bad_edits += 1
    controls = [t.control.context for t in sample]
    leaked = scan_corpus(controls, resources.lexicon.entries).frac_any
    ok = bad_edits == 0 and leaked == 0.0
    check(ok, f"C8 edit bound: {bad_edits} violations over 1000 triples; control leakage {leaked}")


def test_criterion_9_cli_determinism(tmp_path):
    dirs = [tmp_path / name for name in ("a", "b", "j1", "j8")]
    runs = [
        ["generate", "--seed", "42", "--size", "500", "--out", str(dirs[0]), "--jobs", "1"],
        ["generate", "--seed", "42", "--size", "500", "--out", str(dirs[1]), "--jobs", "1"],
        ["generate", "--seed", "42", "--size", "500", "--out", str(dirs[2]), "--jobs", "1"],
        ["generate", "--seed", "42", "--size", "500", "--out", str(dirs[3]), "--jobs", "8"],
    ]
    codes = [cli_main(argv) for argv in runs]
    identical = all(
        (dirs[0] / name).read_bytes() == (other / name).read_bytes()
        for other in dirs[1:]
        for name in ("challenge.json", "meta.jsonl")
    )
    ok = codes == [0, 0, 0, 0] and identical
    check(ok, "C9 determinism: repeated runs and jobs 1 vs 8 byte-identical")


def test_criterion_10_grammar_capacity(full_scale_set, resources):
    verb_counts = {frame: len(v) for frame, v in resources.verbs.items()}
    goal_templates = [t for t in resources.templates.templates if "goal" in t.kinds]
    counts = [count_realisations(t, resources.grammar, verb_counts) for t in goal_templates]
    avg = sum(counts) / len(counts)
    passages = [t.baseline.context for t in full_scale_set.triples[:200]]
    similarity = lexical_similarity(passages, sample_pairs=200, seed=0)
    ok = avg >= 1e5 and similarity <= 0.35
    check(ok, f"C10 capacity: mean realisations per goal template {avg:.3g} >= 1e5; Jaccard {similarity:.3f} <= 0.35")


def test_criterion_11_corpus_stats(full_scale_set):
    stats = corpus_statistics(full_scale_set)
    ok = 120 <= stats.avg_words <= 220 and stats.avg_entities >= 8 and stats.avg_numbers >= 5
    check(
        ok,
        f"C11 corpus stats: {stats.avg_words:.1f} words in [120, 220], "
        f"{stats.avg_entities:.1f} entities >= 8, {stats.avg_numbers:.1f} numbers >= 5",
    )


def test_criterion_12_uniqueness(full_scale_set):
    keys = [
        (tuple(e.kind for e in t.events), t.question_type) for t in full_scale_set.triples
    ]
    no_duplicates = len(keys) == len(set(keys))

    n = 3
    enumerated = 0
    for seq in itertools.product((GOAL,) + OTHER_KINDS, repeat=n):
        goals = [i for i, k in enumerate(seq) if k == GOAL]
        if not 2 <= len(goals) <= n - 1:
            continue
        enumerated += 3  # order, argselect, compare need only two goals
        enumerated += any(
            k != GOAL and (sum(g < i for g in goals) >= 2 or sum(g > i for g in goals) >= 2)
            for i, k in enumerate(seq)
        )
    rng = random.Random(1)
    plans = [
        build_plan(rng.choice(list(QuestionFamily)), n, 1, rng) for _ in range(enumerated + 1)
    ]
    try:
        unique_type_orders(plans, rng)
        raised, reported = False, None
    except CapacityExceeded as exc:
        raised, reported = True, exc.max_available
    ok = no_duplicates and raised and reported == enumerated == capacity(n)
    check(
        ok,
        f"C12 uniqueness: no duplicate (kind order, question) keys; capacity {reported} == enumerated {enumerated}",
    )
