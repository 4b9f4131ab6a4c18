import pytest

from sammrc.errors import DepthExceeded, MissingExpansion
from sammrc.grammar import (
    Grammar,
    Template,
    count_realisations,
    load_templates_and_grammar,
    parse_lines,
)


def template(tokens, kinds=("goal",), tid="t", split="train"):
    return Template(id=tid, kinds=tuple(kinds), tokens=tuple(tokens), split=split)


class TestParsing:
    def test_parse_template_and_rules(self):
        lines = [
            "# comment",
            "SPLIT eval",
            "TEMPLATE x goal,foul: %Con #Actor .",
            "RULE A -> one two",
            "RULE A -> three",
            "RULE B ->",
        ]
        templates, grammar = parse_lines(lines)
        assert templates[0].kinds == ("goal", "foul")
        assert templates[0].split == "eval"
        assert grammar.rules["A"] == [("one", "two"), ("three",)]
        assert grammar.rules["B"] == [()]

    def test_malformed_lines_rejected(self):
        with pytest.raises(ValueError):
            parse_lines(["TEMPLATE broken"])
        with pytest.raises(ValueError):
            parse_lines(["RULE NoArrow alternative"])
        with pytest.raises(ValueError):
            parse_lines(["SPLIT nonsense"])

    def test_shipped_files_load_and_validate(self):
        templates, grammar = load_templates_and_grammar()
        assert len(templates.templates) >= 20
        train = templates.for_split("train")
        eval_ = templates.for_split("eval")
        assert not ({t.id for t in train.templates} & {t.id for t in eval_.templates})
        for kind in ("goal", "foul", "clearance", "save", "corner", "substitution", "injury"):
            assert train.applicable(kind), f"train split lacks {kind}"
            assert eval_.applicable(kind), f"eval split lacks {kind}"


class TestCounting:
    def test_product_of_alternatives(self):
        grammar = Grammar(
            rules={
                "A": [("x",), ("y",), ("z",)],
                "B": [("1",), ("2",), ("3",), ("4",)],
            }
        )
        t = template(["$A", "$B"])
        assert count_realisations(t, grammar, {}) == 12

    def test_single_literal_template(self):
        t = template(["just", "words", "."])
        assert count_realisations(t, Grammar(rules={}), {}) == 1

    def test_nested_rules_multiply_and_sum(self):
        grammar = Grammar(
            rules={
                "NP": [("a", "$Adj", "goal"), ("a", "goal")],
                "Adj": [("fine",), ("great",)],
            }
        )
        t = template(["$NP"])
        assert count_realisations(t, grammar, {}) == 3  # 2 adjectives + bare

    def test_verb_slot_uses_frame_size(self):
        t = template(["@SAM", "$V.GoalT"])
        assert count_realisations(t, Grammar(rules={}), {"GoalT": 13}) == 13
        with pytest.raises(MissingExpansion):
            count_realisations(t, Grammar(rules={}), {})

    def test_connective_counts_max_branching(self):
        grammar = Grammar(
            rules={"Con.First": [("A",), ("B",)], "Con.Later": [("C",), ("D",), ("E",)]}
        )
        t = template(["%Con"])
        assert count_realisations(t, grammar, {}) == 3

    def test_cyclic_grammar_raises(self):
        grammar = Grammar(rules={"A": [("$B",)], "B": [("$A",)]})
        with pytest.raises(DepthExceeded):
            count_realisations(template(["$A"]), grammar, {})

    def test_missing_nonterminal_raises(self):
        with pytest.raises(MissingExpansion):
            count_realisations(template(["$Nope"]), Grammar(rules={}), {})
