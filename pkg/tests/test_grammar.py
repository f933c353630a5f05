import random

import pytest
from hypothesis import given, settings, strategies as st

from textcirc.errors import SymbolPositionInvalid, UnknownRule, VocabularyViolation
from textcirc.generate import derivation_of, enumerate_trees, random_tree
from textcirc.grammar import (
    RULE_IDS,
    TABLE_ROWS,
    Language,
    SyntaxTree,
    derive,
    english_table,
    linearize,
    make_table,
    urdu_table,
    validate,
)
from textcirc.lexicon import default_lexicon


def test_derive_english_reads():
    tree = derive(english_table(), [("Trans.Verb", 0)], {0: "John", 1: "reads", 2: "books"})
    assert linearize(tree) == "John reads books"
    assert [leaf.entity for _, leaf in tree.np_leaves()] == [1, 2]


def test_derive_urdu_reads():
    tree = derive(urdu_table(), [("Trans.Verb", 0)], {0: "John", 1: "kitabein", 2: "parhta hai"})
    assert linearize(tree) == "John kitabein parhta hai"


def test_derive_intransitive_one_step():
    tree = derive(english_table(), [("Intrans.Verb", 0)], {0: "Fatima", 1: "smiles"})
    assert tree == SyntaxTree("S", (SyntaxTree("NP", word="Fatima", entity=1), SyntaxTree("IVP", word="smiles")))
    assert linearize(tree) == "Fatima smiles"


def test_empty_derivation_leaves_s_unresolved():
    with pytest.raises(SymbolPositionInvalid):
        derive(english_table(), [], {})


def test_derive_rejects_bad_position_and_rule():
    with pytest.raises(SymbolPositionInvalid):
        derive(english_table(), [("Trans.Verb", 1)], {})
    with pytest.raises(SymbolPositionInvalid):
        derive(english_table(), [("Adverb(IV)", 0)], {})
    with pytest.raises(UnknownRule):
        derive(english_table(), [("Passive", 0)], {})


def test_derive_checks_vocabulary_when_table_has_lexicon():
    table = make_table("en", default_lexicon())
    with pytest.raises(VocabularyViolation):
        derive(table, [("Intrans.Verb", 0)], {0: "Fatima", 1: "dances"})


def test_nested_derivation_positions():
    # S -> NP IVP; IVP -> IVP ADP NP; NP -> ADJ NP
    steps = [("Intrans.Verb", 0), ("Adposition(IV)", 1), ("Adjective(Pre.)", 3)]
    words = {0: "student", 1: "smiles", 2: "at", 3: "honest", 4: "teacher"}
    tree = derive(english_table(), steps, words)
    assert linearize(tree) == "student smiles at honest teacher"


def test_validate_reads_in_both_tables(reads_tree):
    assert validate(reads_tree, english_table()).ok
    report = validate(reads_tree, urdu_table())
    assert not report.ok
    assert report.first.path == ()


def test_urdu_rejects_english_order_only_for_differing_rows():
    # Oracle: compare the right-hand sides of the two tables rule by rule.
    en, ur = english_table(), urdu_table()
    differing = {r for r in RULE_IDS if en.rule(r).rhs != ur.rule(r).rhs}
    assert differing == {"Trans.Verb", "Adjective(Post.)", "Adposition(IV)", "Sent.Comp.Verb"}


def test_root_must_be_s():
    report = validate(SyntaxTree("NP", word="John", entity=1), english_table())
    assert not report.ok and report.first.path == ()


def test_table_has_nine_rows_per_language():
    assert len(TABLE_ROWS) == 9
    for table in (english_table(), urdu_table()):
        assert set(table.rules) == set(RULE_IDS)


def test_validate_catches_missing_index_and_stray_relative_pronoun():
    tree = SyntaxTree("S", (SyntaxTree("NP", word="John"), SyntaxTree("IVP", word="smiles")))
    assert not validate(tree, english_table()).ok
    tree = SyntaxTree("S", (SyntaxTree("NP", word="who", entity=1), SyntaxTree("IVP", word="smiles")))
    assert "outside a relative clause" in str(validate(tree, english_table()))


def test_enumeration_trees_are_valid_and_distinct():
    for lang in (Language.ENGLISH, Language.URDU):
        table = make_table(lang, default_lexicon())
        trees = list(enumerate_trees(3, lang))
        assert trees and all(validate(t, table).ok for t in trees)
    shapes = {str(t) for t in enumerate_trees(3)}
    assert len(shapes) == len(list(enumerate_trees(3)))


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**6), lang=st.sampled_from(["en", "ur"]))
def test_derive_validate_soundness(seed, lang):
    """Replaying the leftmost derivation of any valid tree rebuilds it."""
    table = make_table(lang, default_lexicon())
    tree = random_tree(random.Random(seed), lang, max_steps=8)
    assert validate(tree, table).ok
    steps, choices = derivation_of(tree, table)
    assert derive(table, steps, choices) == tree
