from collections import Counter

import pytest

from textcirc.diagram import compose, count_copulas, reduce_copula, text_fragments, tree_to_fragment
from textcirc.errors import DanglingLink, EntityMismatch, ValidationFailure
from textcirc.formats import parse_tree
from textcirc.grammar import english_table, urdu_table
from textcirc.hybrid import NpOccurrence, PronominalLink, add_link, make_text


def kinds(diagram):
    return [(b.kind, b.label) for b in diagram.boxes]


def test_reads_fragment(reads_tree):
    frag = tree_to_fragment(reads_tree, english_table())
    assert [w.noun for w in frag.wires] == ["John", "books"]
    assert kinds(frag) == [("tv_gate", "reads")]
    assert frag.boxes[0].wires == frag.boundary


def test_urdu_reads_fragment_has_same_shape():
    frag = tree_to_fragment(parse_tree('(S (NP#1 John) (NP#2 kitabein) (TVP "parhta hai"))'), urdu_table())
    assert [w.noun for w in frag.wires] == ["John", "kitabein"]
    assert kinds(frag) == [("tv_gate", "parhta hai")]
    assert frag.boxes[0].wires == frag.boundary


def test_intransitive_fragment():
    frag = tree_to_fragment(parse_tree("(S (NP#1 Fatima) (IVP smiles))"), english_table())
    assert len(frag.wires) == 1 and kinds(frag) == [("iv_gate", "smiles")]


def test_invalid_tree_is_refused(reads_tree):
    with pytest.raises(ValidationFailure):
        tree_to_fragment(reads_tree, urdu_table())


def test_compose_fatima_text():
    text = make_text("en", [parse_tree("(S (NP#1 Fatima) (IVP smiles))"),
                            parse_tree("(S (NP#2 Fatima) (TVP reads) (NP#3 books))")])
    text = add_link(text, PronominalLink(NpOccurrence(0, (0,)), NpOccurrence(1, (0,))))
    frags, links = text_fragments(text)
    diagram = compose(frags, links)
    assert [w.noun for w in diagram.wires] == ["Fatima", "books"]
    fatima = diagram.wires[0].id
    on_fatima = [b.kind for b in diagram.boxes if fatima in b.wires]
    assert on_fatima == ["iv_gate", "tv_gate"]


def test_compose_single_fragment_is_identity(reads_tree):
    frag = tree_to_fragment(reads_tree, english_table())
    assert compose([frag]) is frag


def test_compose_rejects_mismatched_entities():
    a = tree_to_fragment(parse_tree("(S (NP#1 Ali) (IVP smiles))"), english_table(), 0)
    b = tree_to_fragment(parse_tree("(S (NP#2 Sara) (IVP runs))"), english_table(), 1)
    with pytest.raises(EntityMismatch):
        compose([a, b], [("0.1", "1.2")])
    with pytest.raises(DanglingLink):
        compose([a, b], [("0.1", "9.9")])


def test_compose_requires_links_for_shared_entities():
    a = tree_to_fragment(parse_tree("(S (NP#1 Ali) (IVP smiles))"), english_table(), 0)
    b = tree_to_fragment(parse_tree("(S (NP#1 Ali) (IVP runs))"), english_table(), 1)
    with pytest.raises(DanglingLink):
        compose([a, b])


@pytest.mark.parametrize("table, source, adjective", [
    (english_table(), "(S (NP#1 teacher) (COP is) (ADJ honest))", "honest"),
    (urdu_table(), "(S (NP#1 ustad) (ADJ imandar) (COP hai))", "imandar"),
])
def test_copula_reduces_to_adjective(table, source, adjective):
    frag = tree_to_fragment(parse_tree(source), table)
    assert count_copulas(frag) == 1
    reduced = reduce_copula(frag)
    assert kinds(reduced) == [("adjective", adjective)]
    assert reduced.boxes[0].wires == frag.boundary


def test_reduce_copula_fixed_point(reads_tree):
    frag = tree_to_fragment(reads_tree, english_table())
    assert reduce_copula(frag) == frag
    once = reduce_copula(tree_to_fragment(parse_tree("(S (NP#1 teacher) (COP is) (ADJ honest))"), english_table()))
    assert reduce_copula(once) == once


def test_running_example_top_level_events(student_en):
    frags, links = text_fragments(student_en)
    diagram = reduce_copula(compose(frags, links))
    # Oracle: hand application of the rules; the complement's adjective is
    # outside the sentential-complement box, the box holds only its head.
    assert Counter(b.kind for b in diagram.boxes) == Counter(
        {"adjective": 2, "scope_box": 1, "adposition_box": 1})
    assert len(diagram.wires) == 2
