import pytest

from textcirc.circuit import canonicalize, compile_text
from textcirc.errors import DoubleLink, InvalidOccurrence, NonAdjacent, OrderViolation, ScopeEscape
from textcirc.formats import parse_tree
from textcirc.grammar import linearize
from textcirc.hybrid import (
    NpOccurrence,
    PronominalLink,
    Surface,
    add_link,
    entities,
    fuse,
    make_text,
    validate_text,
)


def occ(s, *path):
    return NpOccurrence(s, tuple(path))


def fatima_text():
    return make_text("en", [
        parse_tree("(S (NP#1 Fatima) (IVP smiles))"),
        parse_tree("(S (NP#2 Fatima) (TVP reads) (NP#3 books))"),
    ])


def test_urdu_pronoun_shares_teacher_index(student_ur):
    teacher = student_ur.leaf(occ(0, 0, 1, 1, 0, 1))
    him = student_ur.leaf(occ(0, 1, 0))
    assert (teacher.word, him.word) == ("ustad", "us")
    assert teacher.entity == him.entity


def test_self_link_rejected():
    text = fatima_text()
    with pytest.raises(InvalidOccurrence):
        add_link(text, PronominalLink(occ(0, 0), occ(0, 0)))


def test_link_to_non_leaf_and_missing_sentence_rejected():
    text = fatima_text()
    with pytest.raises(InvalidOccurrence):
        add_link(text, PronominalLink(occ(0, 1), occ(1, 0)))
    with pytest.raises(InvalidOccurrence):
        add_link(text, PronominalLink(occ(0, 0), occ(5, 0)))


def test_backwards_and_double_links_rejected():
    text = fatima_text()
    with pytest.raises(OrderViolation):
        add_link(text, PronominalLink(occ(1, 0), occ(0, 0)))
    linked = add_link(text, PronominalLink(occ(0, 0), occ(1, 0)))
    with pytest.raises(DoubleLink):
        add_link(linked, PronominalLink(occ(0, 0), occ(1, 0)))


def test_repeated_noun_link_merges_fatima():
    text = add_link(fatima_text(), PronominalLink(occ(0, 0), occ(1, 0), Surface.REPEATED_NOUN))
    classes = entities(text)
    # Oracle: union-find over {1,2,3} with the single union 1~2.
    assert [e.noun for e in classes] == ["Fatima", "books"]
    assert len(classes[0].occurrences) == 2


def test_entities_running_example(student_en):
    assert [e.noun for e in entities(student_en)] == ["student", "teacher"]


def test_entities_reads(john_en):
    assert [e.noun for e in entities(john_en)] == ["John", "books"]


def test_entities_without_links_are_singletons():
    text = make_text("en", [parse_tree("(S (NP#1 Ali) (TVP sees) (NP#2 Sara))")])
    assert [len(e.occurrences) for e in entities(text)] == [1, 1]


def test_fuse_student_sees_teacher():
    text = make_text("en", [
        parse_tree("(S (NP#1 student) (TVP sees) (NP#2 teacher))"),
        parse_tree("(S (NP#3 student) (IVP smiles))"),
    ])
    fused = fuse(text, PronominalLink(occ(0, 0), occ(1, 0)))
    assert len(fused.sentences) == 1
    assert linearize(fused.sentences[0]) == "student who sees teacher smiles"
    assert validate_text(fused).ok
    linked = add_link(text, PronominalLink(occ(0, 0), occ(1, 0)))
    assert canonicalize(compile_text(fused)) == canonicalize(compile_text(linked))


def test_fuse_urdu_uses_jo():
    text = make_text("ur", [
        parse_tree('(S (NP#1 talib-e-ilm) (NP#2 ustad) (TVP "dekhta hai"))'),
        parse_tree('(S (NP#3 talib-e-ilm) (IVP "muskurata hai"))'),
    ])
    fused = fuse(text, PronominalLink(occ(0, 0), occ(1, 0)))
    assert linearize(fused.sentences[0]) == "talib-e-ilm jo ustad dekhta hai muskurata hai"


def test_fuse_requires_adjacent_sentences():
    text = make_text("en", [
        parse_tree("(S (NP#1 Ali) (IVP smiles))"),
        parse_tree("(S (NP#2 Sara) (IVP runs))"),
        parse_tree("(S (NP#3 Ali) (IVP sleeps))"),
    ])
    with pytest.raises(NonAdjacent):
        fuse(text, PronominalLink(occ(0, 0), occ(2, 0)))


def test_fuse_refuses_to_leave_phrase_scope():
    text = make_text("en", [
        parse_tree("(S (NP#1 Ali) (SCV knows) (S (NP#2 John) (IVP smiles)))"),
        parse_tree("(S (NP#3 John) (IVP runs))"),
    ])
    with pytest.raises(ScopeEscape):
        fuse(text, PronominalLink(occ(0, 2, 0), occ(1, 0)))


def test_validate_text_reports_sentence_prefix():
    text = make_text("en", [parse_tree("(S (NP#1 Ali) (IVP smiles))"),
                            parse_tree("(S (NP#2 Ali) (NP#3 Sara) (TVP sees))")])
    report = validate_text(text)
    assert not report.ok and report.first.path[0] == 1
