import pytest
from hypothesis import given, settings, strategies as st

from textcirc.circuit import Gate, ModifierBox, TextCircuit, canonicalize, compile_text, map_labels
from textcirc.errors import ParamsInvalid, Unrealizable, VocabularyViolation
from textcirc.generate import (
    Policy,
    SampleParams,
    circuit_to_text,
    enumerate_trees,
    roundtrip,
    sample_circuit,
)
from textcirc.grammar import linearize

READS = TextCircuit(((1, "John"), (2, "books")), (Gate("transitive", "reads", (1, 2)),))


def test_smallest_sample_is_one_adjective():
    c = sample_circuit(0, SampleParams(1, 1, 0, {"adjective": 1}))
    assert len(c.wires) == 1
    assert len(c.elements) == 1 and c.elements[0].kind == "adjective"


def test_two_wire_transitive_sample_has_reads_shape():
    for seed in range(20):
        c = sample_circuit(seed, SampleParams(2, 1, 0, {"transitive": 1}))
        assert len(c.wires) == 2 and len({n for _, n in c.wires}) == 2
        (gate,) = c.elements
        assert gate.kind == "transitive" and set(gate.wires) == set(c.wire_ids)


def test_sampling_is_deterministic():
    p = SampleParams(5, 10, 2)
    assert sample_circuit(42, p) == sample_circuit(42, p)
    assert any(sample_circuit(s, p) != sample_circuit(42, p) for s in range(5))


@pytest.mark.parametrize("params", [
    SampleParams(0, 1, 0),
    SampleParams(1, 0, 0),
    SampleParams(1, 1, -1),
    SampleParams(1, 1, 0, {"adjective": -1}),
    SampleParams(1, 1, 0, {"nonsense": 1}),
    SampleParams(1, 1, 0, {"transitive": 1}),
])
def test_bad_params_rejected(params):
    with pytest.raises(ParamsInvalid):
        sample_circuit(0, params)


def test_sampled_circuits_respect_bounds():
    p = SampleParams(5, 10, 2)
    for seed in range(50):
        c = sample_circuit(seed, p)
        assert len(c.wires) <= 5 and 1 <= len(c.elements) <= 10

        def depth(el):
            if hasattr(el, "contents"):
                return 1 + depth(el.contents)
            if el.kind == "conjunction":
                return 1 + max(depth(x) for x in el.left.elements + el.right.elements)
            return 0

        assert max(depth(e) for e in c.elements) <= 2


def test_reads_circuit_realised_in_english():
    text = circuit_to_text(READS, "en")
    assert [linearize(t) for t in text.sentences] == ["John reads books"]


def test_reads_circuit_realised_in_urdu(lexicon):
    text = circuit_to_text(map_labels(READS, lexicon, "en"), "ur", lexicon=lexicon)
    assert [linearize(t) for t in text.sentences] == ["John kitabein parhta hai"]


def test_urdu_realisation_rejects_english_labels():
    with pytest.raises(VocabularyViolation):
        circuit_to_text(READS, "ur")


def test_one_wire_two_verbs():
    c = TextCircuit(((1, "Fatima"),), (Gate("intransitive", "smiles", (1,)), Gate("intransitive", "runs", (1,))))
    for threshold, word in ((-1, "Fatima"), (1, "he")):
        text = circuit_to_text(c, "en", Policy(pronoun_threshold=threshold))
        assert [linearize(t) for t in text.sentences] == ["Fatima smiles", f"{word} runs"]
        assert len(text.links) == 1
        assert canonicalize(compile_text(text)) == canonicalize(c)


def test_pronoun_threshold_counts_sentences():
    c = TextCircuit(((1, "Ali"), (2, "Sara")), (
        Gate("intransitive", "smiles", (1,)),
        Gate("intransitive", "runs", (2,)),
        Gate("intransitive", "sleeps", (1,)),
    ))
    far = circuit_to_text(c, "en", Policy(pronoun_threshold=1))
    near = circuit_to_text(c, "en", Policy(pronoun_threshold=2))
    assert linearize(far.sentences[2]) == "Ali sleeps"
    assert linearize(near.sentences[2]) == "he sleeps"


def test_fusion_policy():
    c = TextCircuit(((1, "student"), (2, "teacher")), (
        Gate("transitive", "sees", (1, 2)),
        Gate("intransitive", "smiles", (1,)),
    ))
    text = circuit_to_text(c, "en", Policy(fuse=True))
    assert [linearize(t) for t in text.sentences] == ["student who sees teacher smiles"]
    assert canonicalize(compile_text(text)) == canonicalize(c)


def test_unrealisable_box():
    c = TextCircuit(((1, "Ali"),), (ModifierBox("adverb", "quickly", (1,), Gate("adjective", "happy", (1,))),))
    with pytest.raises(Unrealizable):
        circuit_to_text(c, "en")


def test_roundtrip_reports_failure_instead_of_raising():
    c = TextCircuit(((1, "Ali"),), (ModifierBox("adverb", "quickly", (1,), Gate("adjective", "happy", (1,))),))
    report = roundtrip(c, "en")
    assert not report.ok and "Unrealizable" in report.error


def test_conjunction_operands_become_single_sentences():
    found = False
    for seed in range(200):
        c = sample_circuit(seed, SampleParams(4, 3, 2, {"conjunction": 1}))
        text = circuit_to_text(c, "en")
        assert canonicalize(compile_text(text)) == canonicalize(c)
        if any("who" in linearize(t) for t in text.sentences):
            found = True
    assert found, "expected some conjunct to need a relative clause"


def test_enumeration_counts_grow():
    counts = [sum(1 for _ in enumerate_trees(k)) for k in range(1, 5)]
    # one step: intransitive, transitive and copular clauses with bare leaves;
    # complements and conjunctions need a second S
    assert counts[0] == 3
    assert counts == sorted(counts) and len(set(counts)) == 4


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**6), lang=st.sampled_from(["en", "ur"]),
       threshold=st.integers(-1, 3), fuse=st.booleans())
def test_roundtrip_property(seed, lang, threshold, fuse):
    c = sample_circuit(seed, SampleParams(5, 8, 2))
    assert roundtrip(c, lang, Policy(threshold, fuse)).ok
