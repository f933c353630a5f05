"""Acceptance criteria, one test each.

Every test prints a ``PASS``/``FAIL`` line with its measurement, then asserts.
"""

import random
import statistics
import time
from collections import Counter

import pytest

from textcirc.circuit import (
    canonicalize,
    compile_text,
    equal_up_to_dictionary,
    linear_extensions,
    reorder,
)
from textcirc.formats import serialize_hybrid_text, serialize_tree
from textcirc.generate import (
    Policy,
    SampleParams,
    circuit_to_text,
    enumerate_trees,
    random_text,
    random_tree,
    roundtrip,
    sample_circuit,
)
from textcirc.grammar import Language, linearize
from textcirc.hybrid import HybridText, make_text, relink
from textcirc.xlang import translate_tree, verify_commuting

from conftest import load_text


@pytest.fixture
def verdict(capsys):
    def say(name: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail

    return say


def _timed(fn, repeats: int = 5) -> tuple[object, float]:
    """Result of ``fn`` and its median wall time in ms over warm runs."""
    result = fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1000)
    return result, statistics.median(times)


def test_1_reads_example(lexicon, verdict):
    en, ur = load_text("john_en.txt"), load_text("john_ur.txt")
    equal, ms = _timed(lambda: equal_up_to_dictionary(compile_text(en), compile_text(ur), lexicon))
    verdict("1 John reads books", equal and ms < 10, f"equal={equal}, {ms:.2f} ms (limit 10 ms)")


def test_2_running_example(lexicon, verdict):
    en, ur = load_text("student_en.txt"), load_text("student_ur.txt")

    def run():
        ce, cu = compile_text(en), compile_text(ur)
        return ce, cu, equal_up_to_dictionary(ce, cu, lexicon)

    (ce, cu, equal), ms = _timed(run)
    top = Counter(e.kind for e in ce.elements)
    want = Counter({"adjective": 2, "sentential_complement": 1, "adposition": 1})
    ok = equal and len(ce.wires) == 2 and len(cu.wires) == 2 and top == want and ms < 50
    verdict("2 running example", ok,
            f"equal={equal}, wires={len(ce.wires)}, elements={dict(top)}, {ms:.2f} ms (limit 50 ms)")


def test_3_copula_reduction(verdict):
    results = {}
    for lang in ("en", "ur"):
        post = canonicalize(compile_text(load_text(f"copula_post_{lang}.txt")))
        pre = canonicalize(compile_text(load_text(f"copula_pre_{lang}.txt")))
        results[lang] = post == pre
    verdict("3 copula reduction", all(results.values()), f"identical per language: {results}")


def _steps(tree) -> int:
    if tree.is_leaf:
        return 0
    return 1 + sum(_steps(c) for c in tree.children)


def _deeper_text(rng: random.Random) -> HybridText:
    while True:
        text = random_text(rng, "en", sentences=rng.randint(1, 5), max_steps=rng.randint(5, 10),
                           pronoun_threshold=rng.randint(-1, 2), fuse_sentences=rng.random() < 0.7)
        if max(_steps(t) for t in text.sentences) > 4:
            return text


def _shrink(text: HybridText, fails) -> HybridText:
    """Drop sentences while the failure persists."""
    changed = True
    while changed and len(text.sentences) > 1:
        changed = False
        for i in range(len(text.sentences)):
            smaller = relink(HybridText(text.language, text.sentences[:i] + text.sentences[i + 1:]))
            if fails(smaller):
                text, changed = smaller, True
                break
    return text


def test_4_commuting_diagram(lexicon, verdict):
    t0 = time.perf_counter()

    def fails(text) -> bool:
        try:
            return not verify_commuting(text, lexicon).equal
        except Exception:
            return True

    exhaustive = [make_text("en", [t]) for t in enumerate_trees(4, "en", lexicon)]
    bad = [t for t in exhaustive if fails(t)]
    rng = random.Random(2024)
    deeper = [_deeper_text(rng) for _ in range(1000)]
    bad += [t for t in deeper if fails(t)]
    elapsed = time.perf_counter() - t0
    detail = (f"{len(exhaustive)} exhaustive (depth <= 4) + {len(deeper)} random, "
              f"{len(bad)} failures, {elapsed:.1f} s (limit 60 s)")
    if bad:
        smallest = min((_shrink(t, fails) for t in bad),
                       key=lambda t: sum(_steps(s) for s in t.sentences))
        detail += "\nminimal counterexample:\n" + serialize_hybrid_text(smallest)
    verdict("4 commuting diagram", not bad and elapsed < 60, detail)


def test_5_surjectivity_round_trip(lexicon, verdict):
    t0 = time.perf_counter()
    params = SampleParams(max_wires=5, max_elements=10, max_depth=2)
    counts, first_bad = {}, None
    for lang in (Language.ENGLISH, Language.URDU):
        ok = 0
        for seed in range(1000):
            policy = Policy(pronoun_threshold=seed % 4 - 1, fuse=seed % 2 == 1)
            report = roundtrip(sample_circuit(seed, params), lang, policy, lexicon)
            ok += report.ok
            if not report.ok and first_bad is None:
                first_bad = (lang.value, seed, report.error)
        counts[lang.value] = ok
    elapsed = time.perf_counter() - t0
    passed = all(v == 1000 for v in counts.values()) and elapsed < 60
    verdict("5 surjectivity round trip", passed,
            f"ok per language {counts} of 1000, first failure {first_bad}, {elapsed:.1f} s (limit 60 s)")


def test_6_translation_involution(lexicon, verdict):
    rng = random.Random(6)
    same = 0
    first_bad = None
    for _ in range(1000):
        tree = random_tree(rng, "en", lexicon, max_steps=rng.randint(1, 12))
        back = translate_tree(translate_tree(tree, lexicon, "e2u"), lexicon, "u2e")
        if back == tree:
            same += 1
        elif first_bad is None:
            first_bad = serialize_tree(tree)
    verdict("6 translation involution", same == 1000, f"{same}/1000 node-for-node equal, first failure {first_bad}")


def test_7_canonicalization_soundness(verdict):
    one_form = 0
    extensions = 0
    for seed in range(200):
        c = sample_circuit(seed, SampleParams(max_wires=6, max_elements=8, max_depth=2))
        orders = list(linear_extensions(c.elements))
        extensions += len(orders)
        if len({canonicalize(reorder(c, o)) for o in orders}) == 1:
            one_form += 1
    verdict("7 canonicalization soundness", one_form == 200,
            f"{one_form}/200 circuits with a single form over {extensions} linear extensions")


def test_8_non_injectivity_witness(verdict):
    from textcirc.circuit import Gate, TextCircuit

    circuit = TextCircuit(((1, "student"), (2, "teacher")), (
        Gate("adjective", "young", (1,)),
        Gate("transitive", "sees", (1, 2)),
        Gate("intransitive", "smiles", (1,)),
    ))
    plain = circuit_to_text(circuit, "en", Policy(pronoun_threshold=-1, fuse=False))
    fused = circuit_to_text(circuit, "en", Policy(pronoun_threshold=1, fuse=True))
    a, b = (" . ".join(linearize(t) for t in x.sentences) for x in (plain, fused))
    same = canonicalize(compile_text(plain)) == canonicalize(compile_text(fused)) == canonicalize(circuit)
    verdict("8 non-injectivity witness", a != b and same, f"{a!r} vs {b!r}, one circuit: {same}")
