"""Circuits as a generative grammar: sampling, realisation as text, round trips.

Also home to the random and exhaustive tree generators used to exercise the
compiler.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Sequence

from .circuit import (
    ConjBox,
    Element,
    Gate,
    KIND_RANK,
    KIND_SLOT,
    ModifierBox,
    TextCircuit,
    canonicalize,
    compile_text,
    map_labels,
    precedence,
)
from .errors import (
    FusionError,
    ParamsInvalid,
    TextCircError,
    Unrealizable,
    VocabularyViolation,
    WiringError,
)
from .grammar import (
    ADJ, ADP, ADV, CNJ, COP, IVP, NP, S, SCV, TVP,
    COPULA_WORD,
    OBJECT_PRONOUN,
    RELATIVE_PRONOUN,
    SUBJECT_PRONOUN,
    SUBJECT_RULES,
    GeneratorTable,
    Language,
    PartOfSpeech,
    SyntaxTree,
    assign_entities,
    head_leaf_path,
    pronouns,
    subject_position,
)
from .hybrid import (
    HybridText,
    NpOccurrence,
    PronominalLink,
    fuse,
    relabel_entity,
    relink,
    structure_table,
)
from .lexicon import Lexicon, default_lexicon

ALL_KINDS = tuple(KIND_RANK)


@dataclass(frozen=True)
class SampleParams:
    max_wires: int = 3
    max_elements: int = 4
    max_depth: int = 1
    kind_weights: Mapping[str, float] | None = None

    def weights(self) -> dict[str, float]:
        w = dict.fromkeys(ALL_KINDS, 1.0)
        if self.kind_weights is not None:
            unknown = set(self.kind_weights) - set(ALL_KINDS)
            if unknown:
                raise ParamsInvalid(f"unknown element kinds {sorted(unknown)}")
            w = {k: float(self.kind_weights.get(k, 0.0)) for k in ALL_KINDS}
        if any(v < 0 for v in w.values()) or not any(w.values()):
            raise ParamsInvalid("kind weights must be non-negative and not all zero")
        return w

    def check(self) -> None:
        if self.max_wires < 1 or self.max_elements < 1:
            raise ParamsInvalid("max_wires and max_elements must be positive")
        if self.max_depth < 0:
            raise ParamsInvalid("max_depth must be non-negative")
        self.weights()


@dataclass(frozen=True)
class Vocabulary:
    """Label pools per element kind, plus nouns, for one language."""

    labels: Mapping[str, tuple[str, ...]]
    nouns: tuple[str, ...]

    @classmethod
    def from_lexicon(cls, lexicon: Lexicon, language: Language = Language.ENGLISH) -> "Vocabulary":
        def words(*pos):
            out: dict[str, None] = {}
            for p in pos:
                for w in lexicon.words(language, p):
                    out.setdefault(w, None)
            return tuple(out)

        labels = {
            "adjective": words(PartOfSpeech.ADJ_PRE, PartOfSpeech.ADJ_POST),
            "intransitive": words(PartOfSpeech.IV),
            "transitive": words(PartOfSpeech.TV),
            "adverb": words(PartOfSpeech.ADV_IV, PartOfSpeech.ADV_TV),
            "adposition": words(PartOfSpeech.ADP_IV),
            "sentential_complement": words(PartOfSpeech.SCV),
            "conjunction": words(PartOfSpeech.CNJ),
        }
        return cls(labels, words(PartOfSpeech.NP))


# -- sampling ---------------------------------------------------------------

class _Sampler:
    def __init__(self, rng: random.Random, params: SampleParams, vocab: Vocabulary):
        self.rng = rng
        self.params = params
        self.vocab = vocab
        self.weights = params.weights()
        self.pool = list(range(1, params.max_wires + 1))

    def label(self, kind: str) -> str:
        return self.rng.choice(self.vocab.labels[kind])

    def pick(self, kinds: Mapping[str, float]) -> str:
        names = [k for k, w in kinds.items() if w > 0]
        if not names:
            raise ParamsInvalid("no element kind fits the sampling parameters")
        return self.rng.choices(names, weights=[kinds[k] for k in names])[0]

    def feasible(self, depth: int, free: int, allowed=ALL_KINDS) -> dict[str, float]:
        need = {"adjective": (1, 0), "intransitive": (1, 0), "transitive": (2, 0),
                "adverb": (1, 1), "adposition": (2, 1), "sentential_complement": (2, 1),
                "conjunction": (1, 1)}
        return {k: self.weights[k] for k in allowed
                if free >= need[k][0] and depth >= need[k][1]}

    def head(self, depth: int, subject: int | None = None, avoid=(), allowed=ALL_KINDS,
             top: bool = False) -> Element:
        """One element that can head a sentence, its first wire ``subject`` if given.

        Below the top level, when the weights rule out every kind that fits,
        the fitting kinds are drawn uniformly instead.
        """
        if subject is not None:
            allowed = [k for k in allowed if k != "conjunction"]
        free = [w for w in self.pool if w not in avoid and w != subject]
        options = self.feasible(depth, len(free) + (subject is not None), allowed)
        if not top and not any(options.values()):
            options = dict.fromkeys(options, 1.0)
        kind = self.pick(options)
        subj = subject if subject is not None else self.rng.choice(free)
        others = [w for w in free if w != subj]
        if kind in ("adjective", "intransitive"):
            return Gate(kind, self.label(kind), (subj,))
        if kind == "transitive":
            return Gate(kind, self.label(kind), (subj, self.rng.choice(others)))
        if kind == "adverb":
            verb_kinds = ["intransitive", "adposition", "adverb"] + (["transitive"] if others else [])
            inner = self.head(depth - 1, subj, avoid, verb_kinds)
            while not (_iv_like(inner) or _tv_like(inner)):
                inner = self.head(depth - 1, subj, avoid, verb_kinds)
            return ModifierBox(kind, self.label(kind), inner.wires, inner)
        if kind == "adposition":
            obj = self.rng.choice(others)
            inner = self.iv_like(depth - 1, subj, tuple(avoid) + (obj,))
            return ModifierBox(kind, self.label(kind), inner.wires + (obj,), inner)
        if kind == "sentential_complement":
            inner = self.head(depth - 1, None, tuple(avoid) + (subj,))
            return ModifierBox(kind, self.label(kind), (subj,) + inner.wires, inner)
        left = self.sentence(depth - 1, avoid)
        right = self.sentence(depth - 1, avoid)
        return ConjBox(self.label(kind), left, right)

    def iv_like(self, depth: int, subj: int, avoid) -> Element:
        kinds = ["intransitive", "adverb", "adposition"]
        while True:
            el = self.head(depth, subj, avoid, kinds)
            if _iv_like(el):
                return el

    def sentence(self, depth: int, avoid=()) -> TextCircuit:
        """A circuit realisable as a single sentence: decorated head."""
        h = self.head(depth, None, avoid)
        events: list[Element] = []
        for w in (h.wires if not isinstance(h, ConjBox) else ()):
            if self.rng.random() < 0.3:
                events.append(Gate("adjective", self.label("adjective"), (w,)))
            if self.rng.random() < 0.2 and len(self.pool) > 1:
                events.append(self.head(max(depth - 1, 0), w, avoid))
        return self.circuit(events + [h])

    def circuit(self, elements: Sequence[Element]) -> TextCircuit:
        used = sorted({w for el in elements for w in _all_wires(el)})
        nouns = self.vocab.nouns
        return TextCircuit(tuple((w, nouns[(w - 1) % len(nouns)]) for w in used), tuple(elements))


def _all_wires(el: Element) -> tuple[int, ...]:
    return el.wires


def _iv_like(el: Element) -> bool:
    if isinstance(el, Gate):
        return el.kind == "intransitive"
    if isinstance(el, ModifierBox) and el.kind in ("adverb", "adposition"):
        return _iv_like(el.contents)
    return False


def _tv_like(el: Element) -> bool:
    if isinstance(el, Gate):
        return el.kind == "transitive"
    if isinstance(el, ModifierBox) and el.kind == "adverb":
        return _tv_like(el.contents)
    return False


def sample_circuit(seed: int, params: SampleParams | None = None, lexicon: Lexicon | None = None) -> TextCircuit:
    """Freely generate a circuit with English labels, deterministically per seed.

    Top-level elements are arbitrary; boxes hold verb structures, and
    conjunction boxes hold circuits that read as one sentence each.
    """
    params = params or SampleParams()
    params.check()
    lexicon = lexicon or default_lexicon()
    rng = random.Random(seed)
    s = _Sampler(rng, params, Vocabulary.from_lexicon(lexicon))
    shuffled = list(s.vocab.nouns)
    rng.shuffle(shuffled)
    s.vocab = replace(s.vocab, nouns=tuple(shuffled))
    n = rng.randint(1, params.max_elements)
    elements = [s.head(params.max_depth, top=True) for _ in range(n)]
    return s.circuit(elements)


# -- realisation ------------------------------------------------------------

@dataclass(frozen=True)
class Policy:
    """How to resolve the choices a circuit leaves open.

    ``pronoun_threshold``: a repeated, unmodified mention becomes a pronoun
    when the entity was last mentioned at most this many sentences earlier
    (negative: never).  ``fuse``: merge adjacent sentences with relative
    clauses wherever that leaves the circuit unchanged.
    """

    pronoun_threshold: int = -1
    fuse: bool = False


class _Realiser:
    def __init__(self, circuit: TextCircuit, language: Language):
        self.language = language
        self.table = structure_table(language)
        self.nouns = circuit.nouns

    def node(self, rule_id: str, **roles: SyntaxTree) -> SyntaxTree:
        gen = self.table.rule(rule_id)
        return SyntaxTree(gen.lhs, tuple(roles[r] for r in gen.roles), rule=rule_id)

    def noun(self, wire: int) -> SyntaxTree:
        return SyntaxTree(NP, word=self.nouns[wire], entity=wire)

    def leaf(self, slot: str, word: str) -> SyntaxTree:
        return SyntaxTree(slot, word=word)

    # head element -> S tree, noun phrases supplied per wire

    def clause(self, h: Element, nps: Mapping[int, SyntaxTree]) -> SyntaxTree:
        if isinstance(h, ConjBox):
            return self.node("Conjunction",
                             left=self.sentence(list(h.left.elements)),
                             conjunction=self.leaf(CNJ, h.label),
                             right=self.sentence(list(h.right.elements)))
        subj = nps[h.wires[0]]
        if h.kind == "adjective":
            return self.node("Adjective(Post.)", subject=subj,
                             copula=self.leaf(COP, COPULA_WORD[self.language]),
                             modifier=self.leaf(ADJ, h.label))
        if h.kind == "sentential_complement":
            return self.node("Sent.Comp.Verb", subject=subj, verb=self.leaf(SCV, h.label),
                             complement=self.clause(h.contents, nps))
        if _iv_like(h):
            return self.node("Intrans.Verb", subject=subj, verb=self.ivp(h, nps))
        if _tv_like(h):
            return self.node("Trans.Verb", subject=subj, verb=self.tvp(h), object=nps[h.wires[1]])
        raise Unrealizable(f"no generator yields a {h.kind} {h.label!r} around {getattr(h, 'contents', None)}")

    def ivp(self, h: Element, nps) -> SyntaxTree:
        if isinstance(h, Gate):
            return self.leaf(IVP, h.label)
        if h.kind == "adverb":
            return self.node("Adverb(IV)", modifier=self.leaf(ADV, h.label), verb=self.ivp(h.contents, nps))
        return self.node("Adposition(IV)", verb=self.ivp(h.contents, nps),
                         adposition=self.leaf(ADP, h.label), object=nps[h.wires[-1]])

    def tvp(self, h: Element) -> SyntaxTree:
        if isinstance(h, Gate):
            return self.leaf(TVP, h.label)
        return self.node("Adverb(TV)", modifier=self.leaf(ADV, h.label), verb=self.tvp(h.contents))

    # decorated sentences

    def sentence(self, elements: Sequence[Element], relative_subject: int | None = None) -> SyntaxTree:
        """Realise ``elements`` as one S whose head is their unique last element.

        Everything else becomes adjectives and relative clauses on the head's
        noun phrases.  With ``relative_subject`` the subject is the relative
        pronoun and may carry nothing.
        """
        tree = self._sentence(list(elements), relative_subject)
        if tree is None:
            raise Unrealizable("these elements do not read as a single sentence")
        return tree

    def _sentence(self, elements: list[Element], relative_subject: int | None) -> SyntaxTree | None:
        n = len(elements)
        succ = precedence(elements)
        below = _transitive_predecessors(succ, n)
        maxima = [i for i in range(n) if not succ[i]]
        if len(maxima) != 1:
            return None
        top = maxima[0]
        h = elements[top]
        if relative_subject is not None and (isinstance(h, ConjBox) or h.wires[0] != relative_subject):
            return None
        slots = list(h.wires) if not isinstance(h, ConjBox) else []
        plan = self._assign(elements, below, frozenset(range(n)) - {top}, slots, 0,
                            relative_subject is not None)
        if plan is None:
            return None
        nps = {}
        for w in slots:
            if relative_subject is not None and w == relative_subject:
                nps[w] = SyntaxTree(NP, word=RELATIVE_PRONOUN[self.language], entity=w)
            else:
                nps[w] = self.noun(w)
        for w, unit in plan:
            if unit[0] == "adj":
                nps[w] = self.node("Adjective(Pre.)", modifier=self.leaf(ADJ, unit[1].label), head=nps[w])
            else:
                nps[w] = self.node("Relative", head=nps[w], clause=unit[1])
        try:
            return self.clause(h, nps)
        except Unrealizable:
            return None

    def _assign(self, elements, below, rest: frozenset, slots, k, bare_first):
        if not rest:
            return []
        if k == len(slots):
            return None
        w = slots[k]
        on_w = [i for i in sorted(rest) if w in elements[i].wires]
        if on_w and not (k == 0 and bare_first):
            f = on_w[0]
            el = elements[f]
            if isinstance(el, Gate) and el.kind == "adjective":
                tail = self._assign(elements, below, rest - {f}, slots, k, bare_first)
                if tail is not None:
                    return [(w, ("adj", el))] + tail
            if not isinstance(el, ConjBox) and el.wires[0] == w:
                block = sorted((below[f] & rest) | {f})
                clause = self._sentence([elements[i] for i in block], w)
                if clause is not None:
                    tail = self._assign(elements, below, rest - set(block), slots, k, bare_first)
                    if tail is not None:
                        return [(w, ("rel", clause))] + tail
        return self._assign(elements, below, rest, slots, k + 1, bare_first)


def _transitive_predecessors(succ: dict[int, set[int]], n: int) -> list[frozenset[int]]:
    pred: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for j in succ[i]:
            pred[j].add(i)
    closed: list[frozenset[int]] = []
    for j in range(n):  # list order is a topological order
        acc = set(pred[j])
        for i in pred[j]:
            acc |= closed[i]
        closed.append(frozenset(acc))
    return closed


def _check_vocabulary(circuit: TextCircuit, language: Language, lexicon: Lexicon) -> None:
    from .circuit import walk_elements

    for _, noun in circuit.wires:
        if not lexicon.covers(noun, NP, language):
            raise VocabularyViolation(f"{noun!r} is not a {language.value} noun in the lexicon")
    for el in walk_elements(circuit.elements):
        if not lexicon.covers(el.label, KIND_SLOT[el.kind], language):
            raise VocabularyViolation(f"{el.label!r} is not a {language.value} {KIND_SLOT[el.kind]}")


def pronominalize(text: HybridText, threshold: int) -> HybridText:
    """Replace repeated bare mentions by pronouns, per the sentence-distance threshold."""
    if threshold < 0:
        return text
    lang = text.language
    table = structure_table(lang)
    rel = RELATIVE_PRONOUN[lang]
    last: dict[int, int] = {}
    sentences = list(text.sentences)
    for occ in list(text.occurrences()):
        tree = sentences[occ.sentence]
        leaf = tree.at(occ.path)
        e = leaf.entity
        if leaf.word != rel and e in last and occ.sentence - last[e] <= threshold and _bare(tree, occ.path, table):
            word = SUBJECT_PRONOUN[lang] if subject_position(tree, occ.path, table) else OBJECT_PRONOUN[lang]
            sentences[occ.sentence] = tree.replace_at(occ.path, leaf.with_word(word))
        last[e] = occ.sentence
    return replace(text, sentences=tuple(sentences))


def _bare(tree: SyntaxTree, path, table: GeneratorTable) -> bool:
    if not path:
        return False
    return tree.at(path[:-1]).label != NP


def fuse_greedily(text: HybridText) -> HybridText:
    """Fuse each sentence into the next wherever :func:`fuse` allows it."""
    table = structure_table(text.language)
    i = 0
    while i < len(text.sentences) - 1:
        first = text.sentences[i]
        gen = table.match(first)
        fused = None
        if gen is not None and gen.rule_id in SUBJECT_RULES:
            si = gen.index_of("subject")
            ref_path = (si,) + head_leaf_path(first.children[si], table)
            e = first.at(ref_path).entity
            for occ in text.occurrences():
                if occ.sentence == i + 1 and text.leaf(occ).entity == e:
                    try:
                        fused = fuse(text, PronominalLink(NpOccurrence(i, ref_path), occ))
                    except FusionError:
                        continue
                    break
        if fused is None:
            i += 1
        else:
            text = fused
    return text


def circuit_to_text(circuit: TextCircuit, language=Language.ENGLISH, policy: Policy | None = None,
                    lexicon: Lexicon | None = None) -> HybridText:
    """Write a text whose compilation is ``circuit``.

    Labels must already be words of ``language``.  Each top-level element
    becomes one sentence; conjunction operands become single sentences with
    adjectives and relative clauses where needed.
    """
    language = Language.parse(language)
    policy = policy or Policy()
    lexicon = lexicon or default_lexicon()
    _check_vocabulary(circuit, language, lexicon)
    r = _Realiser(circuit, language)
    sentences = []
    for h in circuit.elements:
        nps = {w: r.noun(w) for w in h.wires}
        sentences.append(r.clause(h, nps))
    text = HybridText(language, tuple(sentences))
    text = relink(pronominalize(text, policy.pronoun_threshold))
    if policy.fuse:
        text = fuse_greedily(text)
    return text


@dataclass(frozen=True)
class RoundtripReport:
    ok: bool
    text: HybridText | None
    expected: bytes
    actual: bytes | None
    error: str | None = None


def roundtrip(circuit: TextCircuit, language=Language.ENGLISH, policy: Policy | None = None,
              lexicon: Lexicon | None = None, labels=Language.ENGLISH) -> RoundtripReport:
    """Realise ``circuit`` in ``language`` and recompile; ``labels`` is the circuit's own language."""
    language, labels = Language.parse(language), Language.parse(labels)
    lexicon = lexicon or default_lexicon()
    if language is not labels:
        circuit = map_labels(circuit, lexicon, labels)
    expected = canonicalize(circuit)
    try:
        text = circuit_to_text(circuit, language, policy, lexicon)
        actual = canonicalize(compile_text(text))
    except TextCircError as exc:
        return RoundtripReport(False, None, expected, None, f"{type(exc).__name__}: {exc}")
    return RoundtripReport(actual == expected, text, expected, actual)


# -- random and exhaustive trees -------------------------------------------

def _lexical_pools(lexicon: Lexicon, language: Language) -> dict[str, tuple[str, ...]]:
    v = Vocabulary.from_lexicon(lexicon, language)
    return {
        NP: v.nouns, IVP: v.labels["intransitive"], TVP: v.labels["transitive"],
        ADJ: v.labels["adjective"], ADV: v.labels["adverb"], ADP: v.labels["adposition"],
        SCV: v.labels["sentential_complement"], CNJ: v.labels["conjunction"],
        COP: (COPULA_WORD[language],),
    }


class _TreeMaker:
    """Builds unlexicalised tree shapes; leaves are bare slot labels."""

    def __init__(self, language: Language):
        self.table = structure_table(language)

    def node(self, rule_id: str, **roles) -> SyntaxTree:
        gen = self.table.rule(rule_id)
        return SyntaxTree(gen.lhs, tuple(roles[r] for r in gen.roles), rule=rule_id)


REL_MARK = "@rel"


def _shapes(maker: _TreeMaker, symbol: str, budget: int, memo: dict) -> list[tuple[SyntaxTree, int]]:
    """Every shape rooted at ``symbol`` using at most ``budget`` rule applications."""
    key = (symbol, budget)
    if key in memo:
        return memo[key]
    out: list[tuple[SyntaxTree, int]] = []
    leaf = lambda label: SyntaxTree(label)
    if symbol in (NP, IVP, TVP):
        out.append((leaf(symbol), 0))
    if symbol == REL_MARK:
        out.append((SyntaxTree(NP, word=REL_MARK), 0))
    b = budget - 1
    if b >= 0:
        def combos(*symbols):
            def rec(i, left):
                if i == len(symbols):
                    yield (), 0
                    return
                for t, used in _shapes(maker, symbols[i], left, memo):
                    for rest, more in rec(i + 1, left - used):
                        yield (t,) + rest, used + more
            yield from rec(0, b)

        mk = maker.node
        if symbol == NP:
            for (h,), u in combos(NP):
                out.append((mk("Adjective(Pre.)", modifier=leaf(ADJ), head=h), u + 1))
            for (h, c), u in combos(NP, "S_rel"):
                out.append((mk("Relative", head=h, clause=c), u + 1))
        elif symbol == IVP:
            for (v,), u in combos(IVP):
                out.append((mk("Adverb(IV)", modifier=leaf(ADV), verb=v), u + 1))
            for (v, o), u in combos(IVP, NP):
                out.append((mk("Adposition(IV)", verb=v, adposition=leaf(ADP), object=o), u + 1))
        elif symbol == TVP:
            for (v,), u in combos(TVP):
                out.append((mk("Adverb(TV)", modifier=leaf(ADV), verb=v), u + 1))
        elif symbol in (S, "S_rel"):
            subj = NP if symbol == S else REL_MARK
            for (s, v), u in combos(subj, IVP):
                out.append((mk("Intrans.Verb", subject=s, verb=v), u + 1))
            for (s, v, o), u in combos(subj, TVP, NP):
                out.append((mk("Trans.Verb", subject=s, verb=v, object=o), u + 1))
            for (s,), u in combos(subj):
                out.append((mk("Adjective(Post.)", subject=s, copula=leaf(COP), modifier=leaf(ADJ)), u + 1))
            for (s, c), u in combos(subj, S):
                out.append((mk("Sent.Comp.Verb", subject=s, verb=leaf(SCV), complement=c), u + 1))
            if symbol == S:
                for (l, r), u in combos(S, S):
                    out.append((mk("Conjunction", left=l, conjunction=leaf(CNJ), right=r), u + 1))
    memo[key] = out
    return out


def _lexicalise(shape: SyntaxTree, language: Language, pools, pick, table) -> SyntaxTree:
    rel = RELATIVE_PRONOUN[language]

    def walk(node: SyntaxTree) -> SyntaxTree:
        if node.is_leaf:
            if node.word == REL_MARK:
                return SyntaxTree(NP, word=rel)
            return SyntaxTree(node.label, word=pick(node.label, pools[node.label]))
        return SyntaxTree(node.label, tuple(walk(c) for c in node.children), rule=node.rule)

    return assign_entities(walk(shape), table)


def enumerate_trees(max_steps: int, language=Language.ENGLISH, lexicon: Lexicon | None = None) -> Iterator[SyntaxTree]:
    """All sentence trees with at most ``max_steps`` rule applications.

    Words are dealt round-robin from the lexicon per slot; every noun phrase
    is a distinct entity except relative pronouns.
    """
    language = Language.parse(language)
    lexicon = lexicon or default_lexicon()
    maker = _TreeMaker(language)
    pools = _lexical_pools(lexicon, language)
    counters = {slot: itertools.count() for slot in pools}

    def pick(slot, pool):
        return pool[next(counters[slot]) % len(pool)]

    for shape, _ in _shapes(maker, S, max_steps, {}):
        yield _lexicalise(shape, language, pools, pick, maker.table)


def random_tree(rng: random.Random, language=Language.ENGLISH, lexicon: Lexicon | None = None,
                max_steps: int = 6) -> SyntaxTree:
    """A random sentence tree with at most ``max_steps`` rule applications."""
    language = Language.parse(language)
    lexicon = lexicon or default_lexicon()
    maker = _TreeMaker(language)
    pools = _lexical_pools(lexicon, language)
    budget = [max_steps]
    leaf = lambda label: SyntaxTree(label)

    def spend() -> bool:
        if budget[0] <= 0:
            return False
        budget[0] -= 1
        return True

    def np() -> SyntaxTree:
        r = rng.random()
        if r < 0.2 and spend():
            return maker.node("Adjective(Pre.)", modifier=leaf(ADJ), head=np())
        if r < 0.3 and spend():
            return maker.node("Relative", head=np(), clause=sentence(relative=True))
        return leaf(NP)

    def ivp() -> SyntaxTree:
        r = rng.random()
        if r < 0.2 and spend():
            return maker.node("Adverb(IV)", modifier=leaf(ADV), verb=ivp())
        if r < 0.4 and spend():
            return maker.node("Adposition(IV)", verb=ivp(), adposition=leaf(ADP), object=np())
        return leaf(IVP)

    def tvp() -> SyntaxTree:
        if rng.random() < 0.25 and spend():
            return maker.node("Adverb(TV)", modifier=leaf(ADV), verb=tvp())
        return leaf(TVP)

    def sentence(relative: bool = False) -> SyntaxTree:
        budget[0] -= 1
        options = ["Intrans.Verb", "Trans.Verb", "Adjective(Post.)"]
        if budget[0] > 0:
            options += ["Sent.Comp.Verb"] + ([] if relative else ["Conjunction"])
        rule = rng.choice(options)
        subj = (lambda: SyntaxTree(NP, word=REL_MARK)) if relative else np
        if rule == "Intrans.Verb":
            return maker.node(rule, subject=subj(), verb=ivp())
        if rule == "Trans.Verb":
            return maker.node(rule, subject=subj(), verb=tvp(), object=np())
        if rule == "Adjective(Post.)":
            return maker.node(rule, subject=subj(), copula=leaf(COP), modifier=leaf(ADJ))
        if rule == "Sent.Comp.Verb":
            return maker.node(rule, subject=subj(), verb=leaf(SCV), complement=sentence())
        return maker.node(rule, left=sentence(), conjunction=leaf(CNJ), right=sentence())

    shape = sentence()
    return _lexicalise(shape, language, pools, lambda slot, pool: rng.choice(pool), maker.table)


def random_text(rng: random.Random, language=Language.ENGLISH, lexicon: Lexicon | None = None,
                sentences: int = 3, max_steps: int = 6, coreference: float = 0.5,
                pronoun_threshold: int = 1, fuse_sentences: bool = True) -> HybridText:
    """A random multi-sentence hybrid text with coreference, pronouns and fusion."""
    language = Language.parse(language)
    lexicon = lexicon or default_lexicon()
    trees = []
    offset = 0
    for _ in range(sentences):
        t = random_tree(rng, language, lexicon, rng.randint(1, max_steps))
        shift = offset
        t = _shift_entities(t, shift)
        offset = max([offset] + [l.entity for _, l in t.np_leaves()])
        trees.append(t)
    text = HybridText(language, tuple(trees))
    ents = sorted({text.leaf(o).entity for o in text.occurrences()})
    for _ in range(len(ents)):
        if rng.random() >= coreference or len(ents) < 2:
            continue
        a, b = rng.sample(ents, 2)
        merged = relabel_entity(text, b, a)
        try:
            compile_text(merged)
        except WiringError:
            continue
        text = _renoun(merged, a)
        ents = [e for e in ents if e != b]
    text = relink(pronominalize(text, pronoun_threshold))
    if fuse_sentences:
        text = fuse_greedily(text)
    return text


def _shift_entities(tree: SyntaxTree, shift: int) -> SyntaxTree:
    for path, leaf in list(tree.np_leaves()):
        tree = tree.replace_at(path, leaf.with_entity(leaf.entity + shift))
    return tree


def _renoun(text: HybridText, entity: int) -> HybridText:
    """Give every non-pronoun mention of ``entity`` the noun of its first mention."""
    closed = pronouns(text.language) | {RELATIVE_PRONOUN[text.language]}
    noun = None
    sentences = list(text.sentences)
    for occ in text.occurrences():
        leaf = text.leaf(occ)
        if leaf.entity != entity or leaf.word in closed:
            continue
        if noun is None:
            noun = leaf.word
        elif leaf.word != noun:
            sentences[occ.sentence] = sentences[occ.sentence].replace_at(occ.path, leaf.with_word(noun))
    return replace(text, sentences=tuple(sentences))


def derivation_of(tree: SyntaxTree, table: GeneratorTable) -> tuple[list[tuple[str, int]], dict]:
    """Leftmost derivation and lexical choices that :func:`derive` replays into ``tree``."""
    steps: list[tuple[str, int]] = []
    choices: dict = {}
    leaves_left = [0]

    def walk(node: SyntaxTree) -> None:
        if node.is_leaf:
            i = leaves_left[0]
            choices[i] = (node.word, node.entity) if node.label == NP else node.word
            leaves_left[0] += 1
            return
        steps.append((table.match(node).rule_id, leaves_left[0]))
        for c in node.children:
            walk(c)

    walk(tree)
    return steps, choices
