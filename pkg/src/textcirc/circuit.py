"""Text circuits, conversion from diagrams, and canonical forms.

A circuit is a list of noun wires and a list of elements.  Elements sharing a
wire are ordered by their position in the list; elements on disjoint wires
commute.  :func:`canonicalize` quotients out exactly that freedom together
with the order of the wires themselves.
"""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

from .errors import (
    CircuitError,
    CycleDetected,
    DanglingLink,
    MissingDictionaryEntry,
    UnreducedCopula,
)
from .grammar import ADJ, ADP, ADV, CNJ, IVP, NP, SCV, TVP, Language

GATE_KINDS = ("adjective", "intransitive", "transitive")
MODIFIER_KINDS = ("adverb", "adposition", "sentential_complement")
KIND_RANK = {k: i for i, k in enumerate(GATE_KINDS + MODIFIER_KINDS + ("conjunction",))}
# preterminal slot that supplies each element kind's label
KIND_SLOT = {
    "adjective": ADJ, "intransitive": IVP, "transitive": TVP, "adverb": ADV,
    "adposition": ADP, "sentential_complement": SCV, "conjunction": CNJ,
}

WireRef = tuple[int, str]


@dataclass(frozen=True)
class Gate:
    kind: str
    label: str
    wires: tuple[int, ...]

    def __post_init__(self):
        arity = 2 if self.kind == "transitive" else 1
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(self.wires) != arity or len(set(self.wires)) != arity:
            raise CircuitError(f"{self.kind} gate {self.label!r} needs {arity} distinct wires, got {self.wires}")


@dataclass(frozen=True)
class ModifierBox:
    kind: str
    label: str
    wires: tuple[int, ...]
    contents: "Element"

    def __post_init__(self):
        inner = self.contents.wires
        if self.kind == "adverb":
            ok = self.wires == inner
        elif self.kind == "adposition":
            ok = self.wires[:-1] == inner and len(self.wires) == len(inner) + 1
        elif self.kind == "sentential_complement":
            ok = self.wires[1:] == inner and len(self.wires) == len(inner) + 1
        else:
            raise CircuitError(f"unknown modifier kind {self.kind!r}")
        if not ok or len(set(self.wires)) != len(self.wires):
            raise CircuitError(f"{self.kind} box {self.label!r}: wires {self.wires} do not fit contents {inner}")


@dataclass(frozen=True)
class ConjBox:
    label: str
    left: "TextCircuit"
    right: "TextCircuit"

    kind = "conjunction"

    @property
    def wires(self) -> tuple[int, ...]:
        return tuple(dict.fromkeys(self.left.wire_ids + self.right.wire_ids))


Element = Union[Gate, ModifierBox, ConjBox]


@dataclass(frozen=True)
class TextCircuit:
    wires: tuple[WireRef, ...] = ()
    elements: tuple[Element, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple((int(i), str(n)) for i, n in self.wires))
        object.__setattr__(self, "elements", tuple(self.elements))
        ids = self.wire_ids
        if len(set(ids)) != len(ids):
            raise CircuitError(f"duplicate wire ids {ids}")
        known = set(ids)
        for el in self.elements:
            if not set(el.wires) <= known:
                raise CircuitError(f"{el.kind} {el.label!r} touches undeclared wires")
            if isinstance(el, ConjBox):
                for side in (el.left, el.right):
                    if dict(side.wires).items() - dict(self.wires).items():
                        raise CircuitError("conjunct wires disagree with the enclosing circuit")

    @property
    def wire_ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.wires)

    @property
    def nouns(self) -> dict[int, str]:
        return dict(self.wires)

    def __len__(self) -> int:
        return len(self.elements)


def walk_elements(elements: Sequence[Element]) -> Iterator[Element]:
    """Every element, outer before inner."""
    for el in elements:
        yield el
        if isinstance(el, ModifierBox):
            yield from walk_elements([el.contents])
        elif isinstance(el, ConjBox):
            yield from walk_elements(el.left.elements)
            yield from walk_elements(el.right.elements)


def element_kinds(circuit: TextCircuit) -> dict[str, int]:
    """Multiset of top-level element kinds."""
    out: dict[str, int] = {}
    for el in circuit.elements:
        out[el.kind] = out.get(el.kind, 0) + 1
    return out


# -- from diagrams ----------------------------------------------------------

_GATE_OF = {"adjective": "adjective", "iv_gate": "intransitive", "tv_gate": "transitive"}
_MOD_OF = {"adverb_box": "adverb", "adposition_box": "adposition", "scope_box": "sentential_complement"}


def diagram_to_circuit(diagram) -> TextCircuit:
    """Convert a composed, copula-reduced text diagram box for box."""
    if diagram.dangling_links:
        raise DanglingLink(f"uncomposed links {sorted(diagram.dangling_links)}")
    ent = {w.id: w.entity for w in diagram.wires}
    nouns = {w.entity: w.noun for w in diagram.wires}

    def ids(ws) -> tuple[int, ...]:
        return tuple(ent[w] for w in ws)

    def sub(d) -> TextCircuit:
        elements = tuple(convert(b) for b in d.boxes)
        wire_order = ids(d.boundary)
        return TextCircuit(tuple((e, nouns[e]) for e in wire_order), elements)

    def convert(box) -> Element:
        if box.kind == "copula":
            raise UnreducedCopula(f"copula {box.label!r} on {box.wires} survived reduction")
        if box.kind in _GATE_OF:
            return Gate(_GATE_OF[box.kind], box.label, ids(box.wires))
        if box.kind in _MOD_OF:
            inner = box.inner[0].boxes
            if len(inner) != 1:
                if any(b.kind == "copula" for b in inner):
                    raise UnreducedCopula(f"copula inside {box.kind} {box.label!r}")
                raise CircuitError(f"{box.kind} {box.label!r} must wrap exactly one box")
            return ModifierBox(_MOD_OF[box.kind], box.label, ids(box.wires), convert(inner[0]))
        return ConjBox(box.label, sub(box.inner[0]), sub(box.inner[1]))

    return TextCircuit(tuple((w.entity, w.noun) for w in diagram.wires),
                       tuple(convert(b) for b in diagram.boxes))


def compile_text(text, table=None) -> TextCircuit:
    """Hybrid text -> fragments -> composed diagram -> reduced -> circuit."""
    from .diagram import compose, reduce_copula, text_fragments

    frags, links = text_fragments(text, table)
    if not frags:
        return TextCircuit()
    return diagram_to_circuit(reduce_copula(compose(frags, links)))


# -- canonical form ---------------------------------------------------------

def precedence(elements: Sequence[Element]) -> dict[int, set[int]]:
    """Immediate successors: i -> {j} when j is the next element after i on a shared wire."""
    succ: dict[int, set[int]] = {i: set() for i in range(len(elements))}
    last: dict[int, int] = {}
    for j, el in enumerate(elements):
        for w in el.wires:
            if w in last:
                succ[last[w]].add(j)
            last[w] = j
    return succ


def linear_extensions(elements: Sequence[Element]) -> Iterator[tuple[int, ...]]:
    """Every order of ``elements`` that keeps each wire's sequence intact."""
    succ = precedence(elements)
    indeg = {i: 0 for i in succ}
    for js in succ.values():
        for j in js:
            indeg[j] += 1
    order: list[int] = []

    def rec():
        if len(order) == len(elements):
            yield tuple(order)
            return
        for i in [k for k, d in indeg.items() if d == 0 and k not in placed]:
            placed.add(i)
            order.append(i)
            for j in succ[i]:
                indeg[j] -= 1
            yield from rec()
            for j in succ[i]:
                indeg[j] += 1
            order.pop()
            placed.discard(i)

    placed: set[int] = set()
    yield from rec()


def _emit(elements: Sequence[Element], pos: dict[int, int]) -> list:
    succ = precedence(elements)
    indeg = {i: 0 for i in succ}
    for js in succ.values():
        for j in js:
            indeg[j] += 1

    def key(i: int):
        el = elements[i]
        return (min(pos[w] for w in el.wires), KIND_RANK[el.kind], el.label)

    heap = [(key(i), i) for i, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, i = heapq.heappop(heap)
        out.append(_element_doc(elements[i], pos))
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (key(j), j))
    if len(out) != len(elements):
        raise CycleDetected("element precedence is cyclic")
    return out


def _element_doc(el: Element, pos: dict[int, int]) -> dict:
    doc = {"kind": el.kind, "label": el.label, "wires": [pos[w] for w in el.wires]}
    if isinstance(el, ConjBox):
        # a conjunction box's wires are a set, not an ordered tuple
        doc["wires"].sort()
    if isinstance(el, ModifierBox):
        inner = _element_doc(el.contents, pos)
        doc["contents"] = inner
        # the box's wires are its own plus its contents', in the contents' order
        if el.kind == "sentential_complement":
            doc["wires"] = doc["wires"][:1] + inner["wires"]
        elif el.kind == "adposition":
            doc["wires"] = inner["wires"] + doc["wires"][-1:]
        else:
            doc["wires"] = list(inner["wires"])
    elif isinstance(el, ConjBox):
        for side, sub in (("left", el.left), ("right", el.right)):
            doc[side] = {"wires": sorted(pos[w] for w in sub.wire_ids),
                         "elements": _emit(sub.elements, pos)}
    return doc


def _dump(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def _wire_signature(circuit: TextCircuit) -> dict[int, tuple]:
    sig: dict[int, list] = {w: [] for w in circuit.wire_ids}
    for el in walk_elements(circuit.elements):
        for k, w in enumerate(el.wires):
            sig[w].append((el.kind, el.label, k))
    return {w: tuple(sorted(s)) for w, s in sig.items()}


def _wire_orders(circuit: TextCircuit) -> Iterator[list[int]]:
    """Candidate wire orders: sorted by noun and usage, ties permuted."""
    nouns = circuit.nouns
    sig = _wire_signature(circuit)
    ranked = sorted(circuit.wire_ids, key=lambda w: (nouns[w], sig[w]))
    groups = [list(g) for _, g in itertools.groupby(ranked, key=lambda w: (nouns[w], sig[w]))]
    for choice in itertools.product(*(itertools.permutations(g) for g in groups)):
        yield [w for g in choice for w in g]


def canonical_document(circuit: TextCircuit) -> dict:
    best = None
    best_text = None
    for order in _wire_orders(circuit):
        pos = {w: i for i, w in enumerate(order)}
        doc = {"wires": [[i, circuit.nouns[w]] for i, w in enumerate(order)],
               "elements": _emit(circuit.elements, pos)}
        text = _dump(doc)
        if best_text is None or text < best_text:
            best, best_text = doc, text
    return best if best is not None else {"wires": [], "elements": []}


def canonicalize(circuit: TextCircuit) -> bytes:
    """Canonical serialisation, as UTF-8 bytes.

    Wires are renumbered by noun (ties broken by taking the smallest
    resulting form) and elements are emitted greedily: among those whose
    predecessors are out, the one with the smallest (first wire position,
    kind rank, label).  Elements available together never share a wire, so
    the key never ties and the result does not depend on which linear
    extension the element list happened to be written in.
    """
    return _dump(canonical_document(circuit)).encode("utf-8")


def reorder(circuit: TextCircuit, order: Sequence[int]) -> TextCircuit:
    return TextCircuit(circuit.wires, tuple(circuit.elements[i] for i in order))


# -- dictionary comparison --------------------------------------------------

def map_labels(circuit: TextCircuit, lexicon, source: Language | str = Language.ENGLISH) -> TextCircuit:
    """Translate every gate label and wire noun through ``lexicon``."""
    source = Language.parse(source)

    def tr(word: str, slot: str) -> str:
        return lexicon.translate(word, slot, source)

    def el(e: Element) -> Element:
        if isinstance(e, Gate):
            return Gate(e.kind, tr(e.label, KIND_SLOT[e.kind]), e.wires)
        if isinstance(e, ModifierBox):
            return ModifierBox(e.kind, tr(e.label, KIND_SLOT[e.kind]), e.wires, el(e.contents))
        return ConjBox(tr(e.label, CNJ), circ(e.left), circ(e.right))

    def circ(c: TextCircuit) -> TextCircuit:
        return TextCircuit(tuple((i, tr(n, NP)) for i, n in c.wires), tuple(el(x) for x in c.elements))

    return circ(circuit)


def equal_up_to_dictionary(a: TextCircuit, b: TextCircuit, lexicon,
                           source: Language | str = Language.ENGLISH) -> bool:
    """Whether translating ``a``'s labels from ``source`` yields ``b`` up to deformation."""
    return canonicalize(map_labels(a, lexicon, source)) == canonicalize(b)


__all__ = [
    "Gate", "ModifierBox", "ConjBox", "TextCircuit", "Element", "KIND_RANK",
    "diagram_to_circuit", "compile_text", "canonicalize", "canonical_document",
    "linear_extensions", "precedence", "reorder", "map_labels",
    "equal_up_to_dictionary", "element_kinds", "walk_elements", "MissingDictionaryEntry",
]
