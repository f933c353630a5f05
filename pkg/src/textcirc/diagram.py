"""Text diagrams: sentence trees rewritten onto noun wires.

Sentence types disappear; every box has as many noun wires out as in.  Phrase
scope is encoded by nesting (``inner`` diagrams of adverb, adposition, scope
and conjunction boxes), so no wire can cross a bubble boundary.  Coreference
between sentences is carried by dashed links until :func:`compose` glues the
fragments together.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import (
    DanglingLink,
    DiagramError,
    EntityMismatch,
    ValidationFailure,
    WiringError,
)
from .grammar import (
    GeneratorTable,
    Language,
    RELATIVE_PRONOUN,
    SyntaxTree,
    pronouns,
    text_order,
    validate,
)

BOX_KINDS = ("adjective", "iv_gate", "tv_gate", "adverb_box", "adposition_box",
             "scope_box", "conj_box", "copula")
NESTING_KINDS = ("adverb_box", "adposition_box", "scope_box", "conj_box")


@dataclass(frozen=True)
class Wire:
    id: str
    entity: int
    noun: str
    # True when every mention in the fragment was a pronoun.
    pronominal: bool = False


@dataclass(frozen=True)
class DiagramBox:
    kind: str
    label: str
    wires: tuple[str, ...]
    inner: tuple["TextDiagram", ...] = ()

    def __post_init__(self):
        if self.kind not in BOX_KINDS:
            raise DiagramError(f"unknown box kind {self.kind!r}")
        if len(set(self.wires)) != len(self.wires):
            raise WiringError(f"{self.kind} {self.label!r} uses a wire twice: {self.wires}")
        n = len(self.wires)
        k = self.kind
        if k in ("adjective", "iv_gate", "copula"):
            ok = n == 1 and not self.inner
        elif k == "tv_gate":
            ok = n == 2 and not self.inner
        elif k == "adverb_box":
            ok = len(self.inner) == 1 and self.wires == self.inner[0].boundary
        elif k == "adposition_box":
            ok = (len(self.inner) == 1 and n >= 2
                  and self.wires[:-1] == self.inner[0].boundary)
        elif k == "scope_box":
            ok = len(self.inner) == 1 and self.wires[1:] == self.inner[0].boundary
        else:
            ok = (len(self.inner) == 2 and set(self.wires)
                  == set(self.inner[0].boundary) | set(self.inner[1].boundary))
        if not ok:
            raise DiagramError(f"{k} {self.label!r} has inconsistent wires {self.wires}")

    @property
    def in_wires(self) -> tuple[str, ...]:
        return self.wires

    @property
    def out_wires(self) -> tuple[str, ...]:
        return self.wires

    def renamed(self, mapping: dict[str, str]) -> "DiagramBox":
        return DiagramBox(
            self.kind, self.label,
            tuple(mapping.get(w, w) for w in self.wires),
            tuple(d.renamed(mapping) for d in self.inner))


@dataclass(frozen=True)
class TextDiagram:
    wires: tuple[Wire, ...] = ()
    boxes: tuple[DiagramBox, ...] = ()
    dangling_links: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self):
        known = {w.id for w in self.wires}
        for box in self.boxes:
            missing = set(box.wires) - known
            if missing:
                raise DiagramError(f"{box.kind} {box.label!r} uses undeclared wires {sorted(missing)}")

    @property
    def boundary(self) -> tuple[str, ...]:
        return tuple(w.id for w in self.wires)

    def renamed(self, mapping: dict[str, str]) -> "TextDiagram":
        wires = tuple(replace(w, id=mapping.get(w.id, w.id)) for w in self.wires)
        return TextDiagram(wires, tuple(b.renamed(mapping) for b in self.boxes),
                           frozenset((mapping.get(a, a), mapping.get(b, b)) for a, b in self.dangling_links))

    def walk(self):
        """All boxes, depth first, outer box before its contents."""
        for box in self.boxes:
            yield box
            for d in box.inner:
                yield from d.walk()


class _FragmentBuilder:
    def __init__(self, tree: SyntaxTree, table: GeneratorTable, sentence: int):
        self.table = table
        self.sentence = sentence
        lang = table.language
        closed = pronouns(lang) | {RELATIVE_PRONOUN[lang]}
        self.wires: dict[int, Wire] = {}
        for path in text_order(tree, table):
            leaf = tree.at(path)
            wid = self.wire_id(leaf.entity)
            known = self.wires.get(leaf.entity)
            if known is None:
                self.wires[leaf.entity] = Wire(wid, leaf.entity, leaf.word, leaf.word in closed)
            elif known.pronominal and leaf.word not in closed:
                self.wires[leaf.entity] = Wire(wid, leaf.entity, leaf.word, False)
        self.by_id = {w.id: w for w in self.wires.values()}

    def wire_id(self, entity: int) -> str:
        return f"{self.sentence}.{entity}"

    def diagram(self, boxes: Sequence[DiagramBox], boundary: Sequence[str] | None = None) -> TextDiagram:
        if boundary is None:
            seen: dict[str, None] = {}
            for b in boxes:
                for w in b.wires:
                    seen.setdefault(w, None)
            boundary = list(seen)
        return TextDiagram(tuple(self.by_id[w] for w in boundary), tuple(boxes))

    def roles(self, node: SyntaxTree) -> tuple[str, dict[str, SyntaxTree]]:
        gen = self.table.match(node)
        return gen.rule_id, {role: node.children[i] for i, role in enumerate(gen.roles)}

    # Each generator contributes one diagram piece; children are addressed by
    # role, so English and Urdu child orders give the same piece.

    def noun_phrase(self, node: SyntaxTree) -> tuple[str, list[DiagramBox]]:
        if node.is_leaf:
            return self.wire_id(node.entity), []
        rule, r = self.roles(node)
        wire, events = self.noun_phrase(r["head"])
        if rule == "Adjective(Pre.)":
            return wire, events + [DiagramBox("adjective", r["modifier"].word, (wire,))]
        # Relative: the clause happens before whatever the host sentence does.
        return wire, events + self.sentence_boxes(r["clause"])

    def sentence_boxes(self, node: SyntaxTree) -> list[DiagramBox]:
        events, head = self.clause(node)
        return events + head

    def clause(self, node: SyntaxTree) -> tuple[list[DiagramBox], list[DiagramBox]]:
        """Boxes for an S node, split into noun-phrase events and the head."""
        rule, r = self.roles(node)
        if rule == "Conjunction":
            left = self.sentence_boxes(r["left"])
            right = self.sentence_boxes(r["right"])
            inner = (self.diagram(left), self.diagram(right))
            wires = tuple(dict.fromkeys(inner[0].boundary + inner[1].boundary))
            return [], [DiagramBox("conj_box", r["conjunction"].word, wires, inner)]

        subj, events = self.noun_phrase(r["subject"])
        if rule == "Intrans.Verb":
            more, box = self.intransitive(r["verb"], subj)
            return events + more, [box]
        if rule == "Trans.Verb":
            obj, more = self.noun_phrase(r["object"])
            return events + more, [self.transitive(r["verb"], subj, obj)]
        if rule == "Adjective(Post.)":
            return events, [DiagramBox("copula", r["copula"].word, (subj,)),
                            DiagramBox("adjective", r["modifier"].word, (subj,))]
        # Sent.Comp.Verb: the complement's noun-phrase events stay outside the
        # bubble; only the verb structure they modify goes in.
        inner_events, inner_head = self.clause(r["complement"])
        inner = self.diagram(inner_head, inner_head[-1].wires)
        box = DiagramBox("scope_box", r["verb"].word, (subj,) + inner.boundary, (inner,))
        return events + inner_events, [box]

    def intransitive(self, node: SyntaxTree, subj: str) -> tuple[list[DiagramBox], DiagramBox]:
        if node.is_leaf:
            return [], DiagramBox("iv_gate", node.word, (subj,))
        rule, r = self.roles(node)
        events, inner = self.intransitive(r["verb"], subj)
        wrapped = self.diagram([inner], inner.wires)
        if rule == "Adverb(IV)":
            return events, DiagramBox("adverb_box", r["modifier"].word, inner.wires, (wrapped,))
        obj, more = self.noun_phrase(r["object"])
        box = DiagramBox("adposition_box", r["adposition"].word, inner.wires + (obj,), (wrapped,))
        return events + more, box

    def transitive(self, node: SyntaxTree, subj: str, obj: str) -> DiagramBox:
        if node.is_leaf:
            return DiagramBox("tv_gate", node.word, (subj, obj))
        _, r = self.roles(node)
        inner = self.transitive(r["verb"], subj, obj)
        return DiagramBox("adverb_box", r["modifier"].word, inner.wires,
                          (self.diagram([inner], inner.wires),))


def tree_to_fragment(tree: SyntaxTree, table: GeneratorTable, sentence: int = 0) -> TextDiagram:
    """Rewrite one sentence tree into a diagram fragment.

    Wire ids are ``"<sentence>.<entity>"`` and wires are listed in text order.
    """
    report = validate(tree, table)
    if not report.ok:
        raise ValidationFailure(report)
    b = _FragmentBuilder(tree, table, sentence)
    boxes = b.sentence_boxes(tree)
    return TextDiagram(tuple(b.wires.values()), tuple(boxes))


def text_fragments(text, table: GeneratorTable | None = None) -> tuple[list[TextDiagram], list[tuple[str, str]]]:
    """Fragments for every sentence of a hybrid text, plus the dashed links.

    Each entity mentioned in several sentences gets a link from each mention's
    wire to the next sentence that mentions it.
    """
    from .hybrid import structure_table

    table = table or structure_table(text.language)
    frags = [tree_to_fragment(t, table, i) for i, t in enumerate(text.sentences)]
    last: dict[int, str] = {}
    links = []
    for frag in frags:
        for w in frag.wires:
            if w.entity in last:
                links.append((last[w.entity], w.id))
            last[w.entity] = w.id
    return frags, links


def attach_links(fragments: Sequence[TextDiagram], links: Iterable[tuple[str, str]]) -> list[TextDiagram]:
    """Record dashed links on the fragments holding their source wires."""
    owner = {w.id: i for i, f in enumerate(fragments) for w in f.wires}
    pending: dict[int, set] = {}
    for a, b in links:
        if a not in owner:
            raise DanglingLink(f"link from unknown wire {a}")
        pending.setdefault(owner[a], set()).add((a, b))
    return [replace(f, dangling_links=f.dangling_links | frozenset(pending.get(i, ())))
            for i, f in enumerate(fragments)]


def compose(fragments: Sequence[TextDiagram], links: Iterable[tuple[str, str]] = ()) -> TextDiagram:
    """Glue fragments along dashed links; unlinked wires sit side by side.

    Links may be passed explicitly or carried in the fragments'
    ``dangling_links``.  Every link must run from an earlier fragment to a
    later one between wires of the same entity, and every entity shared by two
    fragments must be joined by links.
    """
    fragments = list(fragments)
    if len(fragments) == 1 and not links and not fragments[0].dangling_links:
        return fragments[0]
    links = list(links) + [l for f in fragments for l in sorted(f.dangling_links)]
    where: dict[str, tuple[int, Wire]] = {}
    for i, f in enumerate(fragments):
        for w in f.wires:
            where[w.id] = (i, w)

    parent = {wid: wid for wid in where}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in links:
        if a not in where or b not in where:
            raise DanglingLink(f"link {a} -> {b} has a missing end")
        (fa, wa), (fb, wb) = where[a], where[b]
        if fa >= fb:
            raise DanglingLink(f"link {a} -> {b} does not run forward")
        if wa.entity != wb.entity:
            raise EntityMismatch(f"link {a} -> {b} joins entities {wa.entity} and {wb.entity}")
        ra, rb = find(a), find(b)
        if ra != rb:
            # keep the earliest wire as representative
            first, second = sorted((ra, rb), key=lambda w: where[w][0])
            parent[second] = first

    classes: dict[str, list[Wire]] = {}
    for f in fragments:
        for w in f.wires:
            classes.setdefault(find(w.id), []).append(w)
    seen_entity: dict[int, str] = {}
    merged: list[Wire] = []
    for rep, members in classes.items():
        ent = members[0].entity
        if ent in seen_entity:
            raise DanglingLink(f"entity {ent} appears on unlinked wires {seen_entity[ent]} and {rep}")
        seen_entity[ent] = rep
        named = [m for m in members if not m.pronominal] or members
        merged.append(Wire(rep, ent, named[0].noun, named[0].pronominal))

    mapping = {wid: find(wid) for wid in where}
    boxes = tuple(b.renamed(mapping) for f in fragments for b in f.boxes)
    return TextDiagram(tuple(merged), boxes)


def reduce_copula(diagram: TextDiagram) -> TextDiagram:
    """Rewrite every copula followed on its wire by an adjective to the bare adjective.

    Each instance occupies its own wire segment, so instances reduce
    independently; the pass is idempotent.
    """
    boxes = [replace(b, inner=tuple(reduce_copula(d) for d in b.inner)) for b in diagram.boxes]
    keep = []
    for i, box in enumerate(boxes):
        if box.kind == "copula":
            nxt = next((b for b in boxes[i + 1:] if box.wires[0] in b.wires), None)
            if nxt is not None and nxt.kind == "adjective":
                continue
        keep.append(box)
    return replace(diagram, boxes=tuple(keep))


def count_copulas(diagram: TextDiagram) -> int:
    return sum(1 for b in diagram.walk() if b.kind == "copula")
