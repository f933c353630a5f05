"""English <-> Urdu translation of trees and texts, and the commuting check.

Translation is structural: every node keeps its rule id, its children are
re-ordered into the target language's right-hand side by role, and leaves go
through the lexicon.  Entity indices pass through untouched, which is what
lets links and noun wires be matched up on the other side.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import TextCircuit, canonicalize, compile_text, map_labels
from .errors import ValidationFailure
from .grammar import Language, Path, SyntaxTree, validate
from .hybrid import HybridText, NpOccurrence, PronominalLink, structure_table


def _direction(direction) -> Language:
    """Source language of a translation direction (``"e2u"``, ``"u2e"`` or a Language)."""
    if isinstance(direction, Language):
        return direction
    d = str(direction).lower().replace("->", "2").replace("→", "2")
    if d in ("e2u", "en2ur", "en"):
        return Language.ENGLISH
    if d in ("u2e", "ur2en", "ur"):
        return Language.URDU
    raise ValueError(f"unknown direction {direction!r}")


def translate_tree(tree: SyntaxTree, lexicon, direction="e2u") -> SyntaxTree:
    source = _direction(direction)
    src, tgt = structure_table(source), structure_table(source.other)
    report = validate(tree, src)
    if not report.ok:
        raise ValidationFailure(report)

    def tr(node: SyntaxTree) -> SyntaxTree:
        if node.is_leaf:
            word = lexicon.translate(node.word, node.label, source)
            return SyntaxTree(node.label, (), word, node.entity)
        gs = src.match(node)
        gt = tgt.rule(gs.rule_id)
        kids = tuple(tr(node.children[gs.index_of(role)]) for role in gt.roles)
        return SyntaxTree(node.label, kids, None, None, gs.rule_id)

    return tr(tree)


def translate_path(tree: SyntaxTree, path: Path, source: Language) -> Path:
    """Where the node at ``path`` in a source tree lands in its translation."""
    src, tgt = structure_table(source), structure_table(source.other)
    out = []
    node = tree
    for i in path:
        gs = src.match(node)
        out.append(tgt.rule(gs.rule_id).index_of(gs.roles[i]))
        node = node.children[i]
    return tuple(out)


def translate_text(text: HybridText, lexicon, direction=None) -> HybridText:
    source = _direction(direction) if direction is not None else text.language
    if source is not text.language:
        raise ValueError(f"text is {text.language.value}, direction starts from {source.value}")

    def occ(o: NpOccurrence) -> NpOccurrence:
        return NpOccurrence(o.sentence, translate_path(text.sentences[o.sentence], o.path, source))

    sentences = tuple(translate_tree(t, lexicon, source) for t in text.sentences)
    links = tuple(PronominalLink(occ(l.referent), occ(l.anaphor), l.surface) for l in text.links)
    return HybridText(source.other, sentences, links)


@dataclass(frozen=True)
class CommutingReport:
    equal: bool
    canonical_source: bytes
    canonical_target: bytes
    # source circuit with labels translated, for diffing against the target
    canonical_mapped: bytes
    translated: HybridText

    @property
    def canonical_E(self) -> bytes:
        return self.canonical_source if self.translated.language is Language.URDU else self.canonical_target

    @property
    def canonical_U(self) -> bytes:
        return self.canonical_target if self.translated.language is Language.URDU else self.canonical_source


def verify_commuting(text: HybridText, lexicon) -> CommutingReport:
    """Compile ``text``, translate and compile again, compare up to the dictionary."""
    source_circuit: TextCircuit = compile_text(text)
    translated = translate_text(text, lexicon)
    target_circuit = compile_text(translated)
    mapped = canonicalize(map_labels(source_circuit, lexicon, text.language))
    target = canonicalize(target_circuit)
    return CommutingReport(
        equal=mapped == target,
        canonical_source=canonicalize(source_circuit),
        canonical_target=target,
        canonical_mapped=mapped,
        translated=translated,
    )
