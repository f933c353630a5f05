"""Hybrid texts: sentence trees plus pronominal links, and sentence fusion."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import (
    DoubleLink,
    InvalidOccurrence,
    NonAdjacent,
    OrderViolation,
    ScopeEscape,
    UnsupportedFusion,
)
from .grammar import (
    NP,
    OBJECT_PRONOUN,
    RELATIVE_PRONOUN,
    SUBJECT_PRONOUN,
    SUBJECT_RULES,
    GeneratorTable,
    Language,
    Path,
    SyntaxTree,
    ValidationReport,
    Violation,
    head_leaf_path,
    make_table,
    pronouns,
    subject_position,
    text_order,
    validate,
)


@lru_cache(maxsize=None)
def structure_table(language: Language) -> GeneratorTable:
    """Vocabulary-free table, enough for role lookups."""
    return make_table(language)


class Surface(str, enum.Enum):
    PRONOUN = "pronoun"
    RELATIVE_PRONOUN = "relative_pronoun"
    REPEATED_NOUN = "repeated_noun"


@dataclass(frozen=True, order=True)
class NpOccurrence:
    sentence: int
    path: Path

    def __str__(self) -> str:
        return f"{self.sentence}:{'.'.join(map(str, self.path))}"


@dataclass(frozen=True)
class PronominalLink:
    referent: NpOccurrence
    anaphor: NpOccurrence
    surface: Surface = Surface.REPEATED_NOUN


@dataclass(frozen=True)
class Entity:
    index: int
    noun: str
    occurrences: tuple[NpOccurrence, ...]


@dataclass(frozen=True)
class HybridText:
    language: Language
    sentences: tuple[SyntaxTree, ...]
    links: tuple[PronominalLink, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "language", Language.parse(self.language))
        object.__setattr__(self, "sentences", tuple(self.sentences))
        ordered = tuple(sorted(self.links, key=lambda l: (l.anaphor, l.referent)))
        object.__setattr__(self, "links", ordered)

    def leaf(self, occ: NpOccurrence) -> SyntaxTree:
        return self.sentences[occ.sentence].at(occ.path)

    def occurrences(self) -> Iterator[NpOccurrence]:
        """NP leaves in text order: sentence by sentence, role order within."""
        table = structure_table(self.language)
        for i, tree in enumerate(self.sentences):
            for path in text_order(tree, table):
                yield NpOccurrence(i, path)

    def __len__(self) -> int:
        return len(self.sentences)


def _check_occurrence(text: HybridText, occ: NpOccurrence) -> SyntaxTree:
    if not 0 <= occ.sentence < len(text.sentences):
        raise InvalidOccurrence(f"no sentence {occ.sentence}")
    tree = text.sentences[occ.sentence]
    if not tree.has_path(occ.path):
        raise InvalidOccurrence(f"no node at {occ}")
    node = tree.at(occ.path)
    if not (node.is_leaf and node.label == NP):
        raise InvalidOccurrence(f"{occ} is {node.label}, not a noun phrase leaf")
    return node


def _position(text: HybridText) -> dict[NpOccurrence, int]:
    return {occ: k for k, occ in enumerate(text.occurrences())}


def relabel_entity(text: HybridText, old: int, new: int) -> HybridText:
    if old == new:
        return text

    def fix(node: SyntaxTree) -> SyntaxTree:
        if node.is_leaf:
            return node.with_entity(new) if node.label == NP and node.entity == old else node
        return SyntaxTree(node.label, tuple(fix(c) for c in node.children), node.word, node.entity, node.rule)

    return replace(text, sentences=tuple(fix(t) for t in text.sentences))


def add_link(text: HybridText, link: PronominalLink) -> HybridText:
    """Add ``link`` and merge the anaphor's entity into the referent's."""
    ref = _check_occurrence(text, link.referent)
    ana = _check_occurrence(text, link.anaphor)
    if link.referent == link.anaphor:
        raise InvalidOccurrence(f"{link.anaphor} cannot refer to itself")
    if any(l.anaphor == link.anaphor for l in text.links):
        raise DoubleLink(f"{link.anaphor} already has a referent")
    pos = _position(text)
    if pos[link.referent] > pos[link.anaphor]:
        raise OrderViolation(f"anaphor {link.anaphor} precedes its referent {link.referent}")
    if link.surface is Surface.RELATIVE_PRONOUN and link.referent.sentence != link.anaphor.sentence:
        raise InvalidOccurrence("relative pronoun links stay inside one sentence")
    merged = relabel_entity(text, ana.entity, ref.entity)
    return replace(merged, links=merged.links + (link,))


def make_text(language, sentences: Sequence[SyntaxTree], links: Iterable[PronominalLink] = ()) -> HybridText:
    text = HybridText(Language.parse(language), tuple(sentences))
    for link in links:
        text = add_link(text, link)
    return text


def entities(text: HybridText) -> list[Entity]:
    """Entity classes in first-mention order."""
    closed = pronouns(text.language) | {RELATIVE_PRONOUN[text.language]}
    groups: dict[int, list[NpOccurrence]] = {}
    for occ in text.occurrences():
        groups.setdefault(text.leaf(occ).entity, []).append(occ)
    out = []
    for index, occs in groups.items():
        words = [text.leaf(o).word for o in occs]
        noun = next((w for w in words if w not in closed), words[0])
        out.append(Entity(index, noun, tuple(occs)))
    return out


def relink(text: HybridText) -> HybridText:
    """Rebuild the link set from shared entity indices.

    Every later mention links to the entity's first mention, except relative
    pronouns, which link to the head of the noun phrase their clause modifies.
    """
    table = structure_table(text.language)
    rel = RELATIVE_PRONOUN[text.language]
    prons = pronouns(text.language)
    first: dict[int, NpOccurrence] = {}
    links = []
    for occ in text.occurrences():
        leaf = text.leaf(occ)
        if leaf.entity not in first:
            first[leaf.entity] = occ
            continue
        if leaf.word == rel and len(occ.path) >= 2:
            rel_path = occ.path[:-2]
            tree = text.sentences[occ.sentence]
            rnode = tree.at(rel_path)
            gen = table.match(rnode)
            if gen is not None and gen.rule_id == "Relative":
                hi = gen.index_of("head")
                head = rel_path + (hi,) + head_leaf_path(rnode.children[hi], table)
                links.append(PronominalLink(NpOccurrence(occ.sentence, head), occ, Surface.RELATIVE_PRONOUN))
                continue
        surface = Surface.PRONOUN if leaf.word in prons else Surface.REPEATED_NOUN
        links.append(PronominalLink(first[leaf.entity], occ, surface))
    return replace(text, links=tuple(links))


def fix_pronoun_case(tree: SyntaxTree, language: Language) -> SyntaxTree:
    """Use the subject pronoun in subject position and the object form elsewhere."""
    table = structure_table(language)
    prons = pronouns(language)
    for path, leaf in list(tree.np_leaves()):
        if leaf.word in prons:
            want = SUBJECT_PRONOUN[language] if subject_position(tree, path, table) else OBJECT_PRONOUN[language]
            if want != leaf.word:
                tree = tree.replace_at(path, leaf.with_word(want))
    return tree


def _inside_scope(tree: SyntaxTree, path: Path, table: GeneratorTable) -> bool:
    node = tree
    for i in path:
        gen = table.match(node)
        if gen is not None and gen.scope_introducing and gen.roles[i] in ("complement", "left", "right"):
            return True
        node = node.children[i]
    return False


def fuse(text: HybridText, link: PronominalLink) -> HybridText:
    """Adjoin two adjacent linked sentences into one, with a relative clause.

    The referent must head the subject of the earlier sentence.  That sentence
    becomes a relative clause (its subject realised as the relative pronoun)
    attached to the anaphor's position in the later sentence.  Fusion is
    refused when either end sits inside a phrase scope, and when the result
    would compile to a different circuit.
    """
    i, j = link.referent.sentence, link.anaphor.sentence
    if j != i + 1:
        raise NonAdjacent(f"sentences {i} and {j} are not adjacent")
    ref = _check_occurrence(text, link.referent)
    ana = _check_occurrence(text, link.anaphor)
    lang = text.language
    table = structure_table(lang)
    first, second = text.sentences[i], text.sentences[j]
    if _inside_scope(first, link.referent.path, table) or _inside_scope(second, link.anaphor.path, table):
        raise ScopeEscape("a noun wire would have to leave its phrase scope")

    gen = table.match(first)
    if gen is None or gen.rule_id not in SUBJECT_RULES:
        raise UnsupportedFusion(f"sentence {i} has no subject to relativise")
    si = gen.index_of("subject")
    subject = first.children[si]
    if link.referent.path != (si,) + head_leaf_path(subject, table):
        raise UnsupportedFusion(f"{link.referent} does not head the subject of sentence {i}")

    before = relabel_entity(text, ana.entity, ref.entity)
    first, second = before.sentences[i], before.sentences[j]
    subject = first.children[si]
    rel = SyntaxTree(NP, word=RELATIVE_PRONOUN[lang], entity=ref.entity)
    clause = first.replace_at((si,), rel)
    attached = SyntaxTree(NP, (subject, clause), rule="Relative")
    fused = fix_pronoun_case(second.replace_at(link.anaphor.path, attached), lang)

    sentences = before.sentences[:i] + (fused,) + before.sentences[j + 1:]
    after = relink(HybridText(lang, sentences))

    from .circuit import canonicalize, compile_text

    if canonicalize(compile_text(after)) != canonicalize(compile_text(before)):
        raise UnsupportedFusion("fusing here would reorder gates on a shared wire")
    return after


def validate_text(text: HybridText, table: GeneratorTable | None = None) -> ValidationReport:
    """Sentence-wise validation plus link well-formedness.

    Violation paths are prefixed with the sentence index.
    """
    table = table or structure_table(text.language)
    problems: list[Violation] = []
    for i, tree in enumerate(text.sentences):
        for v in validate(tree, table).violations:
            problems.append(Violation((i,) + v.path, v.message))
    pos = _position(text)
    seen: set[NpOccurrence] = set()
    for link in text.links:
        try:
            ref = _check_occurrence(text, link.referent)
            ana = _check_occurrence(text, link.anaphor)
        except InvalidOccurrence as exc:
            problems.append(Violation((link.anaphor.sentence,), str(exc)))
            continue
        where = (link.anaphor.sentence,) + link.anaphor.path
        if ref.entity != ana.entity:
            problems.append(Violation(where, "linked noun phrases carry different entities"))
        if pos[link.referent] >= pos[link.anaphor]:
            problems.append(Violation(where, "anaphor does not follow its referent"))
        if link.anaphor in seen:
            problems.append(Violation(where, "anaphor linked twice"))
        seen.add(link.anaphor)
    return ValidationReport(tuple(problems))
