"""Generator sets for the English and Urdu fragments, derivations and yields.

A sentence is a rooted ordered tree.  Internal nodes are justified by exactly
one :class:`Generator`; leaves are preterminals carrying a word (and, for noun
phrases, an entity index).  English and Urdu share rule identifiers and role
names; only the left-to-right order of the right-hand side differs for four
rules.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union

from .errors import (
    NonTerminalLeaf,
    SymbolPositionInvalid,
    UnknownRule,
    VocabularyViolation,
)


class Language(str, enum.Enum):
    ENGLISH = "en"
    URDU = "ur"

    @classmethod
    def parse(cls, value: Union[str, "Language"]) -> "Language":
        if isinstance(value, Language):
            return value
        v = value.strip().lower()
        for lang in cls:
            if v in (lang.value, lang.name.lower()):
                return lang
        raise ValueError(f"unknown language {value!r}")

    @property
    def other(self) -> "Language":
        return Language.URDU if self is Language.ENGLISH else Language.ENGLISH


# Preterminal categories: the only labels a leaf may carry.
NP, IVP, TVP, ADJ, ADV, ADP, SCV, CNJ, COP = (
    "NP", "IVP", "TVP", "ADJ", "ADV", "ADP", "SCV", "CNJ", "COP")
S = "S"
SLOTS = (NP, IVP, TVP, ADJ, ADV, ADP, SCV, CNJ, COP)


class PartOfSpeech(str, enum.Enum):
    NP = "NP"
    IV = "IV"
    TV = "TV"
    ADJ_PRE = "ADJ_PRE"
    ADJ_POST = "ADJ_POST"
    ADV_IV = "ADV_IV"
    ADV_TV = "ADV_TV"
    ADP_IV = "ADP_IV"
    SCV = "SCV"
    CNJ = "CNJ"
    COPULA = "COPULA"

    @property
    def slot(self) -> str:
        return _POS_SLOT[self]


_POS_SLOT = {
    PartOfSpeech.NP: NP,
    PartOfSpeech.IV: IVP,
    PartOfSpeech.TV: TVP,
    PartOfSpeech.ADJ_PRE: ADJ,
    PartOfSpeech.ADJ_POST: ADJ,
    PartOfSpeech.ADV_IV: ADV,
    PartOfSpeech.ADV_TV: ADV,
    PartOfSpeech.ADP_IV: ADP,
    PartOfSpeech.SCV: SCV,
    PartOfSpeech.CNJ: CNJ,
    PartOfSpeech.COPULA: COP,
}

# Closed-class words.  Case is the only inflection modelled: subject pronouns
# differ from object/oblique ones.
COPULA_WORD = {Language.ENGLISH: "is", Language.URDU: "hai"}
RELATIVE_PRONOUN = {Language.ENGLISH: "who", Language.URDU: "jo"}
SUBJECT_PRONOUN = {Language.ENGLISH: "he", Language.URDU: "woh"}
OBJECT_PRONOUN = {Language.ENGLISH: "him", Language.URDU: "us"}


def pronouns(language: Language) -> frozenset[str]:
    return frozenset({SUBJECT_PRONOUN[language], OBJECT_PRONOUN[language]})


def closed_class(language: Language) -> dict[str, frozenset[str]]:
    """Words every table admits regardless of the lexicon, per slot."""
    return {
        NP: pronouns(language) | {RELATIVE_PRONOUN[language]},
        COP: frozenset({COPULA_WORD[language]}),
    }


@dataclass(frozen=True)
class Generator:
    rule_id: str
    lhs: str
    rhs: tuple[str, ...]
    roles: tuple[str, ...]
    language: Language
    scope_introducing: bool = False

    def index_of(self, role: str) -> int:
        return self.roles.index(role)

    def __str__(self) -> str:
        return f"{self.rule_id}: {self.lhs} -> {' . '.join(self.rhs)}"


# rule_id -> (lhs, english (role, symbol) list, urdu list, scope flag)
_RULES: dict[str, tuple[str, list, list, bool]] = {
    "Intrans.Verb": (
        S,
        [("subject", NP), ("verb", IVP)],
        [("subject", NP), ("verb", IVP)],
        False),
    "Trans.Verb": (
        S,
        [("subject", NP), ("verb", TVP), ("object", NP)],
        [("subject", NP), ("object", NP), ("verb", TVP)],
        False),
    "Adjective(Pre.)": (
        NP,
        [("modifier", ADJ), ("head", NP)],
        [("modifier", ADJ), ("head", NP)],
        False),
    "Adjective(Post.)": (
        S,
        [("subject", NP), ("copula", COP), ("modifier", ADJ)],
        [("subject", NP), ("modifier", ADJ), ("copula", COP)],
        False),
    "Adverb(IV)": (
        IVP,
        [("modifier", ADV), ("verb", IVP)],
        [("modifier", ADV), ("verb", IVP)],
        False),
    "Adverb(TV)": (
        TVP,
        [("modifier", ADV), ("verb", TVP)],
        [("modifier", ADV), ("verb", TVP)],
        False),
    "Adposition(IV)": (
        IVP,
        [("verb", IVP), ("adposition", ADP), ("object", NP)],
        [("object", NP), ("adposition", ADP), ("verb", IVP)],
        False),
    "Sent.Comp.Verb": (
        S,
        [("subject", NP), ("verb", SCV), ("complement", S)],
        [("subject", NP), ("complement", S), ("verb", SCV)],
        True),
    "Conjunction": (
        S,
        [("left", S), ("conjunction", CNJ), ("right", S)],
        [("left", S), ("conjunction", CNJ), ("right", S)],
        True),
    # Introduced by fusion of pronominally linked sentences, not a table row.
    "Relative": (
        NP,
        [("head", NP), ("clause", S)],
        [("head", NP), ("clause", S)],
        False),
}

TABLE_ROWS = (
    "Intrans.Verb", "Trans.Verb", "Adjective(Pre.)", "Adjective(Post.)",
    "Adverb(IV)", "Adverb(TV)", "Adposition(IV)", "Sent.Comp.Verb",
    "Conjunction",
)
RULE_IDS = TABLE_ROWS + ("Relative",)

# Rules whose clause has a subject noun phrase.
SUBJECT_RULES = frozenset(
    {"Intrans.Verb", "Trans.Verb", "Adjective(Post.)", "Sent.Comp.Verb"})


def _make_generator(rule_id: str, language: Language) -> Generator:
    lhs, en, ur, scope = _RULES[rule_id]
    pairs = en if language is Language.ENGLISH else ur
    return Generator(
        rule_id=rule_id,
        lhs=lhs,
        rhs=tuple(sym for _, sym in pairs),
        roles=tuple(role for role, _ in pairs),
        language=language,
        scope_introducing=scope,
    )


def canonical_roles(rule_id: str) -> tuple[str, ...]:
    """Role order used for text order in both languages (the English one)."""
    return tuple(role for role, _ in _RULES[rule_id][1])


@dataclass(frozen=True)
class GeneratorTable:
    language: Language
    rules: Mapping[str, Generator]
    # Empty vocabulary for a slot means "any word".
    lexicon_slots: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        index = {}
        for gen in self.rules.values():
            index[(gen.lhs, gen.rhs)] = gen
        object.__setattr__(self, "_by_shape", index)

    def rule(self, rule_id: str) -> Generator:
        try:
            return self.rules[rule_id]
        except KeyError:
            raise UnknownRule(f"no rule {rule_id!r} in the {self.language.name.lower()} table") from None

    def match(self, node: "SyntaxTree") -> Generator | None:
        if node.is_leaf:
            return None
        return self._by_shape.get((node.label, tuple(c.label for c in node.children)))

    def permits(self, slot: str, word: str) -> bool:
        if slot == COP:
            return word == COPULA_WORD[self.language]
        vocab = self.lexicon_slots.get(slot)
        if not vocab:
            return True
        return word in vocab or word in closed_class(self.language).get(slot, ())


def make_table(language: Union[str, Language], lexicon=None) -> GeneratorTable:
    """Build the generator table for ``language``.

    With a lexicon, every slot's vocabulary is restricted to the lexicon's
    words in that language (plus pronouns and the copula); without one only
    the copula is checked.
    """
    language = Language.parse(language)
    rules = {rid: _make_generator(rid, language) for rid in RULE_IDS}
    slots: dict[str, frozenset[str]] = {}
    if lexicon is not None:
        for slot in SLOTS:
            words = lexicon.vocabulary(language, slot)
            if words:
                slots[slot] = frozenset(words) | closed_class(language).get(slot, frozenset())
    return GeneratorTable(language, rules, slots)


def english_table(lexicon=None) -> GeneratorTable:
    return make_table(Language.ENGLISH, lexicon)


def urdu_table(lexicon=None) -> GeneratorTable:
    return make_table(Language.URDU, lexicon)


Path = tuple[int, ...]


@dataclass(frozen=True)
class SyntaxTree:
    label: str
    children: tuple["SyntaxTree", ...] = ()
    word: str | None = None
    entity: int | None = None
    # Justifying rule id for internal nodes; not part of structural equality.
    rule: str | None = field(default=None, compare=False)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def at(self, path: Sequence[int]) -> "SyntaxTree":
        node = self
        for i in path:
            node = node.children[i]
        return node

    def has_path(self, path: Sequence[int]) -> bool:
        node = self
        for i in path:
            if not 0 <= i < len(node.children):
                return False
            node = node.children[i]
        return True

    def replace_at(self, path: Sequence[int], new: "SyntaxTree") -> "SyntaxTree":
        if not path:
            return new
        i, rest = path[0], path[1:]
        kids = list(self.children)
        kids[i] = kids[i].replace_at(rest, new)
        return SyntaxTree(self.label, tuple(kids), self.word, self.entity, self.rule)

    def leaves(self, prefix: Path = ()) -> Iterator[tuple[Path, "SyntaxTree"]]:
        if self.is_leaf:
            yield prefix, self
            return
        for i, child in enumerate(self.children):
            yield from child.leaves(prefix + (i,))

    def np_leaves(self) -> Iterator[tuple[Path, "SyntaxTree"]]:
        for path, leaf in self.leaves():
            if leaf.label == NP:
                yield path, leaf

    def with_entity(self, entity: int | None) -> "SyntaxTree":
        return SyntaxTree(self.label, self.children, self.word, entity, self.rule)

    def with_word(self, word: str) -> "SyntaxTree":
        return SyntaxTree(self.label, self.children, word, self.entity, self.rule)

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children)

    def __str__(self) -> str:
        from .formats import serialize_tree
        return serialize_tree(self)


# -- role helpers -----------------------------------------------------------

def roles_of(node: SyntaxTree, table: GeneratorTable) -> dict[str, tuple[int, SyntaxTree]]:
    """Map role name -> (child index, child) for an internal node."""
    gen = table.match(node)
    if gen is None:
        raise SymbolPositionInvalid(f"node {node.label} matches no {table.language.value} rule")
    return {role: (i, node.children[i]) for i, role in enumerate(gen.roles)}


def head_leaf_path(np_node: SyntaxTree, table: GeneratorTable) -> Path:
    """Path from a noun phrase to the leaf naming its entity."""
    path: list[int] = []
    node = np_node
    while not node.is_leaf:
        i, node = roles_of(node, table)["head"]
        path.append(i)
    return tuple(path)


def canonical_child_order(node: SyntaxTree, table: GeneratorTable) -> list[int]:
    """Child indices of ``node`` in English role order."""
    gen = table.match(node)
    if gen is None:
        return list(range(len(node.children)))
    return [gen.index_of(role) for role in canonical_roles(gen.rule_id)]


def text_order(tree: SyntaxTree, table: GeneratorTable) -> list[Path]:
    """NP leaf paths in language-independent text order.

    Children are visited in English role order, so corresponding English and
    Urdu trees list their noun phrases in the same sequence.
    """
    out: list[Path] = []

    def walk(node: SyntaxTree, path: Path) -> None:
        if node.is_leaf:
            if node.label == NP:
                out.append(path)
            return
        for i in canonical_child_order(node, table):
            walk(node.children[i], path + (i,))

    walk(tree, ())
    return out


def subject_position(tree: SyntaxTree, path: Path, table: GeneratorTable) -> bool:
    """Whether the NP leaf at ``path`` fills a clause's subject role directly."""
    if not path:
        return False
    parent = tree.at(path[:-1])
    gen = table.match(parent)
    return gen is not None and gen.roles[path[-1]] == "subject"


# -- derivations ------------------------------------------------------------

class _Live:
    __slots__ = ("label", "children", "word", "entity", "rule")

    def __init__(self, label: str):
        self.label = label
        self.children: list[_Live] | None = None
        self.word: str | None = None
        self.entity: int | None = None
        self.rule: str | None = None

    def frontier(self) -> Iterator["_Live"]:
        if self.children is None:
            yield self
            return
        for c in self.children:
            yield from c.frontier()

    def freeze(self) -> SyntaxTree:
        kids = tuple(c.freeze() for c in self.children or ())
        return SyntaxTree(self.label, kids, self.word, self.entity, self.rule)


LexicalChoice = Union[str, tuple[str, int]]


def derive(
    table: GeneratorTable,
    derivation: Sequence[tuple[str, int]],
    lexical_choices: Mapping[int, LexicalChoice],
) -> SyntaxTree:
    """Replay a derivation from ``S`` and lexicalise the resulting frontier.

    Each step names a rule and the position of the symbol it rewrites among
    the live (unexpanded) symbols, counted left to right.  ``lexical_choices``
    then maps every position of the final frontier to a word; noun phrases may
    be given as ``(word, entity)``, otherwise entity indices are allocated in
    left-to-right order and relative pronouns take their antecedent's index.
    """
    root = _Live(S)
    for step, (rule_id, pos) in enumerate(derivation):
        gen = table.rule(rule_id)
        live = list(root.frontier())
        if not 0 <= pos < len(live):
            raise SymbolPositionInvalid(
                f"step {step}: position {pos} out of range ({len(live)} live symbols)")
        node = live[pos]
        if node.label != gen.lhs:
            raise SymbolPositionInvalid(
                f"step {step}: symbol at position {pos} is {node.label}, {rule_id} rewrites {gen.lhs}")
        node.children = [_Live(sym) for sym in gen.rhs]
        node.rule = rule_id

    live = list(root.frontier())
    extra = set(lexical_choices) - set(range(len(live)))
    if extra:
        raise SymbolPositionInvalid(f"lexical choices for absent positions {sorted(extra)}")
    explicit: list[int] = []
    for i, node in enumerate(live):
        if node.label not in SLOTS:
            raise SymbolPositionInvalid(f"live symbol {node.label} at position {i} was never resolved")
        if i not in lexical_choices:
            raise SymbolPositionInvalid(f"no word for {node.label} at position {i}")
        choice = lexical_choices[i]
        word, entity = (choice, None) if isinstance(choice, str) else choice
        if not table.permits(node.label, word):
            raise VocabularyViolation(f"{word!r} is not a {table.language.value} {node.label}")
        node.word = word
        node.children = []
        if node.label == NP:
            node.entity = entity
            if entity is not None:
                explicit.append(entity)

    tree = root.freeze()
    return assign_entities(tree, table, start=max(explicit, default=0) + 1)


def assign_entities(tree: SyntaxTree, table: GeneratorTable, start: int = 1) -> SyntaxTree:
    """Fill missing NP entity indices left to right.

    Relative pronouns without an index inherit the index of the noun phrase
    their clause modifies.
    """
    counter = [start]
    rel = RELATIVE_PRONOUN[table.language]

    def walk(node: SyntaxTree, antecedent: int | None) -> SyntaxTree:
        if node.is_leaf:
            if node.label != NP or node.entity is not None:
                return node
            if node.word == rel and antecedent is not None:
                return node.with_entity(antecedent)
            counter[0] += 1
            return node.with_entity(counter[0] - 1)
        gen = table.match(node)
        kids = list(node.children)
        if gen is not None and gen.rule_id == "Relative":
            hi, ci = gen.index_of("head"), gen.index_of("clause")
            kids[hi] = walk(kids[hi], None)
            head_entity = kids[hi].at(head_leaf_path(kids[hi], table)).entity
            kids[ci] = walk(kids[ci], head_entity)
        else:
            order = canonical_child_order(node, table) if gen else range(len(kids))
            for i in order:
                kids[i] = walk(kids[i], antecedent if _passes_antecedent(gen, i) else None)
        return SyntaxTree(node.label, tuple(kids), node.word, node.entity,
                          node.rule or (gen.rule_id if gen else None))

    return walk(tree, None)


def _passes_antecedent(gen: Generator | None, child: int) -> bool:
    # The relative pronoun is the subject of the clause directly below Relative.
    return gen is not None and gen.lhs == S and gen.roles[child] == "subject"


# -- validation -------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    path: Path
    message: str

    def __str__(self) -> str:
        where = ".".join(map(str, self.path)) or "<root>"
        return f"at {where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(str(v) for v in self.violations)


def validate(tree: SyntaxTree, table: GeneratorTable) -> ValidationReport:
    """Check ``tree`` against ``table``; violations are listed in pre-order."""
    problems: list[Violation] = []
    lang = table.language
    rel = RELATIVE_PRONOUN[lang]
    rel_slots: set[Path] = set()

    if tree.label != S:
        problems.append(Violation((), f"root must be S, not {tree.label}"))

    def walk(node: SyntaxTree, path: Path) -> None:
        if node.is_leaf:
            _check_leaf(node, path)
            return
        gen = table.match(node)
        if gen is None:
            shape = " . ".join(c.label for c in node.children)
            problems.append(Violation(path, f"no {lang.value} rule {node.label} -> {shape}"))
        else:
            if node.rule is not None and node.rule != gen.rule_id:
                problems.append(Violation(path, f"recorded rule {node.rule} but shape is {gen.rule_id}"))
            if gen.rule_id == "Relative":
                _check_relative(node, path, gen)
        for i, child in enumerate(node.children):
            walk(child, path + (i,))

    def _check_relative(node: SyntaxTree, path: Path, gen: Generator) -> None:
        hi, ci = gen.index_of("head"), gen.index_of("clause")
        clause = node.children[ci]
        cgen = table.match(clause)
        if cgen is None or cgen.rule_id not in SUBJECT_RULES:
            problems.append(Violation(path + (ci,), "relative clause needs a subject"))
            return
        si = cgen.index_of("subject")
        subj = clause.children[si]
        if not (subj.is_leaf and subj.word == rel):
            problems.append(Violation(path + (ci, si), f"relative clause subject must be {rel!r}"))
            return
        rel_slots.add(path + (ci, si))
        try:
            head = node.children[hi]
            head_entity = head.at(head_leaf_path(head, table)).entity
        except Exception:
            return
        if subj.entity != head_entity:
            problems.append(Violation(path + (ci, si), "relative pronoun must share its antecedent's entity"))

    def _check_leaf(node: SyntaxTree, path: Path) -> None:
        if node.label not in SLOTS:
            problems.append(Violation(path, f"{node.label} cannot be a leaf"))
            return
        if node.word is None:
            problems.append(Violation(path, f"unresolved {node.label}"))
            return
        if node.label == NP:
            if node.entity is None or node.entity < 1:
                problems.append(Violation(path, "noun phrase without a positive entity index"))
            if node.word == rel and path not in rel_slots:
                problems.append(Violation(path, f"{rel!r} outside a relative clause"))
        elif node.entity is not None:
            problems.append(Violation(path, f"entity index on non-noun {node.label}"))
        if not table.permits(node.label, node.word):
            problems.append(Violation(path, f"{node.word!r} is not a {lang.value} {node.label}"))

    walk(tree, ())
    return ValidationReport(tuple(problems))


def annotate(tree: SyntaxTree, table: GeneratorTable) -> SyntaxTree:
    """Record the justifying rule id on every internal node that has one."""
    if tree.is_leaf:
        return tree
    gen = table.match(tree)
    kids = tuple(annotate(c, table) for c in tree.children)
    return SyntaxTree(tree.label, kids, tree.word, tree.entity, gen.rule_id if gen else None)


def linearize(tree: SyntaxTree) -> str:
    words = []
    for path, leaf in tree.leaves():
        if leaf.word is None:
            where = ".".join(map(str, path)) or "<root>"
            raise NonTerminalLeaf(f"{leaf.label} at {where} has no word")
        words.append(leaf.word)
    return " ".join(words)
