"""Readers and writers for the on-disk formats.

* bracketed trees: ``(S (NP#1 John) (TVP reads) (NP#2 books))``; multiword
  terminals are double-quoted, ``#k`` on an NP leaf is its entity index;
* hybrid texts: one bracketed sentence per line, ``@link`` lines for
  pronominal links, optional ``@lang`` header, ``#`` comments;
* lexicons: ``english<TAB>urdu<TAB>POS`` per line;
* circuits: JSON with ``wires`` and nested ``elements``.
"""

from __future__ import annotations

import json
import re
from typing import Iterator

from .circuit import ConjBox, Element, Gate, ModifierBox, TextCircuit, GATE_KINDS, MODIFIER_KINDS
from .errors import BadEntityIndex, FormatError, LexError, UnbalancedParens
from .grammar import NP, Language, PartOfSpeech, SyntaxTree
from .hybrid import HybridText, NpOccurrence, PronominalLink, Surface, make_text
from .lexicon import LexEntry, Lexicon

# -- trees ------------------------------------------------------------------

_TOKEN = re.compile(r'\s+|(?P<open>\()|(?P<close>\))|(?P<str>"(?:[^"\\\n]|\\.)*")|(?P<atom>[^\s()"]+)')


def _tokens(text: str, line0: int = 1) -> Iterator[tuple[str, str, int, int]]:
    line, start = line0, 0
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        col = i - start + 1
        if m is None:
            raise LexError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        if kind == "str":
            yield "word", re.sub(r"\\(.)", r"\1", m.group()[1:-1]), line, col
        elif kind is not None:
            yield kind, m.group(), line, col
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            start = i + chunk.rindex("\n") + 1
        i = m.end()


def parse_tree(text: str, line: int = 1) -> SyntaxTree:
    """Parse one bracketed tree; positions in errors are 1-based line:col."""
    toks = list(_tokens(text, line))
    if not toks:
        raise FormatError("empty input", line, 1)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def node() -> SyntaxTree:
        nonlocal pos
        tok = peek()
        if tok is None:
            raise UnbalancedParens("input ended inside a node", *_end())
        kind, value, ln, col = tok
        if kind != "open":
            raise LexError(f"expected '(' but found {value!r}", ln, col)
        pos += 1
        tok = peek()
        if tok is None:
            raise UnbalancedParens("input ended after '('", ln, col)
        kind, value, ln, col = tok
        if kind != "atom":
            raise LexError(f"expected a label, found {value!r}", ln, col)
        pos += 1
        label, entity = _label(value, ln, col)
        children = []
        word = None
        while True:
            tok = peek()
            if tok is None:
                raise UnbalancedParens(f"unclosed ({label}", *_end())
            kind, value, ln, col = tok
            if kind == "close":
                pos += 1
                break
            if kind == "open":
                if word is not None:
                    raise LexError("a node holds either a word or children", ln, col)
                children.append(node())
            else:
                if children or word is not None:
                    raise LexError(f"unexpected token {value!r}", ln, col)
                word = value
                pos += 1
        if not children and word is None:
            raise LexError(f"empty node ({label})", ln, col)
        if entity is not None and children:
            raise BadEntityIndex("entity index on an internal node", ln, col)
        return SyntaxTree(label, tuple(children), word, entity)

    def _end():
        if toks:
            return toks[-1][2], toks[-1][3]
        return line, 1

    tree = node()
    if pos != len(toks):
        kind, value, ln, col = toks[pos]
        if kind == "close":
            raise UnbalancedParens("unmatched ')'", ln, col)
        raise LexError(f"trailing input {value!r}", ln, col)
    return tree


def _label(value: str, line: int, col: int) -> tuple[str, int | None]:
    if "#" not in value:
        return value, None
    label, _, idx = value.partition("#")
    if label != NP:
        raise BadEntityIndex(f"only NP leaves carry entity indices, not {label}", line, col)
    if not idx.isdigit() or int(idx) < 1:
        raise BadEntityIndex(f"entity index must be a positive integer, got {idx!r}", line, col)
    return label, int(idx)


_BARE = re.compile(r'^[^\s()"\\#@]+$')


def _word_token(word: str) -> str:
    if _BARE.match(word):
        return word
    return '"' + word.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_tree(tree: SyntaxTree) -> str:
    if tree.is_leaf:
        idx = f"#{tree.entity}" if tree.entity is not None else ""
        return f"({tree.label}{idx} {_word_token(tree.word or '')})"
    return f"({tree.label} " + " ".join(serialize_tree(c) for c in tree.children) + ")"


# -- hybrid texts -----------------------------------------------------------

_LINK = re.compile(r"^@link\s+(?P<body>.*)$")


def _occurrence(value: str, line: int) -> NpOccurrence:
    s, sep, p = value.partition(":")
    if not sep or not s.isdigit():
        raise FormatError(f"bad occurrence {value!r}, expected <sentence>:<path>", line, 1)
    parts = p.split(".") if p else []
    if not all(x.isdigit() for x in parts):
        raise FormatError(f"bad path {p!r}", line, 1)
    return NpOccurrence(int(s), tuple(int(x) for x in parts))


def parse_hybrid_text(text: str, language: Language | str | None = None) -> HybridText:
    sentences = []
    links = []
    declared = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@lang"):
            try:
                declared = Language.parse(line[len("@lang"):])
            except ValueError as exc:
                raise FormatError(str(exc), ln, 1) from None
            continue
        m = _LINK.match(line)
        if m:
            fields = dict(kv.split("=", 1) for kv in m.group("body").split() if "=" in kv)
            try:
                links.append(PronominalLink(
                    _occurrence(fields["referent"], ln),
                    _occurrence(fields["anaphor"], ln),
                    Surface(fields.get("surface", "repeated_noun"))))
            except KeyError as exc:
                raise FormatError(f"@link is missing {exc.args[0]}=", ln, 1) from None
            except ValueError as exc:
                if isinstance(exc, FormatError):
                    raise
                raise FormatError(str(exc), ln, 1) from None
            continue
        if line.startswith("@"):
            raise LexError(f"unknown directive {line.split()[0]}", ln, 1)
        sentences.append(parse_tree(raw, ln))
    if language is not None:
        language = Language.parse(language)
        if declared is not None and declared is not language:
            raise FormatError(f"file declares @lang {declared.value}, expected {language.value}")
    lang = language or declared or Language.ENGLISH
    return make_text(lang, sentences, links)


def serialize_hybrid_text(text: HybridText) -> str:
    lines = [f"@lang {text.language.value}"]
    lines += [serialize_tree(t) for t in text.sentences]
    for l in text.links:
        lines.append(f"@link referent={l.referent} anaphor={l.anaphor} surface={l.surface.value}")
    return "\n".join(lines) + "\n"


# -- lexicons ---------------------------------------------------------------

def parse_lexicon(text: str) -> Lexicon:
    entries = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 3:
            raise FormatError(f"expected 3 tab-separated fields, got {len(parts)}", ln, 1)
        en, ur, pos = (p.strip() for p in parts)
        try:
            entries.append(LexEntry(en, ur, PartOfSpeech(pos)))
        except ValueError:
            raise FormatError(f"unknown part of speech {pos!r}", ln, 1) from None
    try:
        return Lexicon(tuple(entries))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def serialize_lexicon(lexicon: Lexicon) -> str:
    out = ["# english\turdu\tPOS"]
    out += [f"{e.english}\t{e.urdu}\t{e.pos.value}" for e in lexicon.entries]
    return "\n".join(out) + "\n"


# -- circuits ---------------------------------------------------------------

def circuit_document(circuit: TextCircuit) -> dict:
    def el(e: Element) -> dict:
        doc = {"kind": e.kind, "label": e.label, "wires": list(e.wires)}
        if isinstance(e, ModifierBox):
            doc["contents"] = el(e.contents)
        elif isinstance(e, ConjBox):
            for side, sub in (("left", e.left), ("right", e.right)):
                doc[side] = {"wires": list(sub.wire_ids), "elements": [el(x) for x in sub.elements]}
        return doc

    return {"wires": [[i, n] for i, n in circuit.wires], "elements": [el(e) for e in circuit.elements]}


def serialize_circuit(circuit: TextCircuit) -> str:
    return json.dumps(circuit_document(circuit), ensure_ascii=False, indent=2) + "\n"


def circuit_from_document(doc: dict) -> TextCircuit:
    try:
        nouns = {int(i): str(n) for i, n in doc["wires"]}

        def el(d: dict) -> Element:
            kind = d["kind"]
            wires = tuple(int(w) for w in d["wires"])
            if kind in GATE_KINDS:
                return Gate(kind, d["label"], wires)
            if kind in MODIFIER_KINDS:
                return ModifierBox(kind, d["label"], wires, el(d["contents"]))
            if kind == "conjunction":
                return ConjBox(d["label"], sub(d["left"]), sub(d["right"]))
            raise FormatError(f"unknown element kind {kind!r}")

        def sub(d: dict) -> TextCircuit:
            return TextCircuit(tuple((int(w), nouns[int(w)]) for w in d["wires"]),
                               tuple(el(x) for x in d["elements"]))

        return TextCircuit(tuple(nouns.items()), tuple(el(x) for x in doc["elements"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed circuit: {exc!r}") from None


def parse_circuit(text: str) -> TextCircuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno) from None
    return circuit_from_document(doc)
