"""Bidirectional English/Urdu word list keyed by part of speech."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable

from .errors import MissingDictionaryEntry
from .grammar import (
    COPULA_WORD,
    NP,
    OBJECT_PRONOUN,
    RELATIVE_PRONOUN,
    SUBJECT_PRONOUN,
    COP,
    Language,
    PartOfSpeech,
)


@dataclass(frozen=True)
class LexEntry:
    english: str
    urdu: str
    pos: PartOfSpeech

    def word(self, language: Language) -> str:
        return self.english if language is Language.ENGLISH else self.urdu


def _closed_pairs() -> list[tuple[str, str, str]]:
    en, ur = Language.ENGLISH, Language.URDU
    return [
        (SUBJECT_PRONOUN[en], SUBJECT_PRONOUN[ur], NP),
        (OBJECT_PRONOUN[en], OBJECT_PRONOUN[ur], NP),
        (RELATIVE_PRONOUN[en], RELATIVE_PRONOUN[ur], NP),
        (COPULA_WORD[en], COPULA_WORD[ur], COP),
    ]


@dataclass(frozen=True)
class Lexicon:
    """A set of (english, urdu, POS) entries.

    Within each preterminal slot the relation must be a bijection, which is
    what makes tree translation an involution.  Pronouns, the relative
    pronoun and the copula are always present.
    """

    entries: tuple[LexEntry, ...] = ()
    _maps: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        fwd: dict[tuple[str, str], str] = {}
        back: dict[tuple[str, str], str] = {}
        pairs = [(e.english, e.urdu, e.pos.slot) for e in self.entries] + _closed_pairs()
        for en, ur, slot in pairs:
            if fwd.get((slot, en), ur) != ur or back.get((slot, ur), en) != en:
                raise ValueError(f"lexicon is not a bijection on {slot}: {en!r} <-> {ur!r}")
            fwd[(slot, en)] = ur
            back[(slot, ur)] = en
        self._maps[Language.ENGLISH] = fwd
        self._maps[Language.URDU] = back

    @classmethod
    def of(cls, rows: Iterable[tuple[str, str, str | PartOfSpeech]]) -> "Lexicon":
        return cls(tuple(LexEntry(en, ur, PartOfSpeech(pos)) for en, ur, pos in rows))

    def translate(self, word: str, slot: str, source: Language) -> str:
        try:
            return self._maps[source][(slot, word)]
        except KeyError:
            raise MissingDictionaryEntry(
                f"no {source.other.value} translation for {source.value} {slot} {word!r}") from None

    def covers(self, word: str, slot: str, language: Language) -> bool:
        return (slot, word) in self._maps[language]

    def vocabulary(self, language: Language, slot: str) -> set[str]:
        """Open-class words of ``language`` admitted in ``slot`` (no closed-class words)."""
        return {e.word(language) for e in self.entries if e.pos.slot == slot}

    def words(self, language: Language, pos: PartOfSpeech) -> list[str]:
        seen: dict[str, None] = {}
        for e in self.entries:
            if e.pos is pos:
                seen.setdefault(e.word(language), None)
        return list(seen)

    def __len__(self) -> int:
        return len(self.entries)


@lru_cache(maxsize=1)
def default_lexicon() -> Lexicon:
    """The shipped fixture vocabulary (running-example words plus fillers)."""
    from .formats import parse_lexicon

    text = resources.files("textcirc.data").joinpath("lexicon.tsv").read_text(encoding="utf-8")
    return parse_lexicon(text)
