from pathlib import Path

import pytest

from textcirc.formats import parse_hybrid_text, parse_lexicon, parse_tree

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="session")
def lexicon():
    return parse_lexicon((FIXTURES / "lex.tsv").read_text(encoding="utf-8"))


def load_text(name: str):
    return parse_hybrid_text((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def john_en():
    return load_text("john_en.txt")


@pytest.fixture
def john_ur():
    return load_text("john_ur.txt")


@pytest.fixture
def student_en():
    return load_text("student_en.txt")


@pytest.fixture
def student_ur():
    return load_text("student_ur.txt")


@pytest.fixture
def reads_tree():
    return parse_tree("(S (NP#1 John) (TVP reads) (NP#2 books))")
