from pathlib import Path

import pytest

from core.models import FamilyDecl, FamilyRole
from families.base import FamilyTable, build_family, default_family_table

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture
def families() -> FamilyTable:
    return default_family_table()


@pytest.fixture
def pell_families() -> FamilyTable:
    """U, V, W with p=2, q=-1 (Pell numbers)"""
    return default_family_table(2, -1)


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS_DIR


def gibonacci(name: str = "G") -> FamilyTable:
    return FamilyTable([build_family(FamilyDecl(name=name, role=FamilyRole.GIBONACCI))])


def write_corpus(directory: Path, name: str, text: str) -> Path:
    path = directory / name
    path.write_text(text, encoding="utf-8")
    return path
