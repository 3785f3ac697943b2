import pathlib

import pytest

from adjlang import frontend as F

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS


@pytest.fixture(scope="session")
def corpus_programs():
    out = {}
    for path in sorted(CORPUS.glob("*.adj")):
        out[path.name] = F.parse_program(path.read_text(), str(path))
    return out


def parse(src: str):
    return F.parse_program(src, "<test>")
