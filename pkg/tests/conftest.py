import json
from pathlib import Path

import pytest

from ksnc import ceg18, enumerate_vertices
from ksnc.document import bundled

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def h18():
    return ceg18()


@pytest.fixture(scope="session")
def vertices18(h18):
    return enumerate_vertices(h18)


@pytest.fixture(scope="session")
def rays18(h18):
    return bundled("ceg18-with-rays").realization(h18)


@pytest.fixture(scope="session")
def oracle18():
    return json.loads((FIXTURES / "ceg18_oracle.json").read_text())


@pytest.fixture(scope="session")
def z_printed():
    rows = (FIXTURES / "ceg18_z.txt").read_text().split("\n")
    return [[int(x) for x in r.split()] for r in rows if r.strip()]
