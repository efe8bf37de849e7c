import json
from pathlib import Path

import pytest

from hallbound import families, groups

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> dict:
    with open(FIXTURES / name, "r", encoding="utf-8") as fh:
        return json.load(fh)


# Groups are immutable, so building each once per session is safe.


@pytest.fixture(scope="session")
def s3():
    return groups.group_from_generators(["(1 2 3)", "(1 2)"], degree=3, name="S3")


@pytest.fixture(scope="session")
def d4():
    return families.dihedral(4)


@pytest.fixture(scope="session")
def q8():
    return families.quaternion(8)


@pytest.fixture(scope="session")
def q16():
    return families.quaternion(16)


@pytest.fixture(scope="session")
def klein():
    return groups.group_from_generators(["(1 2)(3 4)", "(1 3)(2 4)"], degree=4, name="V4")


@pytest.fixture(scope="session")
def heis3():
    return families.heisenberg(3)


@pytest.fixture(scope="session")
def ut42():
    return families.unitriangular(4, 2)
