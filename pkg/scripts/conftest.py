import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT / 'src'))

from canonical.filtration import Filtration
from canonical.group import EndoSpec, GroupSpec
from canonical.maps import CanonicalMap
from cli.spec_loader import load_and_validate
from exactla.matrices import IntegerMatrix

SPEC_DIR = ROOT / 'config' / 'specs'

A_ROWS = [
    [-1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1],
    [0, -1, 1, 1, 1],
]


def b_rows(k):
    return [
        [k, 0, 0, 0, 0],
        [0, -1, 1, 1, 0],
        [0, 0, 0, -1, 1],
        [0, 0, -1, 1, 0],
        [0, -1, 1, 0, 0],
    ]


@pytest.fixture
def spec_path():
    """Path of a bundled spec file by name."""
    return lambda name: SPEC_DIR / f'{name}.json'


@pytest.fixture
def load_spec():
    """Load and validate a bundled spec with parameter overrides."""
    def load(name, **params):
        return load_and_validate(SPEC_DIR / f'{name}.json', {k: str(v) for k, v in params.items()})
    return load


@pytest.fixture
def matrix_A():
    return IntegerMatrix.from_rows(A_ROWS)


@pytest.fixture
def matrix_B():
    return lambda k: IntegerMatrix.from_rows(b_rows(k))


@pytest.fixture
def circle_map():
    """The circle group Z acting on R by translation, with the endomorphism z -> z^d and lift x -> d x."""
    def build(degree):
        filtration = Filtration((1,))
        z = CanonicalMap.translation(filtration, [[1]])
        group = GroupSpec(filtration, {'z': z}, [['z']], name='circle')
        lift = CanonicalMap.from_levels(filtration, [IntegerMatrix.from_rows([[degree]])])
        image = CanonicalMap.translation(filtration, [[degree]])
        return group, EndoSpec(lift, {'z': image}, name=f'degree {degree}')
    return build
