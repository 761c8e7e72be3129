import json
from pathlib import Path

import numpy as np
import pytest

from scalingpath.grids import fibonacci_s2, lift_p
from scalingpath.measures import DiscreteMeasure
from scalingpath.relu import Dataset


@pytest.fixture(scope="session")
def tiny_data():
    """Four well-separated samples, labels +-1; keeps solver tests fast."""
    x = [[-0.6, -0.4], [0.5, -0.55], [-0.45, 0.5], [0.6, 0.35]]
    return Dataset(x_tilde=np.array(x), y=np.array([1.0, -1.0, -1.0, 1.0]), name="tiny4")


@pytest.fixture(scope="session")
def p24():
    return lift_p(fibonacci_s2(12))


def rand_measure(grid, rng, scale=1.0):
    return DiscreteMeasure(grid, rng.uniform(0.0, scale, size=len(grid)))


def write_dataset(path: Path, samples) -> str:
    payload = {
        "name": path.stem,
        "synthetic": True,
        "samples": [{"x": list(x), "y": y} for x, y in samples],
    }
    path.write_text(json.dumps(payload))
    return str(path)
