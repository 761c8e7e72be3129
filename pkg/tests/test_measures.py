import numpy as np
import pytest

from scalingpath.grids import SphereGrid, fibonacci_s2, lift_p
from scalingpath.measures import (
    DiscreteMeasure,
    ParamAtom,
    pi2_project,
    scale_mass,
    total_variation,
    uniform_on,
)


def test_uniform_weights_and_mass(p24):
    m = uniform_on(p24, 1.0)
    assert np.all(m.weights == 1.0 / len(p24))
    assert m.total_variation == pytest.approx(1.0)
    assert uniform_on(p24, 0.0).total_variation == 0.0
    assert uniform_on(p24, 3.5).total_variation == pytest.approx(3.5)


def test_negative_weights_rejected(p24):
    w = np.zeros(len(p24))
    w[0] = -1e-9
    with pytest.raises(ValueError):
        DiscreteMeasure(grid=p24, weights=w)


def test_scale_mass_identity_and_zero(p24):
    rng = np.random.default_rng(3)
    m = DiscreteMeasure(p24, rng.uniform(size=len(p24)))
    assert np.all(scale_mass(m, 1.0).weights == m.weights)
    assert scale_mass(m, 0.0).total_variation == 0.0
    assert total_variation(scale_mass(m, 2.5)) == pytest.approx(2.5 * m.total_variation)


def test_pi2_atom_squared_norm():
    grid = SphereGrid(points=np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]))
    m = pi2_project([ParamAtom(w1=2.0, w2=(0.0, 0.0, 0.0), mass=1.0)], grid)
    assert m.weights[0] == pytest.approx(4.0)
    assert m.weights[1] == 0.0


def test_pi2_origin_atom_vanishes():
    grid = SphereGrid(points=np.array([[1.0, 0.0, 0.0, 0.0]]))
    m = pi2_project([ParamAtom(w1=0.0, w2=(0.0, 0.0, 0.0), mass=5.0)], grid)
    assert m.total_variation == 0.0


def test_pi2_same_direction_adds():
    grid = SphereGrid(points=np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]]))
    atoms = [
        ParamAtom(w1=2.0, w2=(0.0, 0.0, 0.0), mass=0.5),
        ParamAtom(w1=3.0, w2=(0.0, 0.0, 0.0), mass=1.0),
    ]
    m = pi2_project(atoms, grid)
    assert m.weights[0] == pytest.approx(0.5 * 4.0 + 1.0 * 9.0)


def test_pi2_mass_identity_exact(p24):
    rng = np.random.default_rng(11)
    vecs = rng.normal(size=(40, 4))
    masses = rng.uniform(0.1, 2.0, size=40)
    m = pi2_project((vecs, masses), p24)
    expected = float(np.sum(masses * np.sum(vecs * vecs, axis=1)))
    assert m.total_variation == pytest.approx(expected, rel=1e-14)


def test_pi2_scaling_law_exact(p24):
    rng = np.random.default_rng(12)
    vecs = rng.normal(size=(25, 4))
    masses = rng.uniform(0.1, 1.0, size=25)
    base = pi2_project((vecs, masses), p24)
    for alpha in (0.5, 2.0, 7.0):
        scaled = pi2_project((alpha * vecs, masses), p24)
        assert np.allclose(scaled.weights, alpha**2 * base.weights, rtol=1e-13, atol=0.0)


def test_measure_csv_roundtrip(tmp_path, p24):
    rng = np.random.default_rng(4)
    w = rng.uniform(size=len(p24))
    w[::3] = 0.0
    m = DiscreteMeasure(p24, w)
    path = tmp_path / "m.csv"
    m.to_csv(path)
    back = DiscreteMeasure.from_csv(path, p24)
    assert np.all(back.weights == m.weights)


def test_from_csv_rejects_foreign_grid(tmp_path):
    g = lift_p(fibonacci_s2(3))
    m = uniform_on(g, 1.0)
    path = tmp_path / "m.csv"
    m.to_csv(path)
    smaller = lift_p(fibonacci_s2(2))
    with pytest.raises(IndexError):
        DiscreteMeasure.from_csv(path, smaller)
