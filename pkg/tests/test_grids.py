import numpy as np
import pytest

from scalingpath.grids import SphereGrid, fibonacci_s2, lift_p, lift_q


def test_fibonacci_single_point_is_equatorial():
    g = fibonacci_s2(1)
    assert len(g) == 1
    # z_0 = 1 - 1/1 = 0
    assert g.points[0, 2] == pytest.approx(0.0, abs=1e-15)


def test_fibonacci_two_points_z_coords():
    g = fibonacci_s2(2)
    # z_0 = 1 - 1/2, z_1 = 1 - 3/2
    assert sorted(g.points[:, 2]) == pytest.approx([-0.5, 0.5])


def test_fibonacci_unit_norm_and_determinism():
    for n in (1, 2, 17, 144, 576):
        g = fibonacci_s2(n)
        assert np.max(np.abs(np.linalg.norm(g.points, axis=1) - 1.0)) <= 1e-12
    a = fibonacci_s2(233)
    b = fibonacci_s2(233)
    assert a.points.tobytes() == b.points.tobytes()


def test_fibonacci_rejects_zero():
    with pytest.raises(ValueError):
        fibonacci_s2(0)


def test_fibonacci_quasi_uniform():
    # nearest-neighbor geodesic spread stays bounded for n >= 100
    for n in (100, 576):
        g = fibonacci_s2(n)
        gram = g.gram()
        np.fill_diagonal(gram, -1.0)
        nn = np.arccos(np.clip(np.max(gram, axis=1), -1.0, 1.0))
        assert np.max(nn) / np.min(nn) <= 4.0


def test_lift_p_structure():
    f = fibonacci_s2(4)
    p = lift_p(f)
    assert len(p) == 8
    assert p.label == "P"
    s = 1.0 / np.sqrt(2.0)
    assert np.max(np.abs(np.abs(p.points[:, 0]) - s)) <= 1e-15
    assert np.max(np.abs(np.linalg.norm(p.points[:, 1:], axis=1) - s)) <= 1e-12
    assert np.max(np.abs(np.linalg.norm(p.points, axis=1) - 1.0)) <= 1e-12
    # the +- pair over each hidden direction sits at consecutive rows
    assert np.all(p.points[0::2, 1:] == p.points[1::2, 1:])
    assert np.all(p.points[0::2, 0] == -p.points[1::2, 0])


def test_lift_p_example_point():
    f = SphereGrid(points=np.array([[0.0, 0.0, 1.0]]), label="F")
    p = lift_p(f)
    s = 1.0 / np.sqrt(2.0)
    assert p.points[0] == pytest.approx([s, 0.0, 0.0, s])
    assert p.points[1] == pytest.approx([-s, 0.0, 0.0, s])


def test_lift_q_structure():
    f = fibonacci_s2(10)
    q = lift_q(f)
    assert len(q) == 180
    assert q.label == "Q"
    assert np.max(np.abs(np.linalg.norm(q.points, axis=1) - 1.0)) <= 1e-12


def test_lift_q_contains_p_slice_exactly():
    f = fibonacci_s2(7)
    p = lift_p(f)
    q = lift_q(f)
    # k runs 1..9, so k = 7 occupies block index 6
    block = q.points[6 * len(p) : 7 * len(p)]
    assert block.tobytes() == p.points.tobytes()


def test_grid_rejects_non_unit_points():
    with pytest.raises(ValueError):
        SphereGrid(points=np.array([[1.0, 1.0, 0.0]]))


def test_grid_csv_roundtrip(tmp_path):
    g = fibonacci_s2(37)
    path = tmp_path / "grid.csv"
    g.to_csv(path)
    back = SphereGrid.from_csv(path, label="F")
    assert back.points.tobytes() == g.points.tobytes()


def test_nearest_picks_the_matching_node():
    g = fibonacci_s2(144)
    idx = g.nearest(g.points)
    assert np.all(idx == np.arange(144))
