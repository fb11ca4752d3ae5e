import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffuse_poisson.charges import (
    ChargeSet,
    PointCharge,
    boundary_potential,
    greens_gradient,
    greens_potential,
    load_charges,
    regularized_source,
    save_charges,
    trilinear_source,
    trilinear_weights,
)
from diffuse_poisson.dielectric import TanhSphericalDielectric
from diffuse_poisson.errors import ConfigError, SingularEvaluationError
from diffuse_poisson.grid import make_grid, benchmark_grid

UNIT = ChargeSet.single(1.0)
RAW = TanhSphericalDielectric()


def test_greens_potential_examples():
    assert greens_potential(UNIT, 1.0, [1, 0, 0]) == pytest.approx(1.0)
    assert greens_potential(UNIT, 1.0, [0, 0, 2]) == pytest.approx(0.5)
    pair = ChargeSet([PointCharge((0.5, 0, 0), 1.0), PointCharge((-0.5, 0, 0), 1.0)])
    assert greens_potential(pair, 2.0, [0, 0, 0]) == pytest.approx(2.0)


def test_greens_gradient_examples():
    np.testing.assert_allclose(greens_gradient(UNIT, 1.0, [1, 0, 0]), [-1, 0, 0])
    np.testing.assert_allclose(greens_gradient(UNIT, 1.0, [0, 2, 0]), [0, -0.25, 0])


def test_singular_evaluation():
    with pytest.raises(SingularEvaluationError):
        greens_potential(UNIT, 1.0, [0, 0, 0])
    with pytest.raises(SingularEvaluationError):
        greens_gradient(UNIT, 1.0, np.zeros((2, 3)))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    charges = ChargeSet([PointCharge(tuple(rng.uniform(-1, 1, 3)), q) for q in (1.0, -0.7, 2.5)])
    pts = rng.uniform(-6, 6, size=(400, 3))
    dist = np.min(np.linalg.norm(pts[:, None, :] - charges.positions[None], axis=-1), axis=1)
    pts = pts[dist >= 0.5]
    d = 1e-5
    fd = np.empty_like(pts)
    for a in range(3):
        e = np.zeros(3)
        e[a] = d
        fd[:, a] = (greens_potential(charges, 1.5, pts + e) - greens_potential(charges, 1.5, pts - e)) / (2 * d)
    exact = greens_gradient(charges, 1.5, pts)
    rel = np.linalg.norm(fd - exact, axis=1) / np.linalg.norm(exact, axis=1)
    assert rel.max() <= 1e-6


def test_superposition():
    a, b = PointCharge((0.3, -0.2, 0.1), 1.3), PointCharge((-0.4, 0.5, 0.0), -0.8)
    pts = np.random.default_rng(2).uniform(-5, 5, size=(100, 3))
    both = greens_potential(ChargeSet([a, b]), 2.0, pts)
    single = greens_potential(ChargeSet([a]), 2.0, pts) + greens_potential(ChargeSet([b]), 2.0, pts)
    np.testing.assert_allclose(both, single, rtol=1e-15, atol=0)


def test_green_is_discretely_harmonic_away_from_charge():
    errs = []
    for n in (41, 81):
        g = make_grid((-2.0, -2.0, -2.0), 4.0, n)
        G = greens_potential(UNIT, 1.0, g.points() + 1e-3)  # keep the origin off the nodes
        lap = (
            G[2:, 1:-1, 1:-1] + G[:-2, 1:-1, 1:-1] + G[1:-1, 2:, 1:-1] + G[1:-1, :-2, 1:-1]
            + G[1:-1, 1:-1, 2:] + G[1:-1, 1:-1, :-2] - 6 * G[1:-1, 1:-1, 1:-1]
        ) / g.spacing**2
        rad = g.radius((-1e-3,) * 3)[1:-1, 1:-1, 1:-1]
        errs.append(np.abs(lap[rad >= 1.0]).max())
    assert errs[1] < errs[0] / 3.5


def test_boundary_potential_examples():
    assert boundary_potential(UNIT, 80.0, [10, 0, 0]) == pytest.approx(1.25e-3)
    assert boundary_potential(UNIT, 80.0, [10, 10, 10]) == pytest.approx(7.2168783648703e-4)
    pts = np.array([[10, 3, -2], [-10, 10, 4.5]])
    np.testing.assert_allclose(boundary_potential(UNIT, 1.0, pts), greens_potential(UNIT, 1.0, pts))


def test_regularized_source_examples():
    g = make_grid((-10, -10, -10), 20.0, 41)  # h = 0.5, node at (3.5, 0, 0)
    f = regularized_source(UNIT, RAW, g)
    assert f[27, 20, 20] == pytest.approx(79 * (-1 / 3.5**2), rel=1e-13)
    assert f[22, 20, 20] == 0.0  # |r| = 1
    assert f[34, 20, 20] == 0.0  # |r| = 7


@pytest.mark.parametrize("model", [RAW, TanhSphericalDielectric(normalized=True)])
def test_regularized_source_support(model):
    g = benchmark_grid(40)
    f = regularized_source(UNIT, model, g).values
    rad = g.radius()
    band = (rad > 2) & (rad < 5)
    assert np.all(f[~band] == 0.0)
    assert np.all(f[band] < 0)
    assert np.all(np.isfinite(f))


def test_regularized_source_rejects_charge_outside_core():
    with pytest.raises(ConfigError):
        regularized_source(ChargeSet.single(1.0, (2.5, 0, 0)), RAW, benchmark_grid(20))


def test_trilinear_on_node_and_cell_centre():
    g = make_grid((0, 0, 0), 2.0, 3)  # h = 1
    f = trilinear_source(ChargeSet.single(2.0, (1, 1, 1)), g).values
    assert f[1, 1, 1] == pytest.approx(8 * np.pi)
    assert np.count_nonzero(f) == 1
    f = trilinear_source(ChargeSet.single(1.0, (0.5, 0.5, 0.5)), g).values
    np.testing.assert_allclose(f[:2, :2, :2], np.full((2, 2, 2), 4 * np.pi / 8))
    assert np.count_nonzero(f) == 8


def test_trilinear_upper_corner_and_outside():
    g = make_grid((0, 0, 0), 2.0, 3)
    f = trilinear_source(ChargeSet.single(1.0, (2, 2, 2)), g).values
    assert f[2, 2, 2] == pytest.approx(4 * np.pi)
    with pytest.raises(ConfigError):
        trilinear_source(ChargeSet.single(1.0, (2.1, 0, 0)), g)


def test_trilinear_weights_moments():
    g = benchmark_grid(50)
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = rng.uniform(-9.9, 9.9, 3)
        pairs = trilinear_weights(p, g)
        w = np.array([wt for _, wt in pairs])
        pos = np.array([g.node(*ijk) for ijk, _ in pairs])
        assert w.sum() == pytest.approx(1.0, abs=1e-14)
        assert np.all(w >= 0)
        np.testing.assert_allclose(w @ pos, p, atol=1e-12)


def test_trilinear_conserves_charge():
    g = benchmark_grid(50)
    charges = ChargeSet([PointCharge((0.1, -0.3, 0.7), 1.5), PointCharge((-1, 0.2, 0.05), -0.25)])
    f = trilinear_source(charges, g).values
    assert g.spacing**3 * f.sum() == pytest.approx(4 * np.pi * 1.25, rel=1e-12)
    assert np.count_nonzero(f) <= 16


def test_charge_set_validation(tmp_path):
    with pytest.raises(ConfigError):
        ChargeSet([])
    with pytest.raises(ConfigError):
        PointCharge((0, 0, np.inf), 1.0)
    with pytest.raises(ConfigError):
        ChargeSet.single(1.0, (0, 0, 0)).check_off_nodes(benchmark_grid(21))
    ChargeSet.single(1.0, (0, 0, 0)).check_off_nodes(benchmark_grid(20))


def test_charge_file_round_trip(tmp_path):
    path = tmp_path / "q.txt"
    path.write_text("# header\n\n0 0 0 1\n  0.5 -0.25 1e-3 -2\n")
    cs = load_charges(path)
    assert len(cs) == 2
    assert cs[1].position == (0.5, -0.25, 1e-3) and cs[1].magnitude == -2
    back = load_charges(save_charges(cs, tmp_path / "out.txt"))
    np.testing.assert_array_equal(back.positions, cs.positions)
    path.write_text("0 0 1\n")
    with pytest.raises(ConfigError):
        load_charges(path)
    path.write_text("0 0 1 x\n")
    with pytest.raises(ConfigError):
        load_charges(path)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-9.9, 9.9), min_size=3, max_size=3), st.floats(-5, 5))
def test_trilinear_total_property(pos, q):
    g = benchmark_grid(20)
    f = trilinear_source(ChargeSet.single(q, pos), g).values
    assert g.spacing**3 * f.sum() == pytest.approx(4 * np.pi * q, rel=1e-12, abs=1e-12)
