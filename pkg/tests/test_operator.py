import numpy as np
import pytest

from conftest import interior_random
from diffuse_poisson.charges import ChargeSet, boundary_potential, greens_potential
from diffuse_poisson.dielectric import ConstantDielectric, TanhSphericalDielectric
from diffuse_poisson.errors import ConfigError, GridMismatchError
from diffuse_poisson.grid import ScalarField, make_grid, benchmark_grid
from diffuse_poisson.operator import (
    _stencil_numpy,
    assemble,
    assemble_regularized,
    assemble_trilinear,
    build_operator,
)
from diffuse_poisson.solver import solve

SMOOTH = TanhSphericalDielectric(normalized=True)
RAW = TanhSphericalDielectric()
UNIT = ChargeSet.single(1.0)


def test_constant_faces():
    op = build_operator(make_grid((0, 0, 0), 1.0, 6), ConstantDielectric(2.5))
    for arr in (op.eps_x, op.eps_y, op.eps_z):
        assert np.all(arr == 2.5)


def test_faces_in_core_and_at_band_midpoint():
    g = make_grid((-10, -10, -10), 20.0, 21)  # h = 1, integer nodes
    op = build_operator(g, RAW)
    # node (1, 0, 0) is inside the core: all six faces equal eps_i
    i, j, k = 11, 10, 10
    faces = [op.eps_x[i, j, k], op.eps_x[i - 1, j, k], op.eps_y[i, j, k], op.eps_y[i, j - 1, k],
             op.eps_z[i, j, k], op.eps_z[i, j, k - 1]]
    assert faces == [1.0] * 6
    # x-face between nodes 3 and 4 sits at radius 3.5
    assert op.eps_x[13, 10, 10] == pytest.approx(40.5)


@pytest.mark.parametrize("model", [RAW, SMOOTH])
def test_faces_bounded(model):
    op = build_operator(benchmark_grid(24), model)
    for arr in (op.eps_x, op.eps_y, op.eps_z):
        assert arr.min() >= 1.0 and arr.max() <= 80.0


def test_shared_faces_consistent():
    """East face of (i,j,k) is the west face of (i+1,j,k): diagonal is built from one array."""
    g = benchmark_grid(12)
    op = build_operator(g, SMOOTH)
    e = np.zeros(g.shape)
    e[5, 6, 6] = 1.0
    col = op.apply(ScalarField(g, e)).values
    # off-diagonal entries A[p, p+x] and A[p+x, p] coincide
    e2 = np.zeros(g.shape)
    e2[6, 6, 6] = 1.0
    col2 = op.apply(ScalarField(g, e2)).values
    assert col[6, 6, 6] == col2[5, 6, 6]
    assert col[6, 6, 6] == pytest.approx(-op.eps_x[5, 6, 6] / g.spacing**2)


def test_quadratic_and_linear_exactness():
    g = make_grid((-1, -1, -1), 2.0, 9)
    op = build_operator(g, ConstantDielectric(1.0))
    p = g.points()
    quad = op.apply(ScalarField(g, np.sum(p * p, axis=-1))).values[1:-1, 1:-1, 1:-1]
    np.testing.assert_allclose(quad, -6.0, rtol=1e-12)
    lin = op.apply(ScalarField(g, p @ np.array([1.0, -2.0, 0.5]) + 3)).values[1:-1, 1:-1, 1:-1]
    np.testing.assert_allclose(lin, 0.0, atol=1e-11)


def test_linear_in_coefficient(rng):
    g = make_grid((0, 0, 0), 1.0, 8)
    u = ScalarField(g, rng.normal(size=g.shape))
    a = build_operator(g, ConstantDielectric(1.0)).apply(u).values
    b = build_operator(g, ConstantDielectric(3.0)).apply(u).values
    np.testing.assert_allclose(b[1:-1, 1:-1, 1:-1], 3 * a[1:-1, 1:-1, 1:-1], rtol=1e-13)
    # boundary rows act as the identity
    np.testing.assert_array_equal(b[0], u.values[0])


def test_apply_grid_mismatch():
    op = build_operator(make_grid((0, 0, 0), 1.0, 5), ConstantDielectric(1.0))
    with pytest.raises(GridMismatchError):
        op.apply(ScalarField.zeros(make_grid((0, 0, 0), 1.0, 6)))


def test_jit_kernel_matches_numpy(rng):
    op = build_operator(benchmark_grid(20), SMOOTH)
    w = rng.normal(size=op.grid.shape)
    out = np.empty(op.interior_shape)
    ref = _stencil_numpy(op.eps_x, op.eps_y, op.eps_z, op._diag, w, out.copy())
    np.testing.assert_allclose(op._stencil(w) / op.inv_h2, ref, rtol=1e-14, atol=1e-12)


def test_regularized_degenerate_dielectric():
    d = TanhSphericalDielectric(eps_i=1.0, eps_e=1.0)
    sys_ = assemble_regularized(benchmark_grid(20), d, UNIT)
    assert np.all(sys_.rhs.values == 0)
    assert np.all(sys_.boundary_values.values == 0)


def test_regularized_rhs_support():
    g = benchmark_grid(30)
    sys_ = assemble_regularized(g, RAW, UNIT)
    rad = g.radius()
    touches_boundary = np.zeros(g.shape, dtype=bool)
    touches_boundary[1:-1, 1:-1, 1:-1] = True
    touches_boundary[2:-2, 2:-2, 2:-2] = False
    nz = sys_.rhs.values != 0
    assert np.all(((rad > 2) & (rad < 5)) | touches_boundary | ~nz)
    assert np.all(sys_.source.values[(rad <= 2) | (rad >= 5)] == 0)


def test_regularized_boundary_values():
    p = [10.0, 0.0, 0.0]
    assert boundary_potential(UNIT, 80.0, p) - greens_potential(UNIT, 1.0, p) == pytest.approx(-0.09875)
    g = benchmark_grid(40)
    sys_ = assemble_regularized(g, RAW, UNIT)
    node = g.node(39, 20, 20)
    rad = np.linalg.norm(node)
    assert sys_.boundary_values[39, 20, 20] == pytest.approx((1 / 80 - 1) / rad, rel=1e-14)
    assert np.all(sys_.boundary_values.values[1:-1, 1:-1, 1:-1] == 0)


def test_boundary_folding_matches_explicit_sum():
    g = benchmark_grid(10)
    op = build_operator(g, SMOOTH)
    sys_ = assemble_regularized(g, SMOOTH, UNIT, operator=op)
    bv = sys_.boundary_values.values
    # node (1, 4, 4) has only its west neighbour on the boundary
    expect = sys_.source[1, 4, 4] + op.eps_x[0, 4, 4] * bv[0, 4, 4] / g.spacing**2
    assert sys_.rhs[1, 4, 4] == pytest.approx(expect, rel=1e-13)
    # corner-adjacent node (1, 1, 1) sees three boundary neighbours
    expect = sys_.source[1, 1, 1] + (
        op.eps_x[0, 1, 1] * bv[0, 1, 1] + op.eps_y[1, 0, 1] * bv[1, 0, 1] + op.eps_z[1, 1, 0] * bv[1, 1, 0]
    ) / g.spacing**2
    assert sys_.rhs[1, 1, 1] == pytest.approx(expect, rel=1e-13)


def test_trilinear_assembly():
    g = benchmark_grid(20)
    sys_ = assemble_trilinear(g, RAW, UNIT)
    assert g.spacing**3 * sys_.source.values.sum() == pytest.approx(4 * np.pi)
    mask = ~g.interior_mask()
    np.testing.assert_allclose(sys_.boundary_values.values[mask], boundary_potential(UNIT, 80.0, g.points()[mask]))
    with pytest.raises(ConfigError):
        assemble_trilinear(benchmark_grid(21), RAW, UNIT)


def test_zero_charge_gives_discrete_harmonic_extension():
    g = benchmark_grid(16)
    zero = ChargeSet.single(0.0, (0.1, 0.2, 0.3))
    sys_ = assemble_trilinear(g, ConstantDielectric(1.0), zero, eps_i=1.0, eps_e=1.0)
    assert np.all(sys_.source.values == 0)
    u, rep = solve(sys_)
    assert np.all(u.values == 0)

    # nonzero harmonic data: a linear function is reproduced by the discrete solve
    p = g.points()
    lin = p @ np.array([0.3, -0.1, 0.2]) + 1.0
    bv = np.where(g.interior_mask(), 0.0, lin)
    op = build_operator(g, SMOOTH)
    u, _ = solve(assemble(op, ScalarField.zeros(g), ScalarField(g, bv)))
    # variable eps: not linear, but bounded by the boundary extremes (maximum principle)
    assert u.values.max() <= lin.max() + 1e-9 and u.values.min() >= lin.min() - 1e-9


def test_symmetry_and_positivity(rng):
    g = benchmark_grid(17)
    op = build_operator(g, SMOOTH)
    for _ in range(20):
        u, v = interior_random(g, rng), interior_random(g, rng)
        au, av = op.apply(u).values, op.apply(v).values
        lhs, rhs = np.sum(au * v.values), np.sum(u.values * av)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))
        assert np.sum(au * u.values) > 0
