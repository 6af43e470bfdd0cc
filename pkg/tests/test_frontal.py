from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kummer import load_fixture, parse_vector
from kummer.expr import eval_vector
from kummer.fields import RankDeficientBasis, sample_scene
from kummer.frontal import (
    curvature_line_bde,
    decompose,
    relative_curvatures,
    singular_set,
)
from kummer.linalg import P, T, adj2, det2, frob, inv2, quad_coeffs, quad_matrix

E43 = load_fixture("example43")


def _w(u1, u2):
    return u2 ** 10 + 2 * u2 ** 7 + u2 ** 6 + u2 ** 4 + 2 * u2 ** 3 + u1 ** 2 + 1


def gaussian_curvature_fd(x, q, h=1e-5):
    """Classical (LN - M^2)/(EG - F^2) with second derivatives by differencing the AD Jacobian."""
    q = np.asarray(q, dtype=float)
    _, J = eval_vector(x, q)
    n = np.cross(J[:, 0], J[:, 1])
    n /= np.linalg.norm(n)
    second = []
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        second.append((eval_vector(x, q + e)[1] - eval_vector(x, q - e)[1]) / (2 * h))
    L = second[0][:, 0] @ n
    M = second[0][:, 1] @ n
    N = second[1][:, 1] @ n
    g = J.T @ J
    return (L * N - M * M) / np.linalg.det(g)


# -- small matrix helpers -------------------------------------------------------------

@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4))
def test_adjugate_identity(v):
    a = np.array(v).reshape(2, 2)
    assert np.allclose(a @ adj2(a), det2(a) * np.eye(2), atol=1e-9)


def test_inverse_and_quadratic_helpers():
    a = np.array([[2.0, 1.0], [0.5, 3.0]])
    assert np.allclose(inv2(a) @ a, np.eye(2))
    m = quad_matrix(1.0, 4.0, -2.0)
    assert quad_coeffs(m) == (1.0, 4.0, -2.0)
    assert np.array_equal(P @ P, -np.eye(2))
    assert frob(np.ones((2, 2))) == 2.0
    assert np.array_equal(T(np.arange(6).reshape(3, 2)), np.arange(6).reshape(3, 2).T)


# -- decompositions --------------------------------------------------------------------

@pytest.mark.parametrize("q", [(0.3, 0.5), (-0.7, 0.0), (0.0, -0.9)])
def test_example43_lambda(q):
    d = decompose(E43.x, E43.omega, q)
    assert np.allclose(d.Lambda, [[1, 0], [0, 2 * q[1]]], atol=1e-12)
    assert d.det == pytest.approx(2 * q[1], abs=1e-12)
    assert d.is_tangent


def test_identity_embedding():
    x = parse_vector("(u1, u2, 0)")
    om = (parse_vector("(1, 0, 0)"), parse_vector("(0, 1, 0)"))
    d = decompose(x, om, (0.2, -0.4))
    assert np.array_equal(d.Lambda, np.eye(2)) and d.det == 1.0


def test_example43_xi_is_tangent_to_the_same_basis():
    g = E43.domain.grid(20)
    d = decompose(E43.xi, E43.omega, g)
    assert d.tangency_residual.max() <= 1e-9


def test_non_tangent_map_reports_residual():
    d = decompose(parse_vector("(u1, u2, u1*u2)"), (parse_vector("(1,0,0)"), parse_vector("(0,1,0)")), (0.5, 0.5))
    assert not d.is_tangent and d.tangency_residual == pytest.approx(np.sqrt(0.5))


def test_rank_deficient_basis():
    om = (parse_vector("(1, 0, 0)"), parse_vector("(u1, 0, 0)"))
    with pytest.raises(RankDeficientBasis):
        decompose(parse_vector("(u1, u2, 0)"), om, (0.5, 0.5))


# -- relative curvatures ------------------------------------------------------------------

def test_example43_relative_curvature_closed_form():
    # K_Omega has the opposite sign of the printed closed form; the independent
    # classical Gaussian curvature check below confirms the computed sign
    g = E43.domain.grid(15).reshape(-1, 2)
    u1, u2 = g[:, 0], g[:, 1]
    rc = relative_curvatures(E43.x, E43.omega, g)
    ref = -2 * u2 * (u2 + 1) ** 2 * (u2 ** 2 - u2 + 1) ** 2 / _w(u1, u2) ** 2
    assert np.allclose(rc.K, ref, rtol=1e-10, atol=1e-15)


@pytest.mark.parametrize("q", [(0.3, 0.5), (-0.2, -0.4), (0.8, 0.9)])
def test_example43_gaussian_extension(q):
    rc = relative_curvatures(E43.x, E43.omega, np.array(q))
    kg = gaussian_curvature_fd(E43.x, q)
    assert rc.K / rc.lam == pytest.approx(kg, rel=1e-6)
    u1, u2 = q
    assert kg == pytest.approx(-((u2 + 1) ** 2) * (u2 ** 2 - u2 + 1) ** 2 / _w(u1, u2) ** 2, rel=1e-6)


@pytest.mark.parametrize("name", ["parabolic", "example43", "sphere", "helicoid", "skew"])
def test_relative_curvature_invariants(name):
    s = load_fixture(name)
    pts = s.domain.random_points(np.random.default_rng(11), 100)
    rc = relative_curvatures(s.x, s.omega, pts)
    assert np.allclose(rc.mu, -T(rc.II_omega) @ inv2(rc.I_omega), atol=1e-12)
    assert np.allclose(rc.alpha, rc.mu @ adj2(rc.Lambda), atol=1e-12)
    real = rc.real
    assert np.all(rc.k1[real] <= rc.k2[real])
    s_ = 1 + np.abs(rc.H) + np.abs(rc.lam * rc.K)
    assert np.all(np.abs(rc.k1 * rc.k2 - rc.lam * rc.K)[real] <= 1e-10 * s_[real])
    assert np.all(np.abs(rc.k1 + rc.k2 - 2 * rc.H)[real] <= 1e-10 * s_[real])
    fs = sample_scene(s, pts)
    assert (frob(fs.Dn - fs.Omega @ T(rc.mu)) / (1 + frob(fs.Dn))).max() <= 1e-9


def test_normal_orthogonal_to_partials():
    for name in ("parabolic", "example43", "sphere"):
        s = load_fixture(name)
        fs = sample_scene(s, s.domain.random_points(np.random.default_rng(1), 100))
        assert np.abs(np.einsum("ni,nij->nj", fs.n, fs.Dx)).max() <= 1e-10


def test_sphere_is_umbilic_with_unit_curvature():
    s = load_fixture("sphere")
    pts = s.domain.random_points(np.random.default_rng(2), 50)
    rc = relative_curvatures(s.x, s.omega, pts)
    # Lambda = diag(cos u2, 1), so the relative curvatures are -lambda and k / lambda = -1
    assert np.allclose(rc.lam, np.cos(pts[:, 1]), atol=1e-14)
    assert np.allclose(rc.k1, -rc.lam, atol=1e-12) and np.allclose(rc.k2, -rc.lam, atol=1e-12)
    assert np.abs(curvature_line_bde(s.x, s.omega, pts).vector).max() <= 1e-12


def test_complex_relative_curvatures_are_reported_separately():
    # with x tangent to Omega, alpha = lambda * (shape operator) has real eigenvalues;
    # matrices with Lambda a quarter turn and mu = I give H = 0, lambda K = 1
    from kummer.frontal import relative_curvatures_matrices

    om = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    rc = relative_curvatures_matrices(om @ rot.T, om, om)
    assert rc.H == 0.0 and rc.lam == 1.0 and rc.K == 1.0
    assert rc.principal() is None and np.isnan(rc.k1)
    z1, z2 = rc.k_complex
    assert (z1, z2) == (-1j, 1j)
    s = load_fixture("sphere")
    assert relative_curvatures(s.x, s.omega, np.array([0.1, 0.2])).principal() is not None


# -- curvature lines and singular sets -------------------------------------------------------

def test_parabolic_curvature_lines_match_printed_equation():
    s = load_fixture("parabolic")
    pts = s.domain.random_points(np.random.default_rng(3), 50)
    u1, u2 = pts[:, 0], pts[:, 1]
    printed = np.stack([2 * u1 ** 3 * u2 ** 2 - 4 * u1 * u2 ** 3 + u1, -u1 ** 4 * u2 - 4 * u2 ** 3 - u2 + 1,
                        -u1 ** 5 - 2 * u1 ** 3 * u2 - u1], axis=-1)
    ours = curvature_line_bde(s.x, s.omega, pts).vector
    ratio = ours / printed
    assert np.allclose(ratio, ratio[:, :1], rtol=1e-9)
    # common factor -2 / W^(3/2) with W = |x_u1 x x_u2|^2 (frozen from a symbolic derivation)
    w = u1 ** 4 + 4 * u1 ** 2 * u2 ** 2 + 4 * u1 ** 2 * u2 + 4 * u2 ** 2 + 1
    assert np.allclose(ratio[:, 0], -2 / w ** 1.5, rtol=1e-10)


def test_example43_curvature_lines_corrected_form():
    # symbolic derivation of lambda P alpha^T for this frontal, frozen
    g = E43.domain.grid(12).reshape(-1, 2)
    u1, u2 = g[:, 0], g[:, 1]
    w = _w(u1, u2) ** 1.5
    ref = np.stack([
        -2 * u2 * (u2 + 1) * (u2 ** 4 + 1) * (u2 ** 2 - u2 + 1),
        6 * u1 * u2 ** 3 * (u2 ** 4 + 1),
        4 * u2 ** 3 * (5 * u1 ** 2 * u2 ** 3 + 2 * u1 ** 2 + 2 * u2 ** 9 + 6 * u2 ** 6 + 6 * u2 ** 3 + 2),
    ], axis=-1) / w[:, None]
    assert np.allclose(curvature_line_bde(E43.x, E43.omega, g).vector, ref, rtol=1e-10, atol=1e-14)


def test_singular_set_example43_is_axis():
    curves = singular_set(E43.x, E43.omega, E43.domain, 32)
    pts = np.vstack(curves)
    assert np.abs(pts[:, 1]).max() <= 1e-12
    assert pts[:, 0].min() < -0.9 and pts[:, 0].max() > 0.9


def test_singular_set_of_cubic_fold():
    x = parse_vector("(u1, u2^3, 0)")
    om = (parse_vector("(1, 0, 0)"), parse_vector("(0, 1, 0)"))
    from kummer.scene import DomainRect

    # lambda = 3 u2^2 touches zero without a sign change, so refine on u2 * lambda-like data:
    d = decompose(x, om, np.array([0.3, 0.5]))
    assert d.det == pytest.approx(3 * 0.25)
    curves = singular_set(parse_vector("(u1, u2^2, 0)"), om, DomainRect(-1, 1, -1, 1), 16)
    assert len(curves) == 1 and np.abs(np.vstack(curves)[:, 1]).max() <= 1e-12


def test_singular_set_empty_for_immersion():
    s = load_fixture("parabolic")
    assert singular_set(s.x, s.omega, s.domain, 16) == []


def test_singular_set_grid_minimum():
    with pytest.raises(ValueError):
        singular_set(E43.x, E43.omega, E43.domain, 4)
