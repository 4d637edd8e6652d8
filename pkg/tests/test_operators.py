import numpy as np
import pytest
import sympy
from _poly import bcs_for, kinds, quadratics
from hypothesis import given
from hypothesis import strategies as st

from stokes_flow.boundary import EDGES, BoundarySet, Dirichlet
from stokes_flow.grid import Layout, Role, build_grid
from stokes_flow.operators import (
    ViscosityField,
    centered_divergence_rows,
    centered_gradient_rows,
    laplacian_rows,
    mac_divergence_rows,
    mac_gradient_rows,
    proj_divergence_rows,
    proj_gradient_rows,
    stress_divergence,
)

Ms = st.integers(4, 9)


def sample(g, role, q):
    return q(*g.coords(role))


def assert_active_close(got, expect, scale=1.0):
    mask = ~np.isnan(got)
    assert mask.any()
    np.testing.assert_allclose(got[mask], np.broadcast_to(expect, got.shape)[mask], atol=1e-8 * scale)


GRADIENTS = [
    (Layout.SADDLE_STAGGERED, mac_gradient_rows),
    (Layout.PROJECTION_STAGGERED, proj_gradient_rows),
    (Layout.COLLOCATED, centered_gradient_rows),
]
DIVERGENCES = [
    (Layout.SADDLE_STAGGERED, mac_divergence_rows),
    (Layout.PROJECTION_STAGGERED, proj_divergence_rows),
    (Layout.COLLOCATED, centered_divergence_rows),
]


class TestPolynomialExactness:
    @pytest.mark.parametrize("layout,builder", GRADIENTS)
    @given(q=quadratics, M=Ms)
    def test_gradient(self, layout, builder, q, M):
        g = build_grid(M, 1.0, 1.0, layout)
        gx, gy = builder(g)
        p = sample(g, Role.P, q)
        assert_active_close(gx.apply({Role.P: p}), q.dx(*g.coords(Role.U)), 1 / g.dx)
        assert_active_close(gy.apply({Role.P: p}), q.dy(*g.coords(Role.V)), 1 / g.dx)

    @pytest.mark.parametrize("layout,builder", DIVERGENCES)
    @given(qu=quadratics, qv=quadratics, M=Ms)
    def test_divergence(self, layout, builder, qu, qv, M):
        g = build_grid(M, 1.0, 1.0, layout)
        d = builder(g)
        out = d.apply({Role.U: sample(g, Role.U, qu), Role.V: sample(g, Role.V, qv)})
        X, Y = g.coords(Role.P)
        assert_active_close(out, qu.dx(X, Y) + qv.dy(X, Y), 1 / g.dx)

    @pytest.mark.parametrize("layout,builder", DIVERGENCES[:2])
    @given(qu=quadratics, qv=quadratics, ku=kinds, kv=kinds, M=Ms)
    def test_divergence_with_boundary_closure(self, layout, builder, qu, qv, ku, kv, M):
        g = build_grid(M, 1.0, 1.0, layout)
        bcs = bcs_for({Role.U: qu, Role.V: qv}, {Role.U: ku, Role.V: kv})
        out = builder(g, bcs).apply({Role.U: sample(g, Role.U, qu), Role.V: sample(g, Role.V, qv)})
        assert not np.isnan(out).any()
        X, Y = g.coords(Role.P)
        np.testing.assert_allclose(out, qu.dx(X, Y) + qv.dy(X, Y), atol=1e-7 / g.dx)

    @pytest.mark.parametrize("layout", list(Layout))
    @given(q=quadratics, kind=kinds, M=Ms, role=st.sampled_from([Role.P, Role.U, Role.V]))
    def test_laplacian(self, layout, q, kind, M, role):
        g = build_grid(M, 1.0, 1.0, layout)
        bcs = bcs_for({role: q}, {role: kind})
        lap = laplacian_rows(g, role, bcs, scale=2.0)
        out = lap.apply({role: sample(g, role, q)})
        expect = np.where(lap.boundary, 0.0, 2.0 * q.laplacian)
        np.testing.assert_allclose(out, expect, atol=1e-6 / g.dx**2)

    @given(qu=quadratics, qv=quadratics, M=Ms, mu=st.floats(0.1, 10))
    def test_stress_divergence_constant_mu(self, qu, qv, M, mu):
        g = build_grid(M, 1.0, 1.0, Layout.PROJECTION_STAGGERED)
        bcs = bcs_for({Role.U: qu, Role.V: qv}, {Role.U: "DDDD", Role.V: "DDDD"})
        a1, a2 = stress_divergence(
            sample(g, Role.U, qu), sample(g, Role.V, qv), ViscosityField.uniform(mu), g, bcs
        )
        # div(mu (grad u + grad u^T)) = mu (lap u + grad div u)
        e = [qu.k[4], qv.k[4]]
        ex1 = mu * (qu.laplacian + 2 * qu.k[3] + e[1])
        ex2 = mu * (qv.laplacian + e[0] + 2 * qv.k[5])
        np.testing.assert_allclose(a1, ex1, atol=1e-6 * mu / g.dx**2)
        np.testing.assert_allclose(a2, ex2, atol=1e-6 * mu / g.dx**2)


def _symbolic_stress():
    x, y = sympy.symbols("x y")
    u = sympy.sin(2 * x) * sympy.cos(y)
    v = sympy.exp(x) * sympy.sin(y)
    mu = 1 + x**2 + sympy.Rational(1, 2) * y
    a1 = sympy.diff(2 * mu * sympy.diff(u, x), x) + sympy.diff(mu * (sympy.diff(u, y) + sympy.diff(v, x)), y)
    a2 = sympy.diff(mu * (sympy.diff(u, y) + sympy.diff(v, x)), x) + sympy.diff(2 * mu * sympy.diff(v, y), y)
    f = lambda e: sympy.lambdify((x, y), e, "numpy")
    return f(u), f(v), f(mu), f(a1), f(a2)


class TestStressDivergence:
    def test_variable_viscosity_second_order(self):
        u, v, mu, a1, a2 = _symbolic_stress()
        bcs = BoundarySet({(r, e): Dirichlet(fn) for r, fn in ((Role.U, u), (Role.V, v)) for e in EDGES})
        visc = ViscosityField(mu)
        errs = []
        for M in (16, 32, 64):
            g = build_grid(M, 1.0, 1.0, Layout.PROJECTION_STAGGERED)
            X, Y = g.coords(Role.U)
            b1, b2 = stress_divergence(u(X, Y), v(X, Y), visc, g, bcs)
            inner = ~g.on_wall(Role.U)
            errs.append(max(np.abs(b1 - a1(X, Y))[inner].max(), np.abs(b2 - a2(X, Y))[inner].max()))
        rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(rates > 1.8), (errs, rates)

    def test_rejects_split_velocity_lattices(self):
        g = build_grid(5, 1.0, 1.0, Layout.SADDLE_STAGGERED)
        with pytest.raises(ValueError):
            stress_divergence(np.zeros((5, 5)), np.zeros((5, 5)), ViscosityField.uniform(1.0), g)

    def test_zero_field(self):
        g = build_grid(6, 1.0, 1.0, Layout.PROJECTION_STAGGERED)
        a1, a2 = stress_divergence(np.zeros((6, 6)), np.zeros((6, 6)), ViscosityField.uniform(3.0), g)
        assert not a1.any() and not a2.any()


class TestViscosity:
    @pytest.mark.parametrize("mu", [0.0, -1.0, float("nan")])
    def test_uniform_rejects(self, mu):
        with pytest.raises(ValueError):
            ViscosityField.uniform(mu)

    def test_field_rejects_negative_values(self):
        f = ViscosityField(lambda x, y: x - 0.5)
        with pytest.raises(ValueError):
            f(np.array([0.0, 1.0]), np.array([0.0, 0.0]))

    def test_value(self):
        assert ViscosityField.uniform(2.5).value() == 2.5
        with pytest.raises(ValueError):
            ViscosityField(lambda x, y: 1 + x).value()


class TestStencilRows:
    def test_rows_match_apply(self):
        g = build_grid(5, 1.0, 1.0, Layout.SADDLE_STAGGERED)
        bcs = BoundarySet.uniform(Dirichlet(lambda x, y: x * y))
        d = mac_divergence_rows(g, bcs)
        rng = np.random.default_rng(0)
        fields = {Role.U: rng.normal(size=(5, 5)), Role.V: rng.normal(size=(5, 5))}
        out = d.apply(fields)
        for row in d.rows():
            _, i, j = row.target
            val = row.rhs_shift + sum(w * fields[r][a, b] for (r, a, b), w in row.entries)
            assert val == pytest.approx(out[i, j])

    def test_system_requires_single_variable(self):
        g = build_grid(5, 1.0, 1.0, Layout.SADDLE_STAGGERED)
        with pytest.raises(ValueError):
            mac_divergence_rows(g, BoundarySet.uniform(Dirichlet(0.0))).system(0.0)

    def test_missing_bcs_when_leaving_lattice(self):
        g = build_grid(5, 1.0, 1.0, Layout.SADDLE_STAGGERED)
        with pytest.raises(KeyError):
            laplacian_rows(g, Role.P, BoundarySet.uniform(Dirichlet(0.0), roles=(Role.U,)))
