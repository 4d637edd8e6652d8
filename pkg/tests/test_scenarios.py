import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from stokes_flow.boundary import Dirichlet, Edge, Neumann
from stokes_flow.grid import Role
from stokes_flow.operators import ViscosityField
from stokes_flow.scenarios import (
    PipeParams,
    VesicleParams,
    membrane_force,
    mollified_delta,
    pipe_analytic,
    pipe_scenario,
    signed_distance,
    signed_distance_gradient,
    vesicle_analytic,
    vesicle_scenario,
)

radii = st.floats(0.5, 8.0)


class TestPipe:
    def test_defaults(self):
        sc = pipe_scenario()
        assert sc.params == PipeParams(200.0, 100.0, 2.0)
        assert isinstance(sc.bcs[Role.P, Edge.LEFT], Dirichlet)
        assert isinstance(sc.bcs[Role.U, Edge.RIGHT], Neumann)

    @given(st.floats(-300, 300), st.floats(-300, 300), st.floats(0.1, 10))
    def test_analytic_satisfies_momentum(self, p0, p1, mu):
        prm = PipeParams(p0, p1, mu)
        y = np.linspace(0, 1, 11)
        h = 1e-3
        p, u, v = pipe_analytic(prm, 0.3, y)
        uyy = (pipe_analytic(prm, 0.3, y + h)[1] - 2 * u + pipe_analytic(prm, 0.3, y - h)[1]) / h**2
        px = (pipe_analytic(prm, 0.3 + h, y)[0] - pipe_analytic(prm, 0.3 - h, y)[0]) / (2 * h)
        np.testing.assert_allclose(mu * uyy, px, atol=1e-5 * (1 + abs(p1 - p0)))
        assert pipe_analytic(prm, 0.5, 0.0)[1] == 0.0 and pipe_analytic(prm, 0.5, 1.0)[1] == 0.0

    def test_reference_values(self):
        p, u, v = pipe_analytic(PipeParams(), 0.25, 0.5)
        assert (float(p), float(u), float(v)) == pytest.approx((175.0, 6.25, 0.0))

    def test_rejects_viscosity(self):
        with pytest.raises(ValueError):
            PipeParams(mu=0.0)


class TestVesicle:
    def test_defaults(self):
        prm = VesicleParams()
        assert (prm.R, prm.L, prm.eps, prm.center) == (5.0, 5.0, 2.5, (10.0, 0.0))
        sc = vesicle_scenario()
        assert (sc.width, sc.x0, sc.y0) == (20.0, 0.0, -10.0)

    @given(st.floats(1e-3, 10))
    def test_delta_normalised(self, eps):
        total, _ = quad(lambda z: float(mollified_delta(z, eps)), -eps, eps, epsabs=1e-13, epsrel=1e-13)
        assert total == pytest.approx(1.0, abs=1e-10)

    @given(st.floats(1e-3, 10), st.floats(-20, 20))
    def test_delta_shape(self, eps, z):
        d = float(mollified_delta(z, eps))
        assert d >= 0
        assert d == pytest.approx(float(mollified_delta(-z, eps)))
        if abs(z) > eps:
            assert d == 0.0

    def test_delta_rejects_eps(self):
        with pytest.raises(ValueError):
            mollified_delta(0.0, 0.0)

    @given(radii, st.floats(0.5, 5), st.floats(0.05, 1.0))
    def test_pressure_continuous_at_band_edges(self, R, L, frac):
        prm = VesicleParams(R=R, L=L, eps=frac * R)
        cx, cy = prm.center
        for z, expect in ((prm.eps, 0.0), (-prm.eps, -1 / R)):
            x = cx + R + z
            inside = vesicle_analytic(prm, x - 1e-13, cy)[0]
            at = vesicle_analytic(prm, x, cy)[0]
            outside = vesicle_analytic(prm, x + 1e-13, cy)[0]
            for val in (inside, at, outside):
                assert float(val) == pytest.approx(expect, abs=1e-12)

    def test_pressure_gradient_balances_force(self):
        # zero velocity: the pressure gradient carries the membrane force alone
        prm = VesicleParams()
        rng = np.random.default_rng(1)
        x = rng.uniform(2, 18, 400)
        y = rng.uniform(-8, 8, 400)
        h = 1e-5
        px = (vesicle_analytic(prm, x + h, y)[0] - vesicle_analytic(prm, x - h, y)[0]) / (2 * h)
        py = (vesicle_analytic(prm, x, y + h)[0] - vesicle_analytic(prm, x, y - h)[0]) / (2 * h)
        f1, f2 = membrane_force(prm, x, y)
        np.testing.assert_allclose(px, f1, atol=1e-6)
        np.testing.assert_allclose(py, f2, atol=1e-6)

    def test_signed_distance(self):
        prm = VesicleParams()
        assert float(signed_distance(prm, 10.0, 0.0)) == -5.0
        assert float(signed_distance(prm, 18.0, 0.0)) == 3.0
        gx, gy = signed_distance_gradient(prm, 13.0, 4.0)
        assert (float(gx), float(gy)) == pytest.approx((0.6, 0.8))
        # regularised at the centre
        assert np.isfinite(signed_distance_gradient(prm, 10.0, 0.0)).all()

    def test_analytic_only_for_constant_viscosity(self):
        prm = VesicleParams(mu=ViscosityField(lambda x, y: 1 + 0.01 * x))
        assert vesicle_scenario(prm).analytic is None

    @pytest.mark.parametrize("kw", [{"R": 0.0}, {"L": -1.0}, {"eps": 0.0}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            VesicleParams(**kw)
