import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circle_blowup import hypothesis as hyp
from circle_blowup.errors import HypothesisH1Violated, NotStationary
from circle_blowup.spectral import CircleFunction

from conftest import h_test, k_test

Q_TEST = np.pi**2 / 4


def admissible(cos_tail, sin_tail, base=5.0, n_grid=1024):
    """Trig polynomial with h'(1) = 0 and (-Delta)^{1/2} h(1) = 0.

    The last cosine coefficient absorbs the half-Laplacian at 0 and the last
    sine coefficient the derivative.
    """
    a = [base] + list(cos_tail)
    b = list(sin_tail)
    m = len(a) - 1
    flap = sum(n * a[n] for n in range(1, m))
    a[m] = -flap / m
    if b:
        mb = len(b)
        d = sum(n * b[n - 1] for n in range(1, mb))
        b[mb - 1] = -d / mb
    return CircleFunction.from_trig(cos=a, sin=b, n_grid=n_grid)


class TestPointDerivatives:
    def test_h_test(self):
        d = hyp.point_derivatives(h_test(), k_test())
        assert d["h_at_1"] == pytest.approx(2.5, abs=1e-14)
        assert d["hp_at_1"] == pytest.approx(0.0, abs=1e-12)
        assert d["flap_h_at_1"] == pytest.approx(0.0, abs=1e-12)
        assert d["hpp_at_1"] == pytest.approx(1.0, abs=1e-12)
        assert d["flap_hp_at_1"] == pytest.approx(0.0, abs=1e-12)

    def test_k_test(self):
        d = hyp.point_derivatives(h_test(), k_test())
        assert d["k_at_1"] == pytest.approx(0.0, abs=1e-14)
        assert d["kp_at_1"] == pytest.approx(0.0, abs=1e-12)
        assert d["flap_k_at_1"] == pytest.approx(1.0, abs=1e-12)

    def test_constant(self):
        one = CircleFunction.constant(1.0, 1024)
        d = hyp.point_derivatives(one, one - 1.0)
        assert d["h_at_1"] == 1.0
        for key in ("hp_at_1", "hpp_at_1", "flap_h_at_1", "flap_hp_at_1", "kp_at_1", "flap_k_at_1"):
            assert d[key] == 0.0

    def test_not_stationary(self):
        h = CircleFunction.from_trig(cos=[2.0, 1.0], sin=[0.5], n_grid=1024)
        with pytest.raises(NotStationary):
            hyp.point_derivatives(h, k_test())
        assert not hyp.point_derivatives(h, k_test(), strict=False)["h1_satisfied"]

    def test_warns_when_k_nonzero_at_one(self, caplog):
        hyp.point_derivatives(h_test(), k_test() + 1.0)
        assert "k(1)" in caplog.text

    def test_large_grid_stays_exact(self):
        d = hyp.point_derivatives(h_test(65536), k_test(65536))
        assert abs(d["hpp_at_1"] - 1.0) < 1e-12 and abs(d["flap_h_at_1"]) < 1e-12


class TestQForm:
    def test_hhat_of_h_test(self):
        hh = hyp.hhat(h_test())
        assert np.allclose(hh.values, 0.5 * np.cos(hh.theta), atol=1e-12)

    def test_hhat_at_zero(self):
        h = admissible([0.3, -0.2, 0.1, 0.0], [0.2, 0.1, 0.0])
        hpp = hyp.point_derivatives(h, k_test())["hpp_at_1"]
        assert hyp.hhat(h).values[0] == pytest.approx(hpp / 2, abs=1e-8)

    def test_spectral_h_test(self):
        assert hyp.q_form_spectral(h_test()) == pytest.approx(Q_TEST, rel=1e-12)

    def test_closed_form_multiplier_sum(self):
        # hhat = cos/2: coefficients 1/4 on modes +-1, Q = 2 pi^2 sum |c_n|^2/|n|
        assert 2 * np.pi**2 * (2 * 0.25**2) == pytest.approx(Q_TEST)

    def test_spectral_constant(self):
        assert hyp.q_form_spectral(CircleFunction.constant(3.0, 1024)) == 0.0

    def test_quadrature_h_test(self):
        assert hyp.q_form_quadrature(h_test()) == pytest.approx(Q_TEST, rel=1e-4)

    def test_quadrature_constant(self):
        assert abs(hyp.q_form_quadrature(CircleFunction.constant(3.0, 1024))) < 1e-10

    def test_scaling(self):
        h2 = h_test() * 2.0
        assert hyp.q_form_spectral(h2) == pytest.approx(4 * Q_TEST, rel=1e-12)
        assert hyp.q_form_quadrature(h2) == pytest.approx(4 * Q_TEST, rel=1e-4)

    def test_unbounded_hhat_detected(self):
        h = CircleFunction.from_trig(cos=[2.0, 0.5], sin=[1.0], n_grid=1024)
        with pytest.raises(HypothesisH1Violated):
            hyp.q_form_spectral(h)

    @given(
        st.lists(st.floats(-1, 1), min_size=2, max_size=6),
        st.lists(st.floats(-1, 1), min_size=0, max_size=6),
        st.floats(0.1, 3.0),
        st.floats(-2.0, 2.0),
    )
    @settings(max_examples=20, deadline=None)
    def test_affine_invariance(self, cos_tail, sin_tail, alpha, c):
        h = admissible(cos_tail, sin_tail)
        q = hyp.q_form_spectral(h)
        assert q >= -1e-12
        assert hyp.q_form_spectral(h * alpha + c) == pytest.approx(alpha**2 * q, rel=1e-9, abs=1e-12)

    def test_methods_agree_on_degree_8(self, rng):
        for _ in range(3):
            h = admissible(rng.normal(size=8) * 0.3, rng.normal(size=8) * 0.3)
            qs = hyp.q_form_spectral(h)
            assert qs > 0
            assert hyp.q_form_quadrature(h) == pytest.approx(qs, rel=1e-4)


class TestConditions:
    def test_nondeg_h_test(self):
        r = hyp.evaluate(h_test(), k_test())
        assert r.nondeg_value == pytest.approx(0.8, abs=1e-12)
        assert hyp.check_nondeg(r) == (r.nondeg_value, True)

    def test_cond_h_test(self):
        r = hyp.evaluate(h_test(), k_test())
        assert r.cond_value == pytest.approx(1.0, abs=1e-12)
        assert r.all_satisfied and r.failed() == []

    def test_constant_is_degenerate(self):
        one = CircleFunction.constant(1.0, 1024)
        r = hyp.evaluate(one, one - 1.0)
        assert r.nondeg_value == 0.0
        assert not r.nondeg_satisfied
        assert "nondeg" in r.failed()

    def test_report_fields_consistent(self, rng):
        h = admissible(rng.normal(size=5), rng.normal(size=4))
        k = CircleFunction.from_trig(cos=[-1.0, 1.0], sin=[0.4], n_grid=1024)
        r = hyp.evaluate(h, k)
        assert r.nondeg_value == hyp.nondeg_expression(r.hpp_at_1, r.q_of_h, r.h_at_1, r.flap_hp_at_1)
        assert r.cond_value == hyp.cond_expression(r.hpp_at_1, r.flap_k_at_1, r.kp_at_1, r.flap_hp_at_1)

    def test_to_dict_types(self):
        d = hyp.evaluate(h_test(), k_test()).to_dict()
        assert isinstance(d["h1_satisfied"], bool) and isinstance(d["q_of_h"], float)


class TestNondegShift:
    def test_no_shift_needed(self):
        assert hyp.nondeg_shift(hyp.evaluate(h_test(), k_test())) == 0.0

    def test_restores_nondeg(self):
        # nondeg vanishes at h(1) = 2Q/pi^2 = 0.5
        h = h_test() - 2.0
        r = hyp.evaluate(h, k_test())
        assert not r.nondeg_satisfied
        c = hyp.nondeg_shift(r, margin=0.05)
        r2 = hyp.evaluate(h + c, k_test())
        assert r2.nondeg_satisfied
        assert abs(r2.nondeg_value) == pytest.approx(0.05, rel=1e-8)

    def test_impossible(self):
        one = CircleFunction.constant(1.0, 1024)
        with pytest.raises(ValueError):
            hyp.nondeg_shift(hyp.evaluate(one, one - 1.0))
