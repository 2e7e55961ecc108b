import math

import numpy as np
import pytest

from hkv.analytic.gamma import GammaData
from hkv.analytic.kernels import (
    CutoffFunction,
    GaussianLogWeight,
    KernelKind,
    TestFunctionK,
    decay_profile,
    euler_factor,
    eval_cutoff,
    evaluate_kernel,
    phi_inf_direct,
    phi_inf_mellin,
    phi_u_closed_form,
    seam_check,
    v1_closed_form,
)
from hkv.errors import FitFailed, InvalidArgument, TailBoundExceedsTolerance


def phi_u(delta=0.6, u=1.5, p=5, kind=KernelKind.PHI_U, **kwargs):
    return CutoffFunction(kind=kind, delta=delta, u=u, p=p, **kwargs)


class TestTestFunction:
    def test_normalized_at_zero(self):
        assert TestFunctionK()(0) == 1
        k = TestFunctionK.for_gamma(GammaData(n=2, mu=(0.1 + 1j, -0.1 - 1j)))
        assert k(0) == 1

    def test_vanishes_at_mu_bar(self):
        g = GammaData(n=2, mu=(0.1 + 1j, -0.1 - 1j))
        k = TestFunctionK.for_gamma(g)
        for mb in g.mu_bar:
            assert abs(k(mb)) < 1e-14

    def test_trivial_data_gets_surrogate(self):
        assert TestFunctionK.for_gamma(GammaData(n=3)).kind.value == "gaussian_surrogate"

    def test_log_form(self):
        k = TestFunctionK(kind="vanishing_at_mu", mu_bar=(0.2 + 1j,))
        s = np.array([0.5 + 2j, -1 + 0.3j])
        assert np.allclose(np.exp(k.log(s)), k(s))

    def test_width_must_be_positive(self):
        with pytest.raises(InvalidArgument):
            TestFunctionK(width=0)


class TestV1:
    def test_small_argument(self):
        value = eval_cutoff(CutoffFunction(kind="V1"), 1e-3).value
        assert abs(value - 1) < 1e-2

    def test_large_argument(self):
        value = eval_cutoff(CutoffFunction(kind="V1"), 10.0).value
        assert abs(value) < 1e-6

    @pytest.mark.parametrize("y", [0.05, 0.7, 1.0, 1.3, 4.0])
    def test_closed_form(self, y):
        out = eval_cutoff(CutoffFunction(kind="V1"), y)
        assert abs(out.value - v1_closed_form(y)) < 1e-10
        assert out.tail_bound < 1e-10

    def test_rejects_non_positive(self):
        with pytest.raises(InvalidArgument):
            eval_cutoff(CutoffFunction(kind="V1"), 0.0)

    def test_short_contour_is_reported(self):
        with pytest.raises(TailBoundExceedsTolerance):
            eval_cutoff(CutoffFunction(kind="V1"), 0.5, sigma=1.0, T=2.0)

    def test_sigma_outside_strip(self):
        with pytest.raises(InvalidArgument):
            eval_cutoff(CutoffFunction(kind="V1"), 0.5, sigma=-1.0)


class TestV2:
    def test_abscissa_independence(self):
        f = CutoffFunction(kind="V2", gamma=GammaData(n=2), delta=0.6 + 0.3j)
        a = eval_cutoff(f, 0.8, sigma=0.5)
        b = eval_cutoff(f, 0.8, sigma=2.0)
        assert abs(a.value - b.value) < 2 * (a.tail_bound + b.tail_bound) + 1e-12

    def test_decays_for_large_argument(self):
        f = CutoffFunction(kind="V2", gamma=GammaData(n=2), delta=0.6)
        small, large = evaluate_kernel(f, [0.01, 100.0]).values
        assert abs(large) < 1e-6 < abs(small)

    def test_delta_outside_strip(self):
        with pytest.raises(InvalidArgument):
            CutoffFunction(kind="V2", delta=1.2)


class TestPhiU:
    @pytest.mark.parametrize("y", [0.5, 3.0, 5**1.5, 40.0])
    def test_closed_form(self, y):
        out = eval_cutoff(phi_u(), y)
        assert abs(out.value - phi_u_closed_form(y, 0.6, 1.5, 5)) < 1e-10

    def test_crossover_abscissa_independence(self):
        f = phi_u(delta=0.6 + 0.3j)
        y = 5**1.5
        a = eval_cutoff(f, y, sigma=-1.0)
        b = eval_cutoff(f, y, sigma=0.0)
        assert math.isfinite(abs(a.value))
        assert abs(a.value - b.value) < 2 * (a.tail_bound + b.tail_bound) + 1e-12

    def test_seam(self):
        left, right, bar = seam_check(phi_u())
        assert abs(left - right) < 1e-10 + bar
        assert abs(left + 0.5) < 1e-10

    def test_tilde_seam(self):
        f = phi_u(kind=KernelKind.PHI_TILDE_U, euler_num=(-1.0,))
        left, right, bar = seam_check(f)
        assert abs(left - right) < 1e-10 + bar


class TestDecayProfile:
    def test_small_y_residual(self):
        fit = decay_profile(phi_u(), "small_y")
        assert fit.slope >= 2 - 0.1

    def test_large_y(self):
        fit = decay_profile(phi_u(), "large_y")
        assert fit.slope <= -3.9

    def test_tilde_small_y(self):
        f = phi_u(kind=KernelKind.PHI_TILDE_U, euler_num=(0.5 + 0.5j, 0.5 - 0.5j))
        assert decay_profile(f, "small_y").slope >= 1.9

    def test_flat_window_fails(self):
        with pytest.raises(FitFailed):
            decay_profile(phi_u(), "large_y", window=(10.0, 10.0001))

    def test_wrong_kernel(self):
        with pytest.raises(InvalidArgument):
            decay_profile(CutoffFunction(kind="V1"), "small_y")


class TestPhiInfinity:
    def test_mellin_round_trip(self):
        g = GammaData(n=2)
        f = CutoffFunction(kind="phi_inf", gamma=g, delta=0.6 + 0.3j, f=7.0 * 5**2.5)
        ys = np.array([5.0, 40.0, 300.0])
        inverse = evaluate_kernel(f, ys).values
        direct = phi_inf_direct(ys, f)
        assert np.max(np.abs(inverse - direct)) < 1e-8

    def test_strip_independence(self):
        f = CutoffFunction(kind="phi_inf", gamma=GammaData(n=2), delta=0.6, f=100.0)
        a = eval_cutoff(f, 20.0, sigma=1.1)
        b = eval_cutoff(f, 20.0, sigma=2.0)
        assert abs(a.value - b.value) < 1e-10

    def test_mellin_value_is_finite(self):
        f = CutoffFunction(kind="phi_inf", gamma=GammaData(n=1), delta=0.5, f=10.0)
        assert np.isfinite(abs(phi_inf_mellin(1.5 + 2j, f)))


class TestGenericWeight:
    def test_gaussian_log_weight_mellin(self):
        w = GaussianLogWeight(center=50.0)
        v = np.linspace(math.log(50.0) - 10, math.log(50.0) + 10, 4001)
        s = 0.3 + 0.7j
        numeric = np.sum(w(np.exp(v)) * np.exp(s * v)) * (v[1] - v[0])
        assert abs(numeric - np.exp(w.log_mellin(s))) < 1e-6 * abs(numeric)

    def test_gl1_kernel_abscissa_independence(self):
        f = CutoffFunction(kind="Phi_gl1", gamma=GammaData(n=1))
        a = eval_cutoff(f, 0.02, sigma=-1.0)
        b = eval_cutoff(f, 0.02, sigma=0.2)
        assert abs(a.value - b.value) < 1e-10

    def test_tilde_kernel_uses_multiplier(self):
        g = GammaData(n=1)
        plain = CutoffFunction(kind="Phi_gl1", gamma=g)
        tilde = CutoffFunction(kind="Phi_tilde_gl1", gamma=g, p=5, euler_num=(1.0,), euler_den=(1.0,))
        a = eval_cutoff(plain, 0.05).value
        b = eval_cutoff(tilde, 0.05).value
        assert a != pytest.approx(b)

    def test_euler_factor(self):
        assert euler_factor(1.0, 5, (1.0,)) == pytest.approx(0.8)
        assert euler_factor(2.0, 3, ()) == 1
