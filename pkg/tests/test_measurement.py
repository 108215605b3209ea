import math

import numpy as np
import pytest

from msdweak.measurement import (
    MeasurementModel,
    ModelError,
    amplitudes,
    beta_for_lambda,
    first_order_factor,
    lambda_of,
)
from msdweak.oracle import povm_completeness_defect
from msdweak.pauli import PauliOperator


class TestLambda:
    def test_ideal_limit(self):
        assert lambda_of(MeasurementModel.gaussian(50.0)) == pytest.approx(1.0, abs=1e-15)

    def test_no_measurement_limit(self):
        assert lambda_of(MeasurementModel.gaussian(0.0)) == 0.0

    def test_h_matches_gaussian(self):
        # 2 tanh(b/2) / (1 + tanh^2(b/2)) == tanh(b)
        for beta in (0.3, 1.0, 2.0, 3.7):
            lam_g = lambda_of(MeasurementModel.gaussian(beta))
            lam_h = lambda_of(MeasurementModel.coefficient_h(math.tanh(beta / 2)))
            assert abs(lam_g - lam_h) < 1e-15

    def test_eta_and_raw_pass_through(self):
        assert lambda_of(MeasurementModel.binary_eta(0.37)) == 0.37
        assert lambda_of(MeasurementModel.raw_lambda(0.5)) == 0.5

    def test_continuous_gaussian_composition(self):
        kappa = 1.7
        beta = math.atanh(math.erf(math.sqrt(kappa / 2)))
        assert lambda_of(MeasurementModel.continuous_gaussian(kappa)) == \
            pytest.approx(math.tanh(beta), abs=1e-15)

    def test_monotone_in_parameter(self):
        for ctor, grid in ((MeasurementModel.gaussian, np.linspace(0, 5, 40)),
                           (MeasurementModel.coefficient_h, np.linspace(0, 1, 40)),
                           (MeasurementModel.binary_eta, np.linspace(0, 1, 40)),
                           (MeasurementModel.continuous_gaussian, np.linspace(0, 6, 40))):
            vals = [lambda_of(ctor(float(v))) for v in grid]
            assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_out_of_range(self):
        with pytest.raises(ModelError):
            MeasurementModel.binary_eta(1.2)
        with pytest.raises(ModelError):
            MeasurementModel.gaussian(-0.1)

    def test_beta_for_lambda_inverts(self):
        assert beta_for_lambda(math.tanh(1.3)) == pytest.approx(1.3, abs=1e-12)
        assert beta_for_lambda(1.0) == math.inf


class TestFirstOrderFactor:
    def test_gaussian_is_exp_minus_two_beta(self):
        for beta in (0.5, 1.0, 2.5):
            assert first_order_factor(MeasurementModel.gaussian(beta)) == \
                pytest.approx(math.exp(-2 * beta), rel=1e-13)

    def test_limits(self):
        assert first_order_factor(MeasurementModel.raw_lambda(1.0)) == 0.0
        assert first_order_factor(MeasurementModel.raw_lambda(0.0)) == 1.0


class TestAmplitudes:
    def test_gaussian_form(self):
        beta = 1.4
        f1, f2 = amplitudes(MeasurementModel.gaussian(beta))
        norm = math.sqrt(2 * math.cosh(beta))
        assert f1 == pytest.approx(math.exp(beta / 2) / norm, rel=1e-13)
        assert f2 == pytest.approx(math.exp(-beta / 2) / norm, rel=1e-13)

    def test_binary_limits(self):
        assert amplitudes(MeasurementModel.binary_eta(1.0)) == (1.0, 0.0)
        f1, f2 = amplitudes(MeasurementModel.binary_eta(0.0))
        assert f1 == pytest.approx(f2)

    def test_minus_outcome_swaps(self):
        m = MeasurementModel.binary_eta(0.6)
        assert amplitudes(m, -1) == tuple(reversed(amplitudes(m, +1)))

    def test_povm_completeness_all_models(self):
        g = PauliOperator.from_string("XZY")
        models = ([MeasurementModel.gaussian(b) for b in np.linspace(0.1, 4, 10)]
                  + [MeasurementModel.binary_eta(e) for e in np.linspace(0, 1, 10)]
                  + [MeasurementModel.coefficient_h(h) for h in np.linspace(0, 1, 10)]
                  + [MeasurementModel.continuous_gaussian(k) for k in np.linspace(0.1, 5, 10)]
                  + [MeasurementModel.raw_lambda(v) for v in np.linspace(0, 1, 10)])
        for m in models:
            assert povm_completeness_defect(g, m) < 1e-12
