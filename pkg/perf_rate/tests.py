import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import CheckFailure, InvalidParameters
from perf_rate.checks import check_perf_rate
from perf_rate.models import Direction, EpsForm, EpsSchedule, GainSchedule, PerfRateFn, PerfRateParams


class PerfRateFnTests(SimpleTestCase):

    def setUp(self):
        self.rho = PerfRateFn.funnel(3.0, 0.2, 0.5, 1.0)

    def test_endpoints(self):
        self.assertEqual(self.rho.value(0.0), 3.0)
        self.assertEqual(self.rho.value(0.5), 0.2)
        self.assertEqual(self.rho.value(0.75), 0.2)

    def test_midpoint_hand_value(self):
        self.assertAlmostEqual(self.rho.value(0.25), 1.6, places=12)

    def test_derivative_frozen(self):
        self.assertEqual(self.rho.derivative(0.0), 0.0)
        self.assertEqual(self.rho.derivative(1.0), 0.0)

    def test_derivative_matches_central_difference(self):
        h = 1e-6
        central = (self.rho.value(0.25 + h) - self.rho.value(0.25 - h)) / (2 * h)
        analytic = self.rho.derivative(0.25)
        self.assertLess(abs(analytic - central), 1e-6 * max(1.0, abs(analytic)))

    def test_c1_junction(self):
        self.assertLessEqual(abs(self.rho.derivative(0.5 - 1e-6)), 1e-3 * 2.8 / 0.5)

    def test_vectorised_matches_scalar(self):
        t = np.array([-1.0, 0.0, 0.1, 0.25, 0.49, 0.5, 2.0])
        np.testing.assert_allclose(self.rho.values(t), [self.rho.value(max(v, 0.0)) for v in t], rtol=1e-13)
        np.testing.assert_allclose(self.rho.derivatives(t), [self.rho.derivative(max(v, 0.0)) for v in t], rtol=1e-13, atol=1e-300)

    def test_direction_consistency(self):
        with self.assertRaises(InvalidParameters):
            PerfRateFn(PerfRateParams(0.2, 3.0, 0.5, 1.0), Direction.DECREASING)
        with self.assertRaises(InvalidParameters):
            PerfRateFn.rate(0.5, 0.5, 0.4)

    def test_params_must_be_positive(self):
        for bad in ({'mu0': 0.0}, {'T': -1.0}, {'upsilon': math.nan}):
            values = {'mu0': 3.0, 'muT': 0.2, 'T': 0.5, 'upsilon': 1.0, **bad}
            with self.assertRaises(InvalidParameters):
                PerfRateParams(**values)

    def test_constant_function_is_flagged(self):
        with self.assertLogs('perf_rate.models', level='WARNING'):
            PerfRateParams(1.0, 1.0, 0.5, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(
        mu0=st.floats(0.05, 50.0),
        muT=st.floats(0.05, 50.0),
        T=st.floats(0.2, 5.0),
        upsilon=st.floats(0.2, 3.0),
        frac=st.floats(0.0, 1.0, exclude_max=True),
    )
    def test_value_between_endpoints(self, mu0, muT, T, upsilon, frac):
        direction = Direction.DECREASING if mu0 >= muT else Direction.INCREASING
        f = PerfRateFn(PerfRateParams(mu0, muT, T, upsilon), direction)
        value = f.value(frac * T)
        self.assertGreaterEqual(value, min(mu0, muT) * (1 - 1e-12))
        self.assertLessEqual(value, max(mu0, muT) * (1 + 1e-12))


class EpsScheduleTests(SimpleTestCase):

    def test_exponential_value_and_floor(self):
        eps = EpsSchedule.exponential(0.3)
        self.assertEqual(eps.value(0.0), 1.0)
        self.assertAlmostEqual(eps.value(10.0), math.exp(-3.0), places=15)
        self.assertEqual(eps.value(1e6), 1e-12)

    def test_smoothing_floor(self):
        eps = EpsSchedule.exponential(0.3, smoothing_floor=0.3)
        self.assertEqual(eps.smoothing(0.0), 1.0)
        self.assertEqual(eps.smoothing(20.0), 0.3)
        self.assertAlmostEqual(eps.value(20.0), math.exp(-6.0), places=15)
        self.assertEqual(EpsSchedule.exponential(0.3).smoothing(20.0), eps.value(20.0))
        with self.assertRaises(InvalidParameters):
            EpsSchedule.exponential(0.3, smoothing_floor=-0.1)
        with self.assertRaises(InvalidParameters):
            EpsSchedule.exponential(0.3, smoothing_floor=2.0)

    def test_integral_closed_form(self):
        eps = EpsSchedule.exponential(0.1)
        self.assertAlmostEqual(eps.integral(10.0), 10.0 * (1 - math.exp(-1.0)), places=12)

    def test_custom_form_requires_callable(self):
        with self.assertRaises(InvalidParameters):
            EpsSchedule(form=EpsForm.CUSTOM)

    def test_custom_form_not_starting_at_one_warns(self):
        with self.assertLogs('perf_rate.models', level='WARNING'):
            EpsSchedule(form=EpsForm.CUSTOM, custom=lambda t: 0.5 / (1 + t))

    def test_custom_integral_not_available(self):
        eps = EpsSchedule(form=EpsForm.CUSTOM, custom=lambda t: 1 / (1 + t) ** 2)
        with self.assertRaises(InvalidParameters):
            eps.integral(1.0)


class GainScheduleTests(SimpleTestCase):

    def setUp(self):
        self.schedule = GainSchedule(PerfRateFn.rate(100.0, 0.5, 0.2), EpsSchedule.exponential(0.3), 0.5)

    def test_sigma2_examples(self):
        self.assertEqual(self.schedule.sigma2(0.0), 1.0)
        self.assertEqual(self.schedule.sigma2(0.5), 100.0)
        self.assertAlmostEqual(self.schedule.sigma2(10.5), 100.0 * math.exp(-3.0), places=12)
        self.assertAlmostEqual(self.schedule.sigma2(10.5), 4.9787, places=4)

    def test_sigma2_continuous_at_T(self):
        gap = abs(self.schedule.sigma2(0.5 - 1e-12) - self.schedule.sigma2(0.5))
        self.assertLessEqual(gap, 1e-9 * 100.0)

    def test_sigma1_freezes_at_sigma_bar(self):
        self.assertEqual(self.schedule.sigma1_value(3.0), 100.0)
        self.assertEqual(self.schedule.sigma_bar, 100.0)

    def test_sigma2_bounded_and_floored(self):
        t = np.linspace(0.0, 200.0, 2001)
        values = np.array([self.schedule.sigma2(v) for v in t])
        self.assertTrue(np.all(values <= 100.0))
        self.assertTrue(np.all(values >= 1e-12))

    def test_rejects_mismatched_T(self):
        with self.assertRaises(InvalidParameters):
            GainSchedule(PerfRateFn.rate(100.0, 1.0, 0.2), EpsSchedule.exponential(0.3), 0.5)


class CheckPerfRateTests(SimpleTestCase):

    def test_suite_passes(self):
        report = check_perf_rate(2000, seed=7)
        self.assertTrue(report.passed, report.counterexample)
        self.assertEqual(report.samples, 1000)
        report.assert_passed()

    def test_deterministic(self):
        self.assertEqual(check_perf_rate(50, seed=3), check_perf_rate(50, seed=3))

    def test_rejects_zero_samples(self):
        with self.assertRaises(InvalidParameters):
            check_perf_rate(0)

    def test_failed_report_raises(self):
        report = check_perf_rate(10, seed=1).copy_with(violations=1, counterexample={'t': 0.1})
        with self.assertRaises(CheckFailure) as ctx:
            report.assert_passed()
        self.assertEqual(ctx.exception.counterexample, {'t': 0.1})
