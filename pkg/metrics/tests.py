import math

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import CheckFailure, EmptyTrajectory, InvalidParameters
from controller.models import ControllerGains
from metrics.bounds import convergence_rate_constant, lyapunov_value, residual_bound
from metrics.summary import summarize
from metrics.checks import (
    check_dynamic_signal,
    check_envelope_bound,
    check_log_barrier_bound,
    check_normalizer_bound,
)
from perf_rate.models import EpsSchedule
from sim.models import TrajectoryRecord


def record(t, u=0.0, e=0.0, r=0.0, x1=0.0, rho=1.0, theta_hat=0.0):
    return TrajectoryRecord(
        t=t, x=(x1,), xi=(), r=r, z=(e / rho,), w=(), u=u, alpha=(), alpha_c=(),
        theta_hat=(theta_hat,), gamma_hat=(), sigma1=1.0, sigma2=1.0, rho=rho, e=e,
    )


def grid(horizon=10.0, count=1001):
    return [horizon * k / (count - 1) for k in range(count)]


class SummarizeTests(SimpleTestCase):

    def test_zero_control(self):
        summary = summarize([record(t) for t in grid()], T=0.5)
        self.assertEqual(summary.energy, 0.0)
        self.assertEqual(summary.max_abs_u, 0.0)

    def test_unit_control(self):
        summary = summarize([record(t, u=1.0) for t in grid()], T=0.5)
        self.assertAlmostEqual(summary.energy, 10.0, places=12)
        self.assertEqual(summary.signal_peaks['u'], (1.0,))

    def test_error_at_T_interpolated(self):
        records = [record(0.0, e=-1.0), record(1.0, e=-0.5), record(2.0, e=0.0)]
        summary = summarize(records, T=0.5)
        self.assertAlmostEqual(summary.e_at_T, 0.75)
        self.assertTrue(math.isnan(summarize(records, T=5.0).e_at_T))

    def test_final_error_and_funnel_ratio(self):
        records = [record(t, e=0.5 if t < 9.0 else 0.01, rho=2.0) for t in grid()]
        summary = summarize(records, T=0.5)
        self.assertAlmostEqual(summary.final_error, 0.01)
        self.assertAlmostEqual(summary.max_funnel_ratio, 0.25)

    def test_single_record(self):
        summary = summarize([record(0.0, u=3.0)], T=0.0)
        self.assertEqual(summary.energy, 0.0)
        self.assertEqual(summary.max_abs_u, 3.0)

    def test_empty(self):
        with self.assertRaises(EmptyTrajectory):
            summarize([], T=0.5)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-50.0, 50.0), min_size=2, max_size=40), st.floats(0.0, 1.0))
    def test_energy_monotone_under_domination(self, values, scale):
        times = [0.1 * k for k in range(len(values))]
        big = summarize([record(t, u=v) for t, v in zip(times, values)], T=0.0)
        small = summarize([record(t, u=scale * v) for t, v in zip(times, values)], T=0.0)
        self.assertGreaterEqual(big.energy, 0.0)
        self.assertLessEqual(small.energy, big.energy * (1 + 1e-12) + 1e-300)


class ResidualBoundTests(SimpleTestCase):

    def test_zero_residual(self):
        bound = residual_bound(0.0, 1.0, 100.0, 0.5, 0.0, 1.0, 0.2, gi_lower=(2.0,))
        self.assertEqual(bound.Omega, 0.0)
        self.assertEqual(bound.z1_bound, 0.0)
        self.assertEqual(bound.zi_bounds, (0.0,))

    def test_direct_evaluation(self):
        bound = residual_bound(1.0, 1.0, 100.0, 0.5, 10.0, 1.0, 0.2)
        expected = math.exp(-50.0) + 0.1 * (1.0 - math.exp(-50.0))
        self.assertAlmostEqual(bound.Omega, expected, places=15)
        self.assertAlmostEqual(bound.Omega, 0.1, places=12)
        self.assertEqual(bound.z1_bound, 0.2)

    def test_monotone_in_sigma_bar_and_chi_bar(self):
        omegas = [residual_bound(1.0, 1.0, s, 0.5, 10.0, 1.0, 0.2).Omega for s in (20.0, 30.0, 50.0, 100.0)]
        self.assertEqual(omegas, sorted(omegas, reverse=True))
        self.assertEqual(len(set(omegas)), 4)
        chis = [residual_bound(1.0, 1.0, 50.0, 0.5, c, 1.0, 0.2).Omega for c in (0.0, 1.0, 10.0)]
        self.assertEqual(chis, sorted(chis))
        self.assertEqual(len(set(chis)), 3)

    def test_invalid_inputs(self):
        with self.assertRaises(InvalidParameters):
            residual_bound(-1.0, 1.0, 100.0, 0.5, 10.0, 1.0, 0.2)
        with self.assertRaises(InvalidParameters):
            residual_bound(1.0, 1.0, 0.0, 0.5, 10.0, 1.0, 0.2)


class LyapunovTests(SimpleTestCase):

    def test_value(self):
        value = lyapunov_value(
            z=(0.5, 2.0), w=(1.0,), gain_lower=(1.0, 2.0),
            theta_tilde=(1.0, 1.0), gamma_tilde=(2.0,), iota_theta=(0.5, 0.5), iota_gamma=(1.0,),
        )
        expected = math.log(1.0 / 0.75) / 2.0 + 4.0 / 4.0 + 0.5 + 1.0 + 1.0 + 2.0
        self.assertAlmostEqual(value, expected, places=12)

    def test_zero_at_origin(self):
        self.assertEqual(lyapunov_value((0.0,), (), (0.5,), (0.0,), (), (0.1,), ()), 0.0)

    def test_convergence_rate_constant(self):
        gains = ControllerGains(
            varsigma_z=(5.0, 5.0), varsigma_w=(1.0,), iota_theta=(0.05, 0.05), iota_gamma=(0.1,),
            sigma_bar=100.0, T=0.5, rho0=0.5, rhoT=0.02, upsilon_rho=1.0, upsilon_sigma=0.2,
            eps=EpsSchedule.exponential(0.3),
        )
        self.assertAlmostEqual(convergence_rate_constant(gains), 0.1)


class InequalityCheckTests(SimpleTestCase):

    def test_checks_pass(self):
        for check in (check_normalizer_bound, check_log_barrier_bound, check_envelope_bound):
            with self.subTest(check=check.__name__):
                report = check(100000, seed=7)
                self.assertEqual(report.samples, 100000)
                self.assertEqual(report.violations, 0, report.counterexample)
                self.assertLessEqual(report.max_slack, 0.0)
                report.assert_passed()

    def test_deterministic(self):
        self.assertEqual(check_normalizer_bound(500, seed=3), check_normalizer_bound(500, seed=3))
        self.assertEqual(check_envelope_bound(500, seed=3), check_envelope_bound(500, seed=3))

    def test_zero_samples_rejected(self):
        for check in (check_normalizer_bound, check_log_barrier_bound, check_envelope_bound):
            with self.subTest(check=check.__name__):
                with self.assertRaises(InvalidParameters):
                    check(0, seed=0)


class DynamicSignalCheckTests(SimpleTestCase):

    def upsilon(self, x1):
        return 2.5 * x1 ** 4

    def test_closed_form_passes(self):
        # x₁ ≡ 0 : r(t) = d(1 − e^{−t}) pour r(0) = 0
        records = [record(t, r=0.625 * (1.0 - math.exp(-t))) for t in grid(10.0, 10001)]
        report = check_dynamic_signal(records, c_bar=1.0, upsilon_bar=self.upsilon, d=0.625)
        self.assertEqual(report.violations, 0, report.counterexample)
        self.assertEqual(report.samples, 10001)

    def test_negative_signal_fails(self):
        records = [record(t, r=-0.1) for t in grid(1.0, 11)]
        report = check_dynamic_signal(records, c_bar=1.0, upsilon_bar=self.upsilon, d=0.0)
        self.assertGreater(report.violations, 0)
        self.assertEqual(report.counterexample['property'], 'nonnegative')
        with self.assertRaises(CheckFailure):
            report.assert_passed()

    def test_wrong_rate_fails(self):
        records = [record(t, r=t) for t in grid(1.0, 11)]
        report = check_dynamic_signal(records, c_bar=1.0, upsilon_bar=self.upsilon, d=0.625)
        self.assertGreater(report.violations, 0)

    def test_empty(self):
        report = check_dynamic_signal([], c_bar=1.0, upsilon_bar=self.upsilon, d=0.625)
        self.assertEqual(report.samples, 0)
        self.assertTrue(report.passed)
