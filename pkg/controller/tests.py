import math

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import FunnelViolation, InitialFunnelViolation, InvalidParameters
from controller.laws import (
    adaptive_rhs,
    controller_eval,
    filter_rhs,
    init_state,
    smoothed_envelope,
    smoothed_normalizer,
    step1_law,
    stepi_law,
    transform_errors,
)
from controller.models import ControllerGains, ControllerState, ScheduleSample, StepWorkspace
from perf_rate.models import EpsSchedule
from plant.builtin import builtin_example1, builtin_example2

finite = st.floats(-10.0, 10.0)


def example1_gains(sigma_bar=100.0):
    return ControllerGains(
        varsigma_z=(1.0,), varsigma_w=(), iota_theta=(0.1,), iota_gamma=(),
        sigma_bar=sigma_bar, T=0.5, rho0=3.0, rhoT=0.2, upsilon_rho=1.0, upsilon_sigma=0.4,
        eps=EpsSchedule.exponential(0.1),
    )


def example2_gains():
    return ControllerGains(
        varsigma_z=(5.0, 5.0), varsigma_w=(1.0,), iota_theta=(0.05, 0.05), iota_gamma=(0.1,),
        sigma_bar=100.0, T=0.5, rho0=0.5, rhoT=0.02, upsilon_rho=1.0, upsilon_sigma=0.2,
        eps=EpsSchedule.exponential(0.3),
    )


def sample(t=0.0, rho=3.0, rho_dot=0.0, sigma1=1.0, sigma2=1.0, eps=1e-9):
    return ScheduleSample(t, rho, rho_dot, sigma1, sigma2, eps)


class ControllerGainsTests(SimpleTestCase):

    def test_derived_schedules(self):
        gains = example1_gains()
        self.assertEqual(gains.n, 1)
        self.assertEqual(gains.funnel.value(0.0), 3.0)
        self.assertEqual(gains.schedule.sigma2(0.5), 100.0)
        self.assertEqual(gains.funnel.value(0.75), 0.2)

    def test_smoothing_floor_spares_leakage(self):
        gains = example2_gains().copy_with(eps=EpsSchedule.exponential(0.3, smoothing_floor=0.3))
        early = ScheduleSample.at(gains, 1.0)
        late = ScheduleSample.at(gains, 15.0)
        self.assertEqual(early.eps, math.exp(-0.3))
        self.assertEqual(late.eps, 0.3)
        self.assertAlmostEqual(late.sigma2, 100.0 * math.exp(-0.3 * 14.5), places=12)

    def test_invariants(self):
        gains = example2_gains()
        with self.assertRaises(InvalidParameters):
            gains.copy_with(varsigma_z=(0.5, 5.0))
        with self.assertRaises(InvalidParameters):
            gains.copy_with(sigma_bar=1.0)
        with self.assertRaises(InvalidParameters):
            gains.copy_with(rhoT=0.5)
        with self.assertRaises(InvalidParameters):
            gains.copy_with(varsigma_w=(1.0, 1.0))

    def test_state_packing(self):
        state = ControllerState((0.5,), (0.1, 0.2), (0.3,), 0.7)
        self.assertEqual(state.to_list(), [0.5, 0.1, 0.2, 0.3, 0.7])
        self.assertEqual(ControllerState.from_list(state.to_list(), 2), state)
        self.assertEqual(ControllerState.size(2), 5)
        self.assertEqual(ControllerState.size(1), 2)


class TransformErrorsTests(SimpleTestCase):

    def setUp(self):
        self.state = ControllerState((0.4,), (0.0, 0.0), (0.0,), 0.0)

    def test_examples(self):
        z, w = transform_errors(0.0, [1.0, 0.4], 1.0, 3.0, self.state.alpha_c)
        self.assertEqual(z, [0.0, 0.0])
        self.assertEqual(w, [])
        z, _ = transform_errors(0.0, [2.0], 0.0, 3.0, self.state.alpha_c)
        self.assertAlmostEqual(z[0], 2.0 / 3.0, places=15)

    def test_filter_errors(self):
        _, w = transform_errors(0.0, [0.1, 0.0], 0.0, 1.0, self.state.alpha_c, alpha=(0.1,))
        self.assertAlmostEqual(w[0], 0.3, places=15)

    def test_guard(self):
        with self.assertRaises(FunnelViolation) as ctx:
            transform_errors(0.7, [3.0], 0.0, 3.0, self.state.alpha_c)
        self.assertEqual(ctx.exception.t, 0.7)
        self.assertEqual(ctx.exception.z1, 1.0)
        with self.assertRaises(FunnelViolation):
            transform_errors(0.0, [-3.0 * (1 - 1e-10)], 0.0, 3.0, self.state.alpha_c)


class SmoothingTests(SimpleTestCase):

    def test_normalizer_examples(self):
        self.assertEqual(smoothed_normalizer(0.0, (3.0, 4.0), 1e-9), 0.0)
        self.assertEqual(smoothed_normalizer(1.0, (0.0, 0.0), 1e-9), 0.0)
        self.assertAlmostEqual(smoothed_normalizer(1.0, (3.0, 4.0), 1e-9), 5.0, places=9)

    def test_envelope_examples(self):
        self.assertEqual(smoothed_envelope(0.0, 2.0, 1e-9), 0.0)
        self.assertEqual(smoothed_envelope(1.0, 0.0, 1e-9), 0.0)
        self.assertAlmostEqual(smoothed_envelope(1.0, 2.0, 1e-9), 2.0, places=9)

    @settings(max_examples=300, deadline=None)
    @given(s=finite, phi=st.lists(finite, min_size=1, max_size=4), eps=st.floats(1e-6, 1.0))
    def test_normalizer_bounded_by_norm(self, s, phi, eps):
        norm = math.sqrt(sum(v * v for v in phi))
        self.assertLessEqual(abs(smoothed_normalizer(s, phi, eps)), norm * (1 + 1e-12) + 1e-300)
        self.assertGreaterEqual(s * smoothed_normalizer(s, phi, eps), 0.0)

    @settings(max_examples=300, deadline=None)
    @given(z=finite, psi=st.floats(0.0, 10.0), eps=st.floats(1e-6, 1.0))
    def test_envelope_realisation(self, z, psi, eps):
        self.assertGreaterEqual(z * smoothed_envelope(z, psi, eps), abs(z) * psi - eps - 1e-12)


class StepLawTests(SimpleTestCase):

    def setUp(self):
        self.gains = example1_gains()

    def test_step1_origin(self):
        alpha_bar, alpha, Phi, varphi, zeta = step1_law(
            sample(), 0.0, 0.4, 0.0, (0.0,), 0.0, 0.0, 0.0, self.gains, 0.5,
        )
        self.assertEqual((alpha_bar, alpha, varphi, zeta), (0.0, 0.0, 0.0, 0.0))
        self.assertEqual(len(Phi), 3)

    def test_step1_negative_feedback(self):
        alpha_bar, alpha, _, _, _ = step1_law(sample(), 0.3, 1.0, 0.0, (0.0,), 0.0, 0.0, 0.0, self.gains, 0.5)
        self.assertGreater(alpha_bar, 0.0)
        self.assertLess(alpha, 0.0)

    def test_step1_example1_small_eps(self):
        z1 = 2.0 / 3.0
        kappa1 = (1.0 / (1.0 - z1 * z1)) / (0.5 * 3.0)
        self.assertAlmostEqual(kappa1, 1.2, places=12)
        alpha_bar, alpha, _, _, zeta = step1_law(
            sample(), z1, kappa1, 0.0, (2.0 * math.sin(2.0),), 0.0, 0.0, 0.0, self.gains, 0.5,
        )
        self.assertAlmostEqual(zeta, 1.0 / 18.0, places=12)
        self.assertAlmostEqual(alpha_bar, 2.0 + 1.0 / 18.0, places=12)
        self.assertAlmostEqual(alpha, -4.1111, places=4)

    def test_stepi_examples(self):
        gains = example2_gains()
        alpha_bar, alpha, Phi, _, _ = stepi_law(
            2, sample(), 0.0, 0.7, 0.5, 0.5, 0.0, (0.0,), 0.0, 0.0, 0.0, gains, 2.0,
        )
        self.assertEqual(alpha, 0.0)
        self.assertEqual(Phi[0], 0.7)

    @settings(max_examples=300, deadline=None)
    @given(
        z=finite, z_prev=finite, c_dot=finite, phi=finite, psi=st.floats(0.0, 10.0),
        theta=st.floats(0.0, 10.0), eps=st.floats(1e-9, 1.0),
    )
    def test_stepi_bounded(self, z, z_prev, c_dot, phi, psi, theta, eps):
        gains = example2_gains()
        alpha_bar, alpha, _, _, _ = stepi_law(
            2, sample(eps=eps), z, z_prev, 0.5, 0.8, c_dot, (phi,), psi, psi, theta, gains, 2.0,
        )
        self.assertLessEqual(abs(alpha), abs(alpha_bar) / 2.0 * (1 + 1e-12))


class FilterAndAdaptationTests(SimpleTestCase):

    def setUp(self):
        self.gains = example2_gains()

    def test_filter_examples(self):
        self.assertEqual(filter_rhs(1, 0.0, 2.0, 1.0, 5.0, self.gains, 0.1), 0.0)
        self.assertAlmostEqual(filter_rhs(1, 0.3, 2.0, 0.0, 5.0, self.gains, 0.1), -(1.0 * 5.0 + 2.0) * 0.3, places=14)

    @settings(max_examples=300, deadline=None)
    @given(w=finite, gamma=st.floats(0.0, 10.0), eps=st.floats(1e-9, 1.0))
    def test_filter_saturation_bounded(self, w, gamma, eps):
        linear = -(1.0 * 2.0 + 0.5) * w
        self.assertLessEqual(abs(filter_rhs(1, w, 0.5, gamma, 2.0, self.gains, eps) - linear), gamma * (1 + 1e-12) + 1e-14)

    def workspace(self, z, w, varphi, sigma2=2.0):
        return StepWorkspace(
            t=0.0, e=0.0, z=z, w=w, lam=1.0, kappa=(1.0, 0.5), zeta=(0.0, 0.0), Phi=((), ()),
            varphi=varphi, alpha_bar=(0.0, 0.0), alpha=(0.0, 0.0), alpha_c_dot=(0.0,),
            schedules=sample(sigma2=sigma2),
        )

    def test_pure_leakage(self):
        state = ControllerState((0.0,), (1.0, 1.0), (1.0,), 0.0)
        theta_dot, gamma_dot, r_dot = adaptive_rhs(self.workspace((0.0, 0.0), (0.0,), (0.0, 0.0)), state, self.gains)
        self.assertEqual(theta_dot, [-2 * 0.05 * 2.0, -2 * 0.05 * 2.0])
        self.assertEqual(gamma_dot, [-2 * 0.1 * 2.0])
        self.assertEqual(r_dot, 0.0)

    def test_estimates_grow_from_zero(self):
        state = ControllerState((0.0,), (0.0, 0.0), (0.0,), 0.0)
        z = (-0.4, 0.3)
        varphi = tuple(smoothed_normalizer(k * v, (1.0, 2.0), 0.1) for k, v in zip((1.0, 0.5), z))
        theta_dot, gamma_dot, _ = adaptive_rhs(self.workspace(z, (-0.2,), varphi), state, self.gains)
        self.assertTrue(all(v > 0 for v in theta_dot))
        self.assertAlmostEqual(gamma_dot[0], 0.1 * 0.2, places=15)

    def test_dynamic_signal_rate(self):
        model, _ = builtin_example2()
        state = ControllerState((0.0,), (0.0, 0.0), (0.0,), 1.0)
        _, _, r_dot = adaptive_rhs(self.workspace((0.0, 0.0), (0.0,), (0.0, 0.0)), state, self.gains, model.dyn_signal, 0.2)
        self.assertAlmostEqual(r_dot, -0.371, places=12)


class ControllerEvalTests(SimpleTestCase):

    def test_example1_initial_control(self):
        model, reference = builtin_example1()
        gains = example1_gains()
        state = init_state(model.knowledge(), reference, gains, [2.0])
        self.assertEqual(state, ControllerState((), (0.0,), (), 0.0))
        u, rhs, workspace = controller_eval(0.0, [2.0], state, model.knowledge(), reference, gains)
        self.assertAlmostEqual(workspace.z[0], 2.0 / 3.0, places=15)
        self.assertAlmostEqual(workspace.lam, 1.8, places=12)
        self.assertAlmostEqual(workspace.kappa[0], 1.2, places=12)
        alpha_bar = 2.0 + 1.0 / 18.0
        expected = -0.8 * alpha_bar ** 2 / (0.5 * math.sqrt((0.8 * alpha_bar) ** 2 + 1.0))
        self.assertAlmostEqual(u, expected, places=12)
        self.assertAlmostEqual(u, -3.5126, places=3)
        self.assertEqual(u, workspace.u)
        self.assertEqual(rhs.alpha_c, ())

    def test_initial_control_independent_of_sigma_bar(self):
        model, reference = builtin_example1()
        controls = []
        for sigma_bar in (20.0, 30.0, 50.0, 100.0):
            gains = example1_gains(sigma_bar)
            state = init_state(model.knowledge(), reference, gains, [2.0])
            controls.append(controller_eval(0.0, [2.0], state, model.knowledge(), reference, gains)[0])
        for u in controls[1:]:
            self.assertLessEqual(abs(u - controls[0]), 1e-9 * abs(controls[0]))

    def test_zero_errors_after_T(self):
        model, reference = builtin_example1()
        state = ControllerState((), (0.0,), (), 0.0)
        u, rhs, _ = controller_eval(1.0, [0.0], state, model.knowledge(), reference, example1_gains())
        self.assertEqual(u, 0.0)
        self.assertEqual(rhs.to_list(), [0.0, 0.0])

    def test_idempotent(self):
        model, reference = builtin_example2()
        gains = example2_gains()
        state = ControllerState((0.3,), (0.1, 0.2), (0.05,), 0.4)
        first = controller_eval(0.3, [0.25, 0.1], state, model.knowledge(), reference, gains)
        second = controller_eval(0.3, [0.25, 0.1], state, model.knowledge(), reference, gains)
        self.assertEqual(first, second)

    def test_example2_filter_seeding(self):
        model, reference = builtin_example2()
        gains = example2_gains()
        state = init_state(model.knowledge(), reference, gains, [0.2, 0.1])
        u, rhs, workspace = controller_eval(0.0, [0.2, 0.1], state, model.knowledge(), reference, gains)
        self.assertEqual(state.alpha_c[0], workspace.alpha[0])
        self.assertEqual(workspace.w, (0.0,))
        self.assertEqual(rhs.alpha_c, (0.0,))
        self.assertTrue(math.isfinite(u))
        self.assertEqual(rhs.r, 0.625 + 2.5 * 0.2 ** 4)

    def test_sigma_schedules_match_gain_schedule(self):
        model, reference = builtin_example2()
        gains = example2_gains()
        state = init_state(model.knowledge(), reference, gains, [0.2, 0.1])
        for t in (0.0, 0.2, 0.5, 3.0):
            _, _, workspace = controller_eval(t, [reference.y_d(t), 0.1], state, model.knowledge(), reference, gains)
            self.assertEqual(workspace.schedules.sigma1, gains.schedule.sigma1_value(t))
            self.assertEqual(workspace.schedules.sigma2, gains.schedule.sigma2(t))

    def test_initial_funnel_violation(self):
        model, reference = builtin_example1()
        with self.assertRaises(InitialFunnelViolation):
            init_state(model.knowledge(), reference, example1_gains(), [3.5])

    def test_negative_initial_estimate_rejected(self):
        model, reference = builtin_example1()
        with self.assertRaises(InvalidParameters):
            init_state(model.knowledge(), reference, example1_gains(), [2.0], theta_hat0=[-1.0])
