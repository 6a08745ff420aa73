import logging
import math

import numpy as np
from django.test import SimpleTestCase, tag

from core.exceptions import InvalidParameters, PlantAssumptionError
from controller.laws import controller_eval
from controller.models import ControllerGains, ControllerState, ScheduleSample
from metrics.checks import check_dynamic_signal
from perf_rate.models import EpsSchedule
from plant.builtin import builtin_example1, builtin_example2
from plant.dynamics import plant_rhs, uncertainty_envelope_excess
from plant.models import DynamicSignal
from sim.integrator import ClosedLoop, rk4_step, run_scenario
from sim.models import InitialConditions, RunStatus, Scenario, SimConfig, SweepParam
from sim.sweep import resolve_jobs, sweep

logger = logging.getLogger(__name__)

# Énergies de référence de la littérature pour σ̄ = 20, 30, 50, 100
REFERENCE_ENERGY = {20.0: 1066.0, 30.0: 1128.0, 50.0: 1231.0, 100.0: 1422.0}


def example1_scenario(sigma_bar=100.0, x0=2.0, dt=1e-4, horizon=1.0, log_stride=10):
    plant, reference = builtin_example1()
    gains = ControllerGains(
        varsigma_z=(1.0,), varsigma_w=(), iota_theta=(0.1,), iota_gamma=(),
        sigma_bar=sigma_bar, T=0.5, rho0=3.0, rhoT=0.2, upsilon_rho=1.0, upsilon_sigma=0.4,
        eps=EpsSchedule.exponential(0.1),
    )
    return Scenario(
        plant=plant,
        reference=reference,
        gains=gains,
        initial=InitialConditions(x0=(x0,)),
        sim=SimConfig(dt=dt, horizon=horizon, log_stride=log_stride),
    )


def example2_scenario(dt=1e-4, horizon=1.0, log_stride=10, x0=(0.2, 0.1), xi0=(0.1,), smoothing_floor=0.3,
                      **gain_changes):
    plant, reference = builtin_example2()
    gains = ControllerGains(
        varsigma_z=(5.0, 5.0), varsigma_w=(1.0,), iota_theta=(0.05, 0.05), iota_gamma=(0.1,),
        sigma_bar=100.0, T=0.5, rho0=0.5, rhoT=0.02, upsilon_rho=1.0, upsilon_sigma=0.2,
        eps=EpsSchedule.exponential(0.3, smoothing_floor=smoothing_floor),
    ).copy_with(**gain_changes)
    return Scenario(
        plant=plant,
        reference=reference,
        gains=gains,
        initial=InitialConditions(x0=x0, xi0=xi0),
        sim=SimConfig(dt=dt, horizon=horizon, log_stride=log_stride),
    )


def non_finite_regressor(i, x):
    return (math.inf,)


def assert_step_halving_agreement(test, coarse, fine, rel=1e-6):
    """e(t) journalisé aux mêmes instants pour dt et dt/2"""
    test.assertEqual(coarse.status, RunStatus.COMPLETED)
    test.assertEqual(fine.status, RunStatus.COMPLETED)
    test.assertEqual(len(coarse.records), len(fine.records))
    e_coarse = np.array([rec.e for rec in coarse.records])
    e_fine = np.array([rec.e for rec in fine.records])
    scale = np.max(np.abs(e_fine))
    test.assertLessEqual(np.max(np.abs(e_coarse - e_fine)), rel * scale)


def all_finite(records):
    for rec in records:
        for value in rec.as_dict().values():
            values = value if isinstance(value, tuple) else (value,)
            if not all(math.isfinite(v) for v in values):
                return False
    return True


class SimConfigTests(SimpleTestCase):

    def test_defaults(self):
        config = SimConfig()
        self.assertEqual(config.steps, 100000)
        self.assertEqual(config.log_stride, 10)

    def test_invalid(self):
        with self.assertRaises(InvalidParameters):
            SimConfig(dt=0.0)
        with self.assertRaises(InvalidParameters):
            SimConfig(log_stride=0)
        with self.assertRaises(InvalidParameters):
            SimConfig(dt=1e-3, horizon=1.0, log_stride=20)

    def test_scenario_consistency(self):
        scenario = example1_scenario()
        with self.assertRaises(InvalidParameters):
            scenario.copy_with(initial=InitialConditions(x0=(1.0, 2.0)))
        with self.assertRaises(InvalidParameters):
            scenario.copy_with(sim=SimConfig(dt=0.01, horizon=10.0, log_stride=1))
        with self.assertRaises(InvalidParameters):
            example2_scenario().copy_with(initial=InitialConditions(x0=(0.2, 0.1)))

    def test_with_param(self):
        scenario = example1_scenario()
        changed = scenario.with_param(SweepParam.SIGMA_BAR, 30)
        self.assertEqual(changed.gains.sigma_bar, 30.0)
        self.assertEqual(changed.label, 'sigma_bar=30')
        self.assertEqual(scenario.with_param('eps_decay', 0.2).gains.eps.decay, 0.2)
        self.assertEqual(scenario.with_param('rho_T', 0.1).gains.rhoT, 0.1)
        with self.assertRaises(InvalidParameters):
            scenario.with_param('rho_T', 5.0)
        with self.assertRaises(InvalidParameters):
            scenario.with_param('kappa', 1.0)


class IntegratorTests(SimpleTestCase):

    def test_rk4_exact_on_cubic(self):
        def fn(t, y):
            return np.array([3.0 * t * t])
        y = rk4_step(fn, 0.0, np.array([0.0]), 0.5)
        self.assertAlmostEqual(float(y[0]), 0.125, places=15)

    def test_rk4_exponential(self):
        def fn(t, y):
            return -y
        y, t, h = np.array([1.0]), 0.0, 0.01
        for _ in range(100):
            y = rk4_step(fn, t, y, h)
            t += h
        self.assertAlmostEqual(float(y[0]), math.exp(-1.0), places=10)

    def test_pack_unpack(self):
        scenario = example2_scenario()
        loop = ClosedLoop(scenario.plant, scenario.reference, scenario.gains, 1e-9)
        state = ControllerState((0.3,), (0.1, 0.2), (0.4,), 0.5)
        y = loop.pack([0.1, 0.2], [0.1], state)
        self.assertEqual(len(y), 2 + 1 + 5)
        x, xi, back = loop.unpack(y)
        self.assertEqual((x, xi, back), ([0.1, 0.2], [0.1], state))

    def test_zero_error_equilibrium(self):
        outcome = run_scenario(example1_scenario(x0=0.0, horizon=1.0))
        self.assertEqual(outcome.status, RunStatus.COMPLETED)
        self.assertEqual(len(outcome.records), 1001)
        for rec in outcome.records:
            self.assertEqual(rec.x, (0.0,))
            self.assertEqual(rec.u, 0.0)
            self.assertEqual(rec.theta_hat, (0.0,))
        self.assertEqual(outcome.metrics.energy, 0.0)

    def test_record_grid(self):
        outcome = run_scenario(example1_scenario(horizon=1.0))
        self.assertTrue(outcome.completed)
        times = [rec.t for rec in outcome.records]
        self.assertEqual(times[0], 0.0)
        self.assertAlmostEqual(times[-1], 1.0, places=12)
        self.assertEqual(len(times), 1001)
        self.assertEqual(outcome.records[0].x, (2.0,))
        self.assertLess(outcome.metrics.max_funnel_ratio, 1.0)
        self.assertTrue(all(rec.theta_hat[0] >= 0.0 for rec in outcome.records))

    def test_deterministic(self):
        first = run_scenario(example1_scenario(horizon=0.6))
        second = run_scenario(example1_scenario(horizon=0.6))
        self.assertEqual(first.records, second.records)
        self.assertEqual(first.metrics, second.metrics)

    def test_step_halving_agreement(self):
        coarse = run_scenario(example2_scenario(dt=1e-4, horizon=1.0, log_stride=10))
        fine = run_scenario(example2_scenario(dt=5e-5, horizon=1.0, log_stride=20))
        assert_step_halving_agreement(self, coarse, fine)

    def test_fast_path_matches_recorded_law(self):
        scenario = example2_scenario()
        loop = ClosedLoop(scenario.plant, scenario.reference, scenario.gains, 1e-9)
        state = ControllerState((0.3,), (0.1, 0.2), (0.05,), 0.4)
        y = loop.pack([0.25, 0.1], [0.1], state)
        u, rhs, _ = controller_eval(0.3, [0.25, 0.1], state, loop.knowledge, scenario.reference, scenario.gains)
        dx, dxi = plant_rhs(scenario.plant, 0.3, [0.25, 0.1], [0.1], u)
        self.assertEqual(loop(0.3, y).tolist(), [*dx, *dxi, *rhs.to_list()])
        self.assertEqual(loop.record(0.3, y).u, u)

    def test_schedule_shared_between_stages(self):
        scenario = example1_scenario()
        loop = ClosedLoop(scenario.plant, scenario.reference, scenario.gains, 1e-9)
        self.assertIs(loop.schedule(0.25), loop.schedule(0.25))
        self.assertEqual(loop.schedule(0.25), ScheduleSample.at(scenario.gains, 0.25))

    def test_non_finite_initial_control(self):
        scenario = example2_scenario()
        plant = scenario.plant.copy_with(regressor=non_finite_regressor)
        outcome = run_scenario(scenario.copy_with(plant=plant))
        self.assertEqual(outcome.status, RunStatus.NUMERICAL_BLOWUP)
        self.assertEqual(outcome.t_event, 0.0)
        self.assertEqual(outcome.records, ())
        self.assertIsNone(outcome.metrics)

    def test_initial_funnel_violation(self):
        outcome = run_scenario(example1_scenario(x0=3.0))
        self.assertEqual(outcome.status, RunStatus.INITIAL_FUNNEL_VIOLATION)
        self.assertEqual(outcome.records, ())
        self.assertIsNone(outcome.metrics)
        self.assertEqual(outcome.t_event, 0.0)

    def test_blowup_limit(self):
        scenario = example1_scenario(horizon=1.0)
        scenario = scenario.copy_with(sim=scenario.sim.copy_with(blowup_limit=1.0))
        outcome = run_scenario(scenario)
        self.assertEqual(outcome.status, RunStatus.NUMERICAL_BLOWUP)
        self.assertEqual(outcome.t_event, 0.0)
        self.assertEqual(outcome.records, ())

    def test_gain_assumption_violation_propagates(self):
        plant, reference = builtin_example2(state_bound=0.05)
        scenario = example2_scenario().copy_with(plant=plant)
        with self.assertRaises(PlantAssumptionError):
            run_scenario(scenario)

    def test_dynamic_signal_closed_form(self):
        # x ≡ 0 : ṙ = −r + d, donc r(t) = d(1 − e^{−t})
        scenario = example1_scenario(x0=0.0, horizon=2.0)
        plant = scenario.plant.copy_with(
            dyn_signal=DynamicSignal(c_bar=1.0, d=0.625, upsilon_bar=lambda x1: 2.5 * x1 ** 4),
        )
        outcome = run_scenario(scenario.copy_with(plant=plant))
        self.assertTrue(outcome.completed)
        for rec in outcome.records:
            self.assertAlmostEqual(rec.r, 0.625 * (1.0 - math.exp(-rec.t)), delta=1e-6)
        report = check_dynamic_signal(outcome.records, c_bar=1.0, upsilon_bar=lambda x1: 2.5 * x1 ** 4, d=0.625)
        self.assertTrue(report.passed, report.counterexample)


class SweepTests(SimpleTestCase):

    def test_resolve_jobs(self):
        with self.settings(DSC_PTC_JOBS=3):
            self.assertEqual(resolve_jobs(), 3)
        self.assertEqual(resolve_jobs(2), 2)
        with self.assertRaises(InvalidParameters):
            resolve_jobs(0)

    def test_empty(self):
        self.assertEqual(sweep(example1_scenario(), 'sigma_bar', []), [])

    def test_unknown_param(self):
        with self.assertRaises(InvalidParameters):
            sweep(example1_scenario(), 'kappa', [1.0])

    def test_order_and_isolation(self):
        scenario = example1_scenario(horizon=0.6)
        results = sweep(scenario, 'rho_T', [0.2, 5.0, 0.1], jobs=1)
        self.assertEqual([value for value, _ in results], [0.2, 5.0, 0.1])
        statuses = [outcome.status for _, outcome in results]
        self.assertEqual(statuses, [RunStatus.COMPLETED, RunStatus.INVALID_PARAMETERS, RunStatus.COMPLETED])
        self.assertIn('ρ', results[1][1].message)

    def test_single_value_matches_simulate(self):
        scenario = example1_scenario(horizon=0.6)
        [(value, outcome)] = sweep(scenario, 'sigma_bar', [100.0], jobs=1)
        self.assertEqual(outcome.records, run_scenario(scenario).records)

    def test_pool_matches_in_process(self):
        scenario = example1_scenario(horizon=0.6)
        values = [20.0, 50.0, 100.0]
        serial = sweep(scenario, 'sigma_bar', values, jobs=1)
        parallel = sweep(scenario, 'sigma_bar', values, jobs=2)
        self.assertEqual([v for v, _ in parallel], values)
        for (_, a), (_, b) in zip(serial, parallel):
            self.assertEqual(a.status, b.status)
            self.assertEqual(a.metrics, b.metrics)


@tag('acceptance')
class Example1AcceptanceTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.outcomes = {
            value: outcome
            for value, outcome in sweep(example1_scenario(horizon=10.0), 'sigma_bar', list(REFERENCE_ENERGY), jobs=1)
        }

    def test_runs_complete_inside_funnel(self):
        for sigma_bar, outcome in self.outcomes.items():
            with self.subTest(sigma_bar=sigma_bar):
                self.assertEqual(outcome.status, RunStatus.COMPLETED)
                self.assertLess(outcome.metrics.max_funnel_ratio, 1.0)
                self.assertLess(outcome.metrics.e_at_T, 0.2)

    def test_precision_improves_with_sigma_bar(self):
        errors = [self.outcomes[s].metrics.e_at_T for s in sorted(self.outcomes)]
        for smaller, larger in zip(errors, errors[1:]):
            self.assertGreater(smaller, larger)

    def test_energy_increases_with_sigma_bar(self):
        energies = [self.outcomes[s].metrics.energy for s in sorted(self.outcomes)]
        for lower, higher in zip(energies, energies[1:]):
            self.assertLess(lower, higher)
        for sigma_bar, energy in zip(sorted(self.outcomes), energies):
            deviation = (energy - REFERENCE_ENERGY[sigma_bar]) / REFERENCE_ENERGY[sigma_bar]
            logger.warning(f"σ̄={sigma_bar:g} : énergie {energy:.1f} (référence {REFERENCE_ENERGY[sigma_bar]:.0f}, écart {deviation:+.1%})")

    def test_initial_control_independent_of_sigma_bar(self):
        initial = [abs(outcome.records[0].u) for outcome in self.outcomes.values()]
        for value in initial[1:]:
            self.assertAlmostEqual(value / initial[0], 1.0, delta=1e-9)


@tag('acceptance')
class Example2AcceptanceTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.scenario = example2_scenario(horizon=20.0)
        cls.outcome = run_scenario(cls.scenario)
        cls.fine = run_scenario(example2_scenario(dt=5e-5, horizon=20.0, log_stride=20))

    def test_tracking(self):
        metrics = self.outcome.metrics
        self.assertEqual(self.outcome.status, RunStatus.COMPLETED)
        self.assertLess(metrics.max_funnel_ratio, 1.0)
        self.assertLess(metrics.e_at_T, 0.02)
        self.assertLess(metrics.final_error, 0.005)

    def test_signals_bounded(self):
        peaks = self.outcome.metrics.signal_peaks
        for name in ('u', 'r', 'w', 'theta_hat', 'gamma_hat', 'xi'):
            with self.subTest(signal=name):
                self.assertTrue(all(math.isfinite(v) for v in peaks[name]))
        self.assertTrue(all_finite(self.outcome.records))

    def test_gain_schedules(self):
        sigma_bar = self.scenario.gains.sigma_bar
        for rec in self.outcome.records:
            if rec.t >= 0.5:
                self.assertEqual(rec.sigma1, sigma_bar)
        late = [rec for rec in self.outcome.records if rec.t >= 10.5]
        self.assertTrue(late)
        self.assertLess(late[0].sigma2, 0.05 * sigma_bar)

    def test_uncertainty_envelope(self):
        plant = self.scenario.plant
        for rec in self.outcome.records:
            self.assertLessEqual(uncertainty_envelope_excess(plant, rec.t, rec.x, rec.xi), 1e-12)

    def test_dynamic_signal(self):
        signal = self.scenario.plant.dyn_signal
        report = check_dynamic_signal(self.outcome.records, signal.c_bar, signal.upsilon_bar, signal.d)
        report.assert_passed()

    def test_step_size_robustness(self):
        self.assertEqual(self.fine.status, RunStatus.COMPLETED)
        self.assertAlmostEqual(self.fine.metrics.energy / self.outcome.metrics.energy, 1.0, delta=1e-3)

    def test_step_halving_full_horizon(self):
        assert_step_halving_agreement(self, self.outcome, self.fine)


@tag('acceptance')
class GuardAcceptanceTests(SimpleTestCase):

    def test_destabilized_run_ends_cleanly(self):
        scenario = example2_scenario(
            horizon=20.0, x0=(0.45, 0.3), xi0=(0.3,), varsigma_z=(0.51, 0.01), sigma_bar=1.01,
        )
        outcome = run_scenario(scenario)
        self.assertIn(outcome.status, (RunStatus.COMPLETED, RunStatus.FUNNEL_VIOLATION))
        self.assertTrue(all_finite(outcome.records))
