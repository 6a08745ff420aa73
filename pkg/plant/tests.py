import math
import pickle

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import InvalidParameters, NumericalBlowup, PlantAssumptionError
from plant.builtin import builtin_example1, builtin_example2, get_builtin
from plant.dynamics import check_gain_bounds, plant_rhs, uncertainty_envelope_excess
from plant.models import DynamicSignal, PlantChoice


class Example1Tests(SimpleTestCase):

    def setUp(self):
        self.model, self.reference = builtin_example1()

    def test_construction(self):
        self.assertEqual(self.model.n, 1)
        self.assertEqual(self.model.n0, 0)
        self.assertEqual(self.model.gain_lower, (0.5,))
        self.assertEqual(self.model.gain_upper, (1.5,))
        self.assertIsNone(self.model.dyn_signal)

    def test_regressor_and_uncertainty(self):
        self.assertEqual(self.model.regressor(1, [2.0]), (2.0 * math.sin(2.0),))
        self.assertEqual(self.model.uncertainty(1, 0.3, [2.0], []), 0.0)

    def test_rhs_at_origin_time(self):
        dx, dxi = plant_rhs(self.model, 0.0, [2.0], [], 0.0)
        self.assertAlmostEqual(dx[0], 1.8186, places=4)
        self.assertEqual(dxi, [])

    def test_reference_is_zero(self):
        for t in (0.0, 1.0, 7.5):
            self.assertEqual(self.reference.y_d(t), 0.0)
            self.assertEqual(self.reference.y_d_dot(t), 0.0)

    @settings(max_examples=200, deadline=None)
    @given(t=st.floats(0.0, 20.0), x=st.floats(-50.0, 50.0))
    def test_gain_within_bounds(self, t, x):
        check_gain_bounds(self.model, t, [x])


class Example2Tests(SimpleTestCase):

    def setUp(self):
        self.model, self.reference = builtin_example2()

    def test_construction(self):
        self.assertEqual((self.model.n, self.model.n0), (2, 1))
        self.assertEqual(self.model.gain_lower, (1.0, 2.0))
        self.assertEqual(self.model.gain_upper, (5.0, 4.0))
        self.assertEqual(self.model.dyn_signal.r0, 0.0)

    def test_origin_is_equilibrium(self):
        dx, dxi = plant_rhs(self.model, 1.3, [0.0, 0.0], [0.0], 0.0)
        self.assertEqual(dx, [0.0, 0.0])
        self.assertEqual(dxi, [0.0])

    def test_rhs_hand_value(self):
        dx, _ = plant_rhs(self.model, 0.0, [0.2, 0.1], [0.1], 0.0)
        self.assertAlmostEqual(dx[0], 0.2 * math.exp(-0.1) + 1.04 * 0.1, places=14)
        self.assertAlmostEqual(dx[0], 0.2850, places=4)

    def test_control_enters_last_state(self):
        base, _ = plant_rhs(self.model, 0.0, [0.2, 0.1], [0.1], 0.0)
        pushed, _ = plant_rhs(self.model, 0.0, [0.2, 0.1], [0.1], 1.0)
        self.assertEqual(base[0], pushed[0])
        self.assertAlmostEqual(pushed[1] - base[1], 3.0 - math.cos(0.02), places=14)

    def test_dynamic_signal(self):
        signal = self.model.dyn_signal
        self.assertEqual(signal.rhs(0.0, 0.0), 0.625)
        self.assertAlmostEqual(signal.rhs(1.0, 0.2), -0.371, places=12)

    def test_reference(self):
        self.assertEqual(self.reference.y_d(0.0), 0.0)
        self.assertEqual(self.reference.y_d_dot(0.0), 0.75)
        self.assertEqual(self.reference.y_d_ddot(0.0), 0.0)

    def test_envelopes(self):
        self.assertAlmostEqual(self.model.psi1(1, [0.0, 5.0]), math.sqrt(0.1), places=15)
        self.assertEqual(self.model.psi1(2, [0.3, 0.4]), 0.0)
        self.assertAlmostEqual(self.model.psi2(2, 1.0), math.sqrt(1.1), places=15)

    @settings(max_examples=300, deadline=None)
    @given(
        t=st.floats(0.0, 20.0),
        x1=st.floats(-2.0, 2.0),
        x2=st.floats(-10.0, 10.0),
        xi=st.floats(-10.0, 10.0),
    )
    def test_uncertainty_within_structural_envelope(self, t, x1, x2, xi):
        self.assertLessEqual(uncertainty_envelope_excess(self.model, t, [x1, x2], [xi]), 1e-15)

    def test_gain_bound_violation_outside_region(self):
        with self.assertRaises(PlantAssumptionError):
            check_gain_bounds(self.model, 0.0, [3.0, 0.0])

    def test_state_bound_option(self):
        model, _ = builtin_example2(state_bound=3.0)
        self.assertEqual(model.gain_upper[0], 10.0)
        check_gain_bounds(model, 0.0, [3.0, 0.0])

    def test_picklable(self):
        model = pickle.loads(pickle.dumps(self.model))
        self.assertEqual(model.name, PlantChoice.EXAMPLE2)
        self.assertEqual(plant_rhs(model, 0.0, [0.2, 0.1], [0.1], 0.0), plant_rhs(self.model, 0.0, [0.2, 0.1], [0.1], 0.0))


class PlantModelTests(SimpleTestCase):

    def test_non_finite_rhs_raises(self):
        model, _ = builtin_example2()
        with self.assertRaises(NumericalBlowup) as ctx:
            plant_rhs(model, 0.5, [0.1, 0.1], [0.0], math.inf)
        self.assertEqual(ctx.exception.t, 0.5)

    def test_invalid_bounds(self):
        model, _ = builtin_example1()
        with self.assertRaises(InvalidParameters):
            model.copy_with(gain_lower=(2.0,))
        with self.assertRaises(InvalidParameters):
            model.copy_with(gain_lower=(0.5, 1.0))
        with self.assertRaises(InvalidParameters):
            model.copy_with(n0=1)

    def test_knowledge_hides_truth(self):
        model, _ = builtin_example2()
        knowledge = model.knowledge()
        self.assertFalse(hasattr(knowledge, 'true_gain'))
        self.assertFalse(hasattr(knowledge, 'uncertainty'))
        self.assertEqual(knowledge.gain_lower, (1.0, 2.0))

    def test_dynamic_signal_validation(self):
        with self.assertRaises(InvalidParameters):
            DynamicSignal(c_bar=0.0, d=0.1, upsilon_bar=abs)

    def test_registry(self):
        model, _ = get_builtin('example1')
        self.assertEqual(model.n, 1)
        model, _ = get_builtin('example2', r0=0.2)
        self.assertEqual(model.dyn_signal.r0, 0.2)
        with self.assertRaises(InvalidParameters):
            get_builtin('example3')
        with self.assertRaises(InvalidParameters):
            get_builtin('example1', r0=0.2)
