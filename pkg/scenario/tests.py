import json
import math
import tempfile
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.exceptions import ConfigError
from scenario.exporters import trajectory_columns, write_run
from scenario.parsers import load_config, parse_config, resolve_config_path
from scenario.serializers import RunMetricsSerializer, validate_parsed
from sim.models import RunOutcome, RunStatus

METRICS_FIELDS = {'status', 'energy', 'e_at_T', 'max_funnel_ratio', 'final_error', 'max_abs_u',
                  'sigma_bar', 'T', 'dt', 'horizon'}


def bundled_text(name):
    return (Path(settings.SCENARIO_CONFIG_DIR) / f"{name}.cfg").read_text(encoding='utf-8')


def short_config(directory, name='example1', horizon='0.6'):
    """Copie d'un scénario fourni avec un horizon court"""
    text = bundled_text(name)
    lines = [
        f"sim.horizon = {horizon}" if line.startswith('sim.horizon') else line
        for line in text.splitlines()
    ]
    path = Path(directory) / f"{name}_short.cfg"
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path


def run_command(name, **options):
    stdout, stderr = StringIO(), StringIO()
    call_command(name, stdout=stdout, stderr=stderr, **options)
    return stdout.getvalue(), stderr.getvalue()


class ParserTests(SimpleTestCase):

    def test_sections_comments_and_lines(self):
        parsed = parse_config(
            "# scénario\n"
            "plant.name = example1   # premier ordre\n"
            "\n"
            "gains.varsigma_z = 1, 2\n"
            "init.xi0 =\n"
        )
        self.assertEqual(parsed.sections['plant'], {'name': 'example1'})
        self.assertEqual(parsed.sections['gains'], {'varsigma_z': '1, 2'})
        self.assertEqual(parsed.sections['init'], {'xi0': ''})
        self.assertEqual(parsed.lines['gains.varsigma_z'], 4)
        self.assertEqual(parsed.line_of('gains'), 4)
        self.assertIsNone(parsed.line_of('sim'))

    def test_missing_assignment(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config("plant.name = example1\ngains.sigma_bar 100\n")
        self.assertEqual(ctx.exception.line, 2)

    def test_unknown_section(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config("solver.dt = 1e-4\n")
        self.assertEqual(ctx.exception.field, 'solver.dt')
        self.assertIn('ligne 1', str(ctx.exception))

    def test_duplicate_key(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config("sim.dt = 1e-4\nsim.dt = 1e-3\n")
        self.assertEqual(ctx.exception.line, 2)

    def test_override_drops_line(self):
        parsed = parse_config("gains.sigma_bar = 100\n")
        parsed.set('gains.sigma_bar', '20')
        self.assertEqual(parsed.sections['gains']['sigma_bar'], '20')
        self.assertIsNone(parsed.line_of('gains.sigma_bar'))

    def test_resolve_bundled(self):
        self.assertEqual(resolve_config_path('example1').name, 'example1.cfg')
        self.assertEqual(resolve_config_path('example2.cfg').name, 'example2.cfg')
        with self.assertRaises(ConfigError):
            resolve_config_path('missing.cfg')


class ScenarioValidationTests(SimpleTestCase):

    def test_bundled_example1(self):
        config = validate_parsed(load_config('example1'))
        self.assertEqual(config.plant, 'example1')
        self.assertEqual(config.gains.sigma_bar, 100.0)
        self.assertEqual(config.gains.eps.decay, 0.1)
        self.assertEqual(config.gains.eps.smoothing_floor, 0.0)
        self.assertEqual(config.initial.x0, (2.0,))
        self.assertEqual(config.sim.horizon, 10.0)
        scenario = config.build()
        self.assertEqual(scenario.plant.n, 1)

    def test_bundled_example2(self):
        config = validate_parsed(load_config('example2'))
        self.assertEqual(config.gains.varsigma_z, (5.0, 5.0))
        self.assertEqual(config.gains.iota_theta, (0.05, 0.05))
        self.assertEqual(config.initial.x0, (0.2, 0.1))
        self.assertEqual(config.initial.xi0, (0.1,))
        self.assertEqual(config.gains.eps.smoothing_floor, 0.3)
        self.assertEqual(config.gains.eps.value(20.0), math.exp(-6.0))
        self.assertEqual(config.plant_options, {'state_bound': 2.0})
        self.assertEqual(config.build().plant.n0, 1)

    def test_scalar_broadcast(self):
        parsed = load_config('example2')
        parsed.set('gains.varsigma_z', '5')
        self.assertEqual(validate_parsed(parsed).gains.varsigma_z, (5.0, 5.0))

    def test_simulation_defaults(self):
        text = '\n'.join(line for line in bundled_text('example1').splitlines() if not line.startswith('sim.'))
        config = validate_parsed(parse_config(text))
        self.assertEqual(config.sim.dt, settings.SIMULATION_DEFAULTS['dt'])
        self.assertEqual(config.sim.log_stride, settings.SIMULATION_DEFAULTS['log_stride'])

    def assertConfigError(self, parsed, field):
        with self.assertRaises(ConfigError) as ctx:
            validate_parsed(parsed)
        self.assertEqual(ctx.exception.field, field)
        return ctx.exception

    def test_field_error_reports_line(self):
        parsed = load_config('example1')
        parsed.set('gains.sigma_bar', '1', line=7)
        error = self.assertConfigError(parsed, 'gains.sigma_bar')
        self.assertEqual(error.line, 7)
        self.assertTrue(str(error).startswith('ligne 7 (gains.sigma_bar)'))

    def test_bundled_line_numbers(self):
        text = bundled_text('example1').replace('gains.sigma_bar = 100', 'gains.sigma_bar = abc')
        expected = next(k for k, line in enumerate(text.splitlines(), start=1) if line.startswith('gains.sigma_bar'))
        error = self.assertConfigError(parse_config(text), 'gains.sigma_bar')
        self.assertEqual(error.line, expected)

    def test_cross_field_errors(self):
        parsed = load_config('example1')
        parsed.set('gains.rhoT', '5')
        self.assertConfigError(parsed, 'gains')

        parsed = load_config('example1')
        parsed.set('init.x0', '1, 2')
        self.assertConfigError(parsed, 'init.x0')

        parsed = load_config('example1')
        parsed.set('sim.dt', '0.01')
        parsed.set('sim.log_stride', '1')
        self.assertConfigError(parsed, 'sim')

    def test_unknown_and_missing_fields(self):
        parsed = load_config('example1')
        parsed.set('gains.kappa', '1')
        self.assertConfigError(parsed, 'gains.kappa')

        parsed = load_config('example1')
        del parsed.sections['gains']['T']
        self.assertConfigError(parsed, 'gains.T')

        parsed = load_config('example1')
        parsed.set('plant.name', 'example3')
        self.assertConfigError(parsed, 'plant.name')

        parsed = load_config('example1')
        parsed.set('init.x0', 'deux')
        self.assertConfigError(parsed, 'init.x0')

        parsed = load_config('example2')
        parsed.set('gains.eps_smoothing_floor', '-0.1')
        self.assertConfigError(parsed, 'gains.eps_smoothing_floor')


class ExporterTests(SimpleTestCase):

    def test_columns(self):
        self.assertEqual(
            ','.join(trajectory_columns(1, 0)),
            't,x1,r,z1,u,sigma1,sigma2,rho,e,theta_hat1',
        )
        self.assertEqual(
            trajectory_columns(2, 1),
            ['t', 'x1', 'x2', 'xi1', 'r', 'z1', 'z2', 'w1', 'u', 'alpha1', 'alpha_c1',
             'sigma1', 'sigma2', 'rho', 'e', 'theta_hat1', 'theta_hat2', 'gamma_hat1'],
        )

    def test_metrics_without_trajectory(self):
        scenario = validate_parsed(load_config('example1')).build()
        outcome = RunOutcome(RunStatus.INITIAL_FUNNEL_VIOLATION, message='hors entonnoir')
        data = RunMetricsSerializer(RunMetricsSerializer.payload(outcome, scenario)).data
        self.assertEqual(set(data), METRICS_FIELDS)
        self.assertEqual(data['status'], 'InitialFunnelViolation')
        self.assertIsNone(data['energy'])
        self.assertEqual(data['sigma_bar'], 100.0)

        with tempfile.TemporaryDirectory() as tmp:
            csv_path, json_path = write_run(tmp, scenario, outcome)
            self.assertEqual(csv_path.read_text(), 't,x1,r,z1,u,sigma1,sigma2,rho,e,theta_hat1\n')
            self.assertEqual(json.loads(json_path.read_text())['status'], 'InitialFunnelViolation')


class SimulateCommandTests(SimpleTestCase):

    def test_example1(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = short_config(tmp)
            stdout, _ = run_command('simulate', config=str(path), out=tmp)
            lines = (Path(tmp) / 'trajectory.csv').read_text().splitlines()
            self.assertEqual(lines[0], 't,x1,r,z1,u,sigma1,sigma2,rho,e,theta_hat1')
            self.assertEqual(len(lines), 1 + 601)
            self.assertEqual(len(lines[1].split(',')), 10)
            self.assertEqual(lines[1].split(',')[1], '2.0000000000000000e+00')

            metrics = json.loads((Path(tmp) / 'metrics.json').read_text())
            self.assertEqual(set(metrics), METRICS_FIELDS)
            self.assertEqual(metrics['status'], 'Completed')
            self.assertEqual(metrics['horizon'], 0.6)
            self.assertLess(metrics['max_funnel_ratio'], 1.0)
            self.assertIn('example1', stdout)

    def test_rerun_is_byte_identical(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = short_config(tmp)
            run_command('simulate', config=str(path), out=str(Path(tmp) / 'a'))
            run_command('simulate', config=str(path), out=str(Path(tmp) / 'b'))
            for name in ('trajectory.csv', 'metrics.json'):
                self.assertEqual(
                    (Path(tmp) / 'a' / name).read_bytes(),
                    (Path(tmp) / 'b' / name).read_bytes(),
                )

    def test_overrides(self):
        with tempfile.TemporaryDirectory() as tmp:
            run_command('simulate', config='example1', out=tmp, sigma_bar=20.0, horizon=0.6, dt=5e-5)
            metrics = json.loads((Path(tmp) / 'metrics.json').read_text())
            self.assertEqual(metrics['sigma_bar'], 20.0)
            self.assertEqual(metrics['dt'], 5e-5)

    def test_example2_columns(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = short_config(tmp, 'example2')
            run_command('simulate', config=str(path), out=tmp)
            header = (Path(tmp) / 'trajectory.csv').read_text().splitlines()[0].split(',')
            for column in ('w1', 'alpha1', 'alpha_c1', 'gamma_hat1', 'xi1'):
                self.assertIn(column, header)

    def test_missing_config(self):
        with self.assertRaises(CommandError) as ctx:
            run_command('simulate', config='missing.cfg')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_malformed_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bad.cfg'
            path.write_text(bundled_text('example1').replace('gains.rho0 = 3', 'gains.rho0 = -3'))
            with self.assertRaises(CommandError) as ctx:
                run_command('simulate', config=str(path), out=tmp)
            self.assertEqual(ctx.exception.returncode, 1)
            self.assertIn('gains', str(ctx.exception))

    def test_initial_funnel_violation(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'outside.cfg'
            path.write_text(bundled_text('example1').replace('init.x0 = 2', 'init.x0 = 3.5'))
            with self.assertRaises(CommandError) as ctx:
                run_command('simulate', config=str(path), out=tmp)
            self.assertEqual(ctx.exception.returncode, 2)
            metrics = json.loads((Path(tmp) / 'metrics.json').read_text())
            self.assertEqual(metrics['status'], 'InitialFunnelViolation')
            self.assertIsNone(metrics['energy'])


class SweepCommandTests(SimpleTestCase):

    def test_summary_in_input_order(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = short_config(tmp)
            run_command('sweep', config=str(path), out=tmp, param='sigma_bar', values='50,20', jobs=1)
            summary = json.loads((Path(tmp) / 'sweep_summary.json').read_text())
            self.assertEqual(summary['param'], 'sigma_bar')
            self.assertEqual(summary['values'], [50.0, 20.0])
            self.assertEqual([run['value'] for run in summary['runs']], [50.0, 20.0])
            self.assertTrue(all(run['status'] == 'Completed' for run in summary['runs']))
            self.assertTrue(all(math.isfinite(run['energy']) for run in summary['runs']))
            for name in ('sigma_bar=50', 'sigma_bar=20'):
                self.assertTrue((Path(tmp) / name / 'trajectory.csv').is_file())

    def test_single_value_matches_simulate(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = short_config(tmp)
            run_command('sweep', config=str(path), out=str(Path(tmp) / 'sweep'), param='sigma_bar', values='100', jobs=1)
            run_command('simulate', config=str(path), out=str(Path(tmp) / 'single'))
            self.assertEqual(
                (Path(tmp) / 'sweep' / 'sigma_bar=100' / 'trajectory.csv').read_bytes(),
                (Path(tmp) / 'single' / 'trajectory.csv').read_bytes(),
            )

    def test_failing_entry_isolated(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = short_config(tmp)
            with self.assertRaises(CommandError) as ctx:
                run_command('sweep', config=str(path), out=tmp, param='rho_T', values='0.2,5', jobs=1)
            self.assertEqual(ctx.exception.returncode, 1)
            summary = json.loads((Path(tmp) / 'sweep_summary.json').read_text())
            self.assertEqual([run['status'] for run in summary['runs']], ['Completed', 'InvalidParameters'])
            self.assertTrue((Path(tmp) / 'rho_T=0.2' / 'metrics.json').is_file())

    def test_invalid_values(self):
        with self.assertRaises(CommandError) as ctx:
            run_command('sweep', config='example1', param='sigma_bar', values='vingt', jobs=1)
        self.assertEqual(ctx.exception.returncode, 1)


class CheckCommandTests(SimpleTestCase):

    def test_report(self):
        stdout, _ = run_command('check', samples=2000, seed=7)
        report = json.loads(stdout)
        self.assertTrue(report['passed'])
        self.assertEqual(report['seed'], 7)
        names = [check['name'] for check in report['checks']]
        self.assertEqual(
            names,
            ['perf_rate', 'normalizer_bound', 'log_barrier_bound', 'envelope_bound', 'dynamic_signal'],
        )
        self.assertTrue(all(check['violations'] == 0 for check in report['checks']))

    def test_deterministic(self):
        first, _ = run_command('check', samples=500, seed=3)
        second, _ = run_command('check', samples=500, seed=3)
        self.assertEqual(first, second)

    def test_zero_samples(self):
        with self.assertRaises(CommandError) as ctx:
            run_command('check', samples=0, seed=7)
        self.assertEqual(ctx.exception.returncode, 1)

    def test_system_checks_still_available(self):
        stdout, _ = run_command('check', databases=[])
        self.assertIn('System check identified no issues', stdout)
        self.assertNotIn('"checks"', stdout)
