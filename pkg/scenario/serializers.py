"""
Serializers de validation des scénarios et de rendu des résultats
"""
import math

from django.conf import settings
from rest_framework import serializers
from rest_framework.settings import api_settings

from core.exceptions import ConfigError, InvalidParameters
from controller.models import ControllerGains
from perf_rate.models import EpsSchedule
from plant.builtin import get_builtin
from plant.models import PlantChoice
from scenario.models import OutputConfig, ScenarioConfig
from scenario.parsers import split_vector
from sim.models import InitialConditions, SimConfig, SweepParam


class VectorField(serializers.Field):
    """Vecteur de réels écrit `1, 2.5` (ou liste déjà découpée)"""
    default_error_messages = {
        'invalid': "Vecteur de réels attendu, reçu « {value} »",
        'non_finite': "Les composantes doivent être finies",
    }

    def to_internal_value(self, data):
        try:
            values = tuple(float(item) for item in split_vector(data))
        except (TypeError, ValueError):
            self.fail('invalid', value=data)
        if not all(math.isfinite(v) for v in values):
            self.fail('non_finite')
        return values

    def to_representation(self, value):
        return [float(v) for v in value]


class FiniteFloatField(serializers.FloatField):
    """Réel rendu en JSON strict : les valeurs non finies deviennent null"""

    def to_representation(self, value):
        value = float(value)
        return value if math.isfinite(value) else None


class StrictSectionSerializer(serializers.Serializer):
    """Section de scénario : toute clé non déclarée est une erreur"""

    def to_internal_value(self, data):
        unknown = sorted(set(data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: ["Champ inconnu"] for key in unknown})
        return super().to_internal_value(data)


class PlantSectionSerializer(StrictSectionSerializer):
    name = serializers.ChoiceField(choices=PlantChoice.choices)
    state_bound = serializers.FloatField(required=False)

    def validate_state_bound(self, value):
        if not value > 0:
            raise serializers.ValidationError("La borne d'état doit être strictement positive")
        return value


class GainsSectionSerializer(StrictSectionSerializer):
    """Gains de la loi de commande ; un scalaire est diffusé sur toutes les étapes"""
    varsigma_z = VectorField()
    varsigma_w = VectorField(required=False, default=())
    iota_theta = VectorField()
    iota_gamma = VectorField(required=False, default=())
    sigma_bar = serializers.FloatField()
    T = serializers.FloatField()
    rho0 = serializers.FloatField()
    rhoT = serializers.FloatField()
    upsilon_rho = serializers.FloatField(required=False, default=1.0)
    upsilon_sigma = serializers.FloatField()
    eps_decay = serializers.FloatField(required=False, default=0.1)
    eps_floor = serializers.FloatField(required=False, default=1e-12)
    eps_smoothing_floor = serializers.FloatField(required=False, default=0.0, min_value=0.0, max_value=1.0)

    def validate_sigma_bar(self, value):
        if not value > 1:
            raise serializers.ValidationError("σ̄ doit être strictement supérieur à 1")
        return value

    def validate(self, attrs):
        if not attrs['rhoT'] < attrs['rho0']:
            raise serializers.ValidationError("rhoT doit être inférieur à rho0")
        return attrs


class InitSectionSerializer(StrictSectionSerializer):
    x0 = VectorField()
    xi0 = VectorField(required=False, default=())
    r0 = serializers.FloatField(required=False, min_value=0.0)
    theta_hat0 = VectorField(required=False)
    gamma_hat0 = VectorField(required=False)


class SimSectionSerializer(StrictSectionSerializer):
    """Réglages du solveur ; les valeurs absentes viennent de SIMULATION_DEFAULTS"""
    dt = serializers.FloatField(required=False)
    horizon = serializers.FloatField(required=False)
    log_stride = serializers.IntegerField(required=False, min_value=1)
    guard_delta = serializers.FloatField(required=False)
    blowup_limit = serializers.FloatField(required=False)


class OutputsSectionSerializer(StrictSectionSerializer):
    dir = serializers.CharField(required=False)
    csv = serializers.BooleanField(required=False)
    metrics = serializers.BooleanField(required=False)


def broadcast(values, length):
    """Un scalaire est répété sur la longueur attendue"""
    if len(values) == 1 and length > 1:
        return values * length
    return values


class ScenarioSerializer(serializers.Serializer):
    """Scénario complet ; `validated_data['config']` porte le ScenarioConfig"""
    plant = PlantSectionSerializer()
    gains = GainsSectionSerializer()
    init = InitSectionSerializer()
    sim = SimSectionSerializer(required=False)
    outputs = OutputsSectionSerializer(required=False)

    def _section(self, name, build):
        try:
            return build()
        except InvalidParameters as exc:
            raise serializers.ValidationError({name: [str(exc)]})

    def validate(self, attrs):
        plant_attrs = dict(attrs['plant'])
        name = plant_attrs.pop('name')
        plant, _ = self._section('plant', lambda: get_builtin(name, **plant_attrs))
        n, n0 = plant.n, plant.n0

        raw = attrs['gains']
        gains = self._section('gains', lambda: ControllerGains(
            varsigma_z=broadcast(raw['varsigma_z'], n),
            varsigma_w=broadcast(raw['varsigma_w'], n - 1),
            iota_theta=broadcast(raw['iota_theta'], n),
            iota_gamma=broadcast(raw['iota_gamma'], n - 1),
            sigma_bar=raw['sigma_bar'],
            T=raw['T'],
            rho0=raw['rho0'],
            rhoT=raw['rhoT'],
            upsilon_rho=raw['upsilon_rho'],
            upsilon_sigma=raw['upsilon_sigma'],
            eps=EpsSchedule.exponential(
                raw['eps_decay'], floor=raw['eps_floor'], smoothing_floor=raw['eps_smoothing_floor'],
            ),
        ))
        if gains.n != n:
            raise serializers.ValidationError(
                {'gains': [f"varsigma_z doit contenir {n} valeur(s) pour {name}"]}
            )

        init = attrs['init']
        theta_hat0 = init.get('theta_hat0')
        gamma_hat0 = init.get('gamma_hat0')
        initial = InitialConditions(
            x0=init['x0'],
            xi0=init['xi0'],
            r0=init.get('r0'),
            theta_hat0=broadcast(theta_hat0, n) if theta_hat0 is not None else None,
            gamma_hat0=broadcast(gamma_hat0, n - 1) if gamma_hat0 is not None else None,
        )
        expected = [('x0', initial.x0, n), ('xi0', initial.xi0, n0)]
        if initial.theta_hat0 is not None:
            expected.append(('theta_hat0', initial.theta_hat0, n))
        if initial.gamma_hat0 is not None:
            expected.append(('gamma_hat0', initial.gamma_hat0, n - 1))
        for field_name, values, length in expected:
            if len(values) != length:
                raise serializers.ValidationError(
                    {'init': {field_name: [f"{length} valeur(s) attendue(s) pour {name}, reçu {len(values)}"]}}
                )

        sim = self._section('sim', lambda: SimConfig(**{**settings.SIMULATION_DEFAULTS, **attrs.get('sim', {})}))
        outputs = OutputConfig(**{'dir': settings.SIM_OUTPUT_DIR, **attrs.get('outputs', {})})
        config = ScenarioConfig(
            plant=name, gains=gains, initial=initial, sim=sim, outputs=outputs, plant_options=plant_attrs,
        )
        # contrôles croisés (dt < T/100, estimations initiales)
        self._section('sim', config.build)
        attrs['config'] = config
        return attrs


def _first_error(errors, prefix=''):
    """(champ pointé, message) de la première erreur d'un dictionnaire d'erreurs DRF"""
    if isinstance(errors, dict):
        key, value = next(iter(errors.items()))
        if key == api_settings.NON_FIELD_ERRORS_KEY:
            return _first_error(value, prefix)
        return _first_error(value, f"{prefix}.{key}" if prefix else key)
    if isinstance(errors, (list, tuple)):
        return _first_error(errors[0], prefix)
    return prefix, str(errors)


def validate_parsed(parsed):
    """Valide un ParsedConfig ; ConfigError avec ligne et champ à la première erreur"""
    serializer = ScenarioSerializer(data=parsed.sections)
    if not serializer.is_valid():
        field, message = _first_error(serializer.errors)
        raise ConfigError(message, line=parsed.line_of(field), field=field or None)
    config = serializer.validated_data['config']
    return config.copy_with(source=parsed.source)


class RunMetricsSerializer(serializers.Serializer):
    """Contenu de metrics.json"""
    status = serializers.CharField()
    energy = FiniteFloatField(allow_null=True)
    e_at_T = FiniteFloatField(allow_null=True)
    max_funnel_ratio = FiniteFloatField(allow_null=True)
    final_error = FiniteFloatField(allow_null=True)
    max_abs_u = FiniteFloatField(allow_null=True)
    sigma_bar = FiniteFloatField()
    T = FiniteFloatField()
    dt = FiniteFloatField()
    horizon = FiniteFloatField()

    @staticmethod
    def payload(outcome, scenario):
        metrics = outcome.metrics
        return {
            'status': str(outcome.status),
            'energy': metrics.energy if metrics else None,
            'e_at_T': metrics.e_at_T if metrics else None,
            'max_funnel_ratio': metrics.max_funnel_ratio if metrics else None,
            'final_error': metrics.final_error if metrics else None,
            'max_abs_u': metrics.max_abs_u if metrics else None,
            'sigma_bar': scenario.gains.sigma_bar,
            'T': scenario.gains.T,
            'dt': scenario.sim.dt,
            'horizon': scenario.sim.horizon,
        }


class SweepEntrySerializer(serializers.Serializer):
    """Ligne de la table de balayage"""
    value = FiniteFloatField()
    status = serializers.CharField()
    energy = FiniteFloatField(allow_null=True)
    e_at_T = FiniteFloatField(allow_null=True)
    max_funnel_ratio = FiniteFloatField(allow_null=True)
    dir = serializers.CharField()

    @staticmethod
    def payload(value, outcome, directory):
        metrics = outcome.metrics
        return {
            'value': value,
            'status': str(outcome.status),
            'energy': metrics.energy if metrics else None,
            'e_at_T': metrics.e_at_T if metrics else None,
            'max_funnel_ratio': metrics.max_funnel_ratio if metrics else None,
            'dir': str(directory),
        }


class SweepSummarySerializer(serializers.Serializer):
    """Contenu de sweep_summary.json"""
    param = serializers.ChoiceField(choices=SweepParam.choices)
    values = serializers.ListField(child=FiniteFloatField())
    runs = SweepEntrySerializer(many=True)
