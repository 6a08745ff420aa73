"""
Bornes de diagnostic : ensemble résiduel Ω, fonction de Lyapunov composite
"""
import math

from core.models import require_nonnegative, require_positive
from metrics.models import ResidualBound


def residual_bound(V0, varsigma_bar, sigma_bar, T, chi_bar, g1_lower, rho_T, gi_lower=()):
    """
    Ω = e^{−ς̄σ̄T}V₀ + (χ̄/σ̄)(1 − e^{−ς̄σ̄T}), |z₁| < min(√(1 − 10^{−2g̲₁Ω}), ρ_T),
    |zᵢ| < √(2g̲ᵢΩ)

    χ̄ est fourni par l'utilisateur : diagnostic, pas certificat.
    """
    require_nonnegative('V0', V0)
    require_nonnegative('chi_bar', chi_bar)
    for name, value in (('varsigma_bar', varsigma_bar), ('sigma_bar', sigma_bar), ('T', T),
                        ('g1_lower', g1_lower), ('rho_T', rho_T)):
        require_positive(name, value)
    decay = math.exp(-varsigma_bar * sigma_bar * T)
    omega = decay * V0 + chi_bar / sigma_bar * (1.0 - decay)
    z1_bound = min(math.sqrt(1.0 - 10.0 ** (-2.0 * g1_lower * omega)), rho_T)
    zi_bounds = tuple(math.sqrt(2.0 * g * omega) for g in gi_lower)
    return ResidualBound(omega, z1_bound, zi_bounds)


def lyapunov_value(z, w, gain_lower, theta_tilde, gamma_tilde, iota_theta, iota_gamma):
    """
    V = log(1/(1−z₁²))/(2g̲₁) + Σ zᵢ²/(2g̲ᵢ) + Σ ωⱼ²/2 + Σ ϑ̃ᵢ²/(2ι_ϑᵢ) + Σ γ̃ⱼ²/(2ι_γⱼ)
    """
    value = -math.log1p(-z[0] * z[0]) / (2.0 * gain_lower[0])
    value += sum(zi * zi / (2.0 * g) for zi, g in zip(z[1:], gain_lower[1:]))
    value += sum(wj * wj / 2.0 for wj in w)
    value += sum(v * v / (2.0 * iota) for v, iota in zip(theta_tilde, iota_theta))
    value += sum(v * v / (2.0 * iota) for v, iota in zip(gamma_tilde, iota_gamma))
    return value


def convergence_rate_constant(gains):
    """ς̄ = 2·min{ς_z, ς_ω, ι_ϑ, ι_γ}"""
    return 2.0 * min((*gains.varsigma_z, *gains.varsigma_w, *gains.iota_theta, *gains.iota_gamma))
