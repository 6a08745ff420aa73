"""
Loi de commande DSC adaptative à temps prescrit

Récurrence en n étapes : erreur transformée par barrière, commandes
virtuelles lissées, filtres non linéaires, lois d'adaptation à fuite σ₂
et signal dynamique r. Toutes les fonctions sont pures.
"""
import logging
import math

from core.exceptions import FunnelViolation, InitialFunnelViolation, NumericalBlowup
from core.models import as_vector, require_nonnegative
from controller.models import GUARD_DELTA, ControllerState, ScheduleSample, StepWorkspace

logger = logging.getLogger(__name__)


def transform_errors(t, x, y_d, rho, alpha_c, alpha=(), guard_delta=GUARD_DELTA):
    """
    z₁ = (x₁ − y_d)/ρ, zᵢ = xᵢ − αᶜᵢ₋₁ ; ωⱼ = αᶜⱼ − αⱼ pour les αⱼ fournis
    """
    z1 = (x[0] - y_d) / rho
    if not abs(z1) < 1.0 - guard_delta:
        raise FunnelViolation(f"|z1|={abs(z1):.12g} a atteint la barrière à t={t:.6g}", t=t, z1=z1)
    z = [z1]
    z.extend(x[i] - alpha_c[i - 1] for i in range(1, len(x)))
    w = [alpha_c[j] - alpha[j] for j in range(len(alpha))]
    return z, w


def smoothed_normalizer(s, Phi, eps):
    """sΦᵀΦ/√(s²ΦᵀΦ + ε²), de module ≤ ‖Φ‖"""
    norm2 = sum(v * v for v in Phi)
    return s * norm2 / math.sqrt(s * s * norm2 + eps * eps)


def smoothed_envelope(z, psi_value, eps):
    """ψ̂ = ψ²z/√(z²ψ² + ε²) : nul en z = 0 et zψ̂ ≥ |z|ψ − ε"""
    p2 = psi_value * psi_value
    return p2 * z / math.sqrt(z * z * p2 + eps * eps)


def virtual_control(kappa, z, alpha_bar, gain_lower, eps):
    """α = −κzᾱ²/(g̲√((κzᾱ)² + ε²)), borné par |ᾱ|/g̲"""
    s = kappa * z
    return -s * alpha_bar * alpha_bar / (gain_lower * math.sqrt((s * alpha_bar) ** 2 + eps * eps))


def step1_law(sched, z1, kappa1, y_d_dot, phi, psi11, psi12, theta_hat1, gains, gain_lower1):
    """
    Première commande virtuelle (erreur sous barrière)

    Retourne (ᾱ₁, α₁, Φ₁, varphi₁, ζ₁).
    """
    eps = sched.eps
    zeta = z1 / (4.0 * sched.rho) - y_d_dot - sched.rho_dot * z1
    Phi = (*phi, smoothed_envelope(z1, psi11, eps) + smoothed_envelope(z1, psi12, eps), z1 / 4.0)
    varphi = smoothed_normalizer(kappa1 * z1, Phi, eps)
    alpha_bar = gains.varsigma_z[0] * sched.sigma1 * sched.rho * z1 + zeta + theta_hat1 * varphi
    return alpha_bar, virtual_control(kappa1, z1, alpha_bar, gain_lower1, eps), Phi, varphi, zeta


def stepi_law(i, sched, z_i, z_prev, kappa_i, kappa_prev, alpha_c_dot_prev, phi, psi_i1, psi_i2,
              theta_hat_i, gains, gain_lower_i):
    """
    Commande virtuelle de l'étape i ≥ 2 ; α̇ᶜᵢ₋₁ est le second membre du filtre, jamais une différence finie

    Retourne (ᾱᵢ, αᵢ, Φᵢ, varphiᵢ, ζᵢ).
    """
    eps = sched.eps
    zeta = z_i / 4.0 - alpha_c_dot_prev
    Phi = (
        kappa_prev / kappa_i * z_prev,
        *phi,
        smoothed_envelope(z_i, psi_i1, eps) + smoothed_envelope(z_i, psi_i2, eps),
        z_i / 4.0,
    )
    varphi = smoothed_normalizer(kappa_i * z_i, Phi, eps)
    alpha_bar = gains.varsigma_z[i - 1] * sched.sigma1 * z_i + zeta + theta_hat_i * varphi
    return alpha_bar, virtual_control(kappa_i, z_i, alpha_bar, gain_lower_i, eps), Phi, varphi, zeta


def final_law(n, sched, z_n, z_prev, kappa_n, kappa_prev, alpha_c_dot_prev, phi, psi_n1, psi_n2,
              theta_hat_n, gains, gain_lower_n):
    """Commande réelle u : même forme que l'étape i avec i = n (n ≥ 2)"""
    return stepi_law(n, sched, z_n, z_prev, kappa_n, kappa_prev, alpha_c_dot_prev, phi, psi_n1, psi_n2,
                     theta_hat_n, gains, gain_lower_n)


def filter_rhs(j, w_j, kappa_j, gamma_hat_j, sigma1, gains, eps):
    """α̇ᶜⱼ = −ς_ωⱼσ₁ωⱼ − κⱼωⱼ − γ̂ⱼ²ωⱼ/√(γ̂ⱼ²ωⱼ² + ε²)"""
    g2 = gamma_hat_j * gamma_hat_j
    return (
        -gains.varsigma_w[j - 1] * sigma1 * w_j
        - kappa_j * w_j
        - g2 * w_j / math.sqrt(g2 * w_j * w_j + eps * eps)
    )


def adaptation_terms(sigma2, kappa, z, varphi, w, theta_hat, gamma_hat, r, gains, dyn_signal=None, x1=0.0):
    """Seconds membres (ϑ̂̇, γ̂̇, ṙ) à partir des grandeurs de l'étape courante"""
    theta_dot = [
        iota * (k * zi * v) - 2.0 * iota * sigma2 * theta
        for iota, k, zi, v, theta in zip(gains.iota_theta, kappa, z, varphi, theta_hat)
    ]
    gamma_dot = [
        iota * abs(wj) - 2.0 * iota * sigma2 * gamma
        for iota, wj, gamma in zip(gains.iota_gamma, w, gamma_hat)
    ]
    r_dot = dyn_signal.rhs(r, x1) if dyn_signal is not None else 0.0
    return theta_dot, gamma_dot, r_dot


def adaptive_rhs(workspace, state, gains, dyn_signal=None, x1=0.0):
    """
    ϑ̂̇ᵢ = ι_ϑᵢκᵢzᵢvarphiᵢ − 2ι_ϑᵢσ₂ϑ̂ᵢ, γ̂̇ⱼ = ι_γⱼ|ωⱼ| − 2ι_γⱼσ₂γ̂ⱼ,
    ṙ = −c̄r + Ῡ(x₁) + d (0 sans signal dynamique)
    """
    return adaptation_terms(
        workspace.schedules.sigma2, workspace.kappa, workspace.z, workspace.varphi, workspace.w,
        state.theta_hat, state.gamma_hat, state.r, gains, dyn_signal, x1,
    )


def evaluate_law(t, x, alpha_c, theta_hat, gamma_hat, r, plant, reference, gains, sched,
                 guard_delta=GUARD_DELTA):
    """
    Évaluation à plat de la loi, sans enregistrement intermédiaire

    Retourne (u, dérivée [αᶜ̇, ϑ̂̇, γ̂̇, ṙ] dans l'ordre de ControllerState,
    grandeurs de l'étape).
    """
    n = plant.n
    eps = sched.eps
    y_d = reference.y_d(t)
    z, _ = transform_errors(t, x, y_d, sched.rho, alpha_c, guard_delta=guard_delta)
    gain_lower = plant.gain_lower

    z1 = z[0]
    lam = 1.0 / (1.0 - z1 * z1)
    kappa = [lam / (gain_lower[0] * sched.rho)]
    kappa.extend(1.0 / g for g in gain_lower[1:])

    alpha_bar, alpha1, Phi1, varphi1, zeta1 = step1_law(
        sched, z1, kappa[0], reference.y_d_dot(t), plant.regressor(1, x),
        plant.psi1(1, x), plant.psi2(1, r), theta_hat[0], gains, gain_lower[0],
    )
    alpha_bars, alphas, Phis, varphis, zetas = [alpha_bar], [alpha1], [Phi1], [varphi1], [zeta1]
    w, alpha_c_dot = [], []

    for i in range(2, n + 1):
        j = i - 1
        w_j = alpha_c[j - 1] - alphas[j - 1]
        c_dot = filter_rhs(j, w_j, kappa[j - 1], gamma_hat[j - 1], sched.sigma1, gains, eps)
        w.append(w_j)
        alpha_c_dot.append(c_dot)
        law = final_law if i == n else stepi_law
        result = law(
            i, sched, z[i - 1], z[i - 2], kappa[i - 1], kappa[i - 2], c_dot,
            plant.regressor(i, x), plant.psi1(i, x), plant.psi2(i, r),
            theta_hat[i - 1], gains, gain_lower[i - 1],
        )
        for bucket, value in zip((alpha_bars, alphas, Phis, varphis, zetas), result):
            bucket.append(value)

    theta_dot, gamma_dot, r_dot = adaptation_terms(
        sched.sigma2, kappa, z, varphis, w, theta_hat, gamma_hat, r, gains, plant.dyn_signal, x[0],
    )
    terms = (x[0] - y_d, z, w, lam, kappa, zetas, Phis, varphis, alpha_bars, alphas, alpha_c_dot)
    return alphas[-1], [*alpha_c_dot, *theta_dot, *gamma_dot, r_dot], terms


def controller_eval(t, x, state, plant, reference, gains, guard_delta=GUARD_DELTA, sched=None):
    """
    Compose transformation d'erreurs, étapes 1..n, filtres et lois d'adaptation

    `plant` est la connaissance du concepteur (PlantKnowledge). Retourne
    (u, dérivée de l'état du contrôleur, espace de travail).
    """
    if sched is None:
        sched = ScheduleSample.at(gains, t)
    u, derivative, terms = evaluate_law(
        t, x, state.alpha_c, state.theta_hat, state.gamma_hat, state.r, plant, reference, gains, sched, guard_delta,
    )
    if not all(math.isfinite(v) for v in (u, *derivative)):
        raise NumericalBlowup(f"Commande non finie à t={t:.6g}", t=t)

    e, z, w, lam, kappa, zetas, Phis, varphis, alpha_bars, alphas, alpha_c_dot = terms
    workspace = StepWorkspace(
        t=t,
        e=e,
        z=tuple(z),
        w=tuple(w),
        lam=lam,
        kappa=tuple(kappa),
        zeta=tuple(zetas),
        Phi=tuple(Phis),
        varphi=tuple(varphis),
        alpha_bar=tuple(alpha_bars),
        alpha=tuple(alphas),
        alpha_c_dot=tuple(alpha_c_dot),
        schedules=sched,
    )
    return u, ControllerState.from_list(derivative, plant.n), workspace


def init_state(plant, reference, gains, x0, theta_hat0=None, gamma_hat0=None, r0=None,
               guard_delta=GUARD_DELTA):
    """
    État initial : αᶜⱼ(0) = αⱼ(0) (ωⱼ(0) = 0), ϑ̂(0), γ̂(0) fournis (0 par défaut), r(0) = r0
    """
    n = plant.n
    e0 = x0[0] - reference.y_d(0.0)
    if not abs(e0) < gains.rho0 * (1.0 - guard_delta):
        raise InitialFunnelViolation(
            f"|x1(0) − y_d(0)|={abs(e0):.6g} hors de l'entonnoir initial ρ₀={gains.rho0}", t=0.0, z1=e0 / gains.rho0,
        )
    theta_hat = as_vector('theta_hat0', theta_hat0 if theta_hat0 is not None else [0.0] * n, n, positive=False)
    gamma_hat = as_vector('gamma_hat0', gamma_hat0 if gamma_hat0 is not None else [0.0] * (n - 1), n - 1, positive=False)
    if r0 is None:
        r0 = plant.dyn_signal.r0 if plant.dyn_signal is not None else 0.0
    r0 = require_nonnegative('r0', r0)

    # αⱼ ne dépend que de αᶜ₁..αᶜⱼ₋₁ : on amorce les filtres un par un
    sched = ScheduleSample.at(gains, 0.0)
    alpha_c = [0.0] * (n - 1)
    for j in range(n - 1):
        state = ControllerState(tuple(alpha_c), theta_hat, gamma_hat, float(r0))
        _, _, workspace = controller_eval(0.0, x0, state, plant, reference, gains, guard_delta, sched=sched)
        alpha_c[j] = workspace.alpha[j]

    state = ControllerState(tuple(alpha_c), theta_hat, gamma_hat, float(r0))
    logger.debug(f"État initial du contrôleur : {state}")
    return state
