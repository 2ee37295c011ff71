"""Closed-form expressions used as fast paths and cross-validation oracles.

Every function here is a plain scalar formula; the numerical pipeline is
cross-checked against these on configurations where they apply (ideal
superposition-of-coherent-states resource, ideal or vacuum-mixed photon
pair, photon-number-resolving detectors). For approximate resources the
numerics are authoritative and these formulas are not used.

Probability bookkeeping: `p_success_ideal` is the probability of heralding
on one specific detector pattern, which the simulator reproduces exactly;
the click-pattern total over both accepted patterns is twice that.
`p_tot_eta` is the conventional closed-form total with detector efficiency
folded in; it counts each pattern with the displaced beam's full amplitude
credited to a single polarization channel, which overstates the physical,
polarization-consistent total by exactly a factor of two. The simulator's
total therefore satisfies P_tot = PROBABILITY_CONVENTION_FACTOR * p_tot_eta,
with the factor constant across all parameters.
"""

from __future__ import annotations

import math

from .errors import ValidationError

__all__ = [
    "PROBABILITY_CONVENTION_FACTOR",
    "n_phi",
    "p_success_ideal",
    "fidelity_eta",
    "p_tot_eta",
    "scs_fidelity",
    "f_eff",
    "f_eff_from_total",
    "ideal_negativity",
]

PROBABILITY_CONVENTION_FACTOR = 0.5


def _check_range(name: str, value: float, low: float, high: float,
                 low_open: bool = False, high_open: bool = False) -> None:
    ok_low = value > low if low_open else value >= low
    ok_high = value < high if high_open else value <= high
    if not (math.isfinite(value) and ok_low and ok_high):
        lo = "(" if low_open else "["
        hi = ")" if high_open else "]"
        raise ValidationError(f"{name}={value} outside {lo}{low}, {high}{hi}")


def n_phi(alpha: float, phi: float) -> float:
    """Normalization of N (|alpha> + e^{i phi} |-alpha>)."""
    denom = 2.0 + 2.0 * math.exp(-2.0 * alpha * alpha) * math.cos(phi)
    if denom <= 1e-12:
        raise ValidationError(
            f"superposition normalization diverges at alpha={alpha}, phi={phi}"
        )
    return denom ** -0.5


def _alpha_pair(alpha: float, t: float, in_terms_of: str) -> tuple:
    """Return (alpha_i, alpha_f) from whichever amplitude was given."""
    _check_range("t", t, 0.0, 1.0, low_open=True)
    if in_terms_of == "alpha_i":
        return alpha, math.sqrt(t) * alpha
    if in_terms_of == "alpha_f":
        return alpha / math.sqrt(t), alpha
    raise ValidationError(
        f"in_terms_of must be 'alpha_i' or 'alpha_f', got {in_terms_of!r}"
    )


def p_success_ideal(alpha: float, t: float, phi: float = math.pi,
                    in_terms_of: str = "alpha_i") -> float:
    """Single-pattern herald probability with ideal resources and detectors.

    Equals (1/2) N^2 (1-t) alpha_i^2 exp(-2 (1-t) alpha_i^2); at the
    optimal transmissivity t = 1 - 1/(2 alpha_i^2) it approaches 1/(8e)
    for large alpha_i. The accepted-pattern total is twice this value.
    """
    alpha_i, _ = _alpha_pair(alpha, t, in_terms_of)
    if alpha_i < 0:
        raise ValidationError(f"alpha must be nonnegative, got {alpha}")
    mu2 = (1.0 - t) * alpha_i * alpha_i
    return 0.5 * n_phi(alpha_i, phi) ** 2 * mu2 * math.exp(-2.0 * mu2)


def fidelity_eta(alpha_f: float, t: float, eta: float) -> float:
    """Heralded-state fidelity with detector efficiency eta.

    (1/2) (1 + exp(-2 (1-eta) (1/t - 1) alpha_f^2)); exact for the ideal
    resource states under number-resolved heralding.
    """
    _check_range("t", t, 0.0, 1.0, low_open=True)
    _check_range("eta", eta, 0.0, 1.0)
    mu2 = (1.0 / t - 1.0) * alpha_f * alpha_f
    return 0.5 * (1.0 + math.exp(-2.0 * (1.0 - eta) * mu2))


def p_tot_eta(alpha_f: float, t: float, eta: float, phi: float = math.pi) -> float:
    """Conventional closed-form total herald probability with efficiency eta.

    2 N^2 eta^2 (1/t - 1) alpha_f^2 exp(-2 eta (1/t - 1) alpha_f^2). See the
    module docstring: the simulator's polarization-consistent total equals
    PROBABILITY_CONVENTION_FACTOR times this expression.
    """
    _check_range("t", t, 0.0, 1.0, low_open=True)
    _check_range("eta", eta, 0.0, 1.0)
    alpha_i = alpha_f / math.sqrt(t)
    mu2 = (1.0 / t - 1.0) * alpha_f * alpha_f
    return (
        2.0 * n_phi(alpha_i, phi) ** 2 * eta * eta * mu2
        * math.exp(-2.0 * eta * mu2)
    )


def scs_fidelity(alpha: float, s: float) -> float:
    """Fidelity of a squeezed single photon to the odd coherent superposition.

    2 alpha^2 exp(alpha^2 (tanh s - 1)) / (cosh^3 s (1 - exp(-2 alpha^2))).
    """
    if alpha <= 0.0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    if s < 0.0:
        raise ValidationError(f"squeezing parameter must be >= 0, got {s}")
    a2 = alpha * alpha
    return (
        2.0 * a2 * math.exp(a2 * (math.tanh(s) - 1.0))
        / (math.cosh(s) ** 3 * (1.0 - math.exp(-2.0 * a2)))
    )


def f_eff(p_vac: float, p_chi: float, p_phi2: float, lam: float,
          f_chi: float) -> float:
    """Effective fidelity with a parametric pair source of strength lam.

    P_chi / (lam^-2 P_vac + P_chi + lam^2 P_phi2) * F_chi, with the photon
    pair's success diluted by false heralds from the vacuum and double-pair
    components. At lam = 0 the vacuum term dominates (limit 0) unless
    P_vac = 0, in which case the limit is F_chi.
    """
    for name, value in (("p_vac", p_vac), ("p_chi", p_chi), ("p_phi2", p_phi2)):
        if value < 0:
            raise ValidationError(f"{name}={value} must be nonnegative")
    _check_range("lam", lam, 0.0, 1.0, high_open=True)
    if lam == 0.0:
        if p_vac > 0.0:
            return 0.0
        if p_chi == 0.0:
            raise ValidationError("all component probabilities vanish")
        return f_chi
    denom = p_vac / (lam * lam) + p_chi + lam * lam * p_phi2
    if denom <= 0.0:
        raise ValidationError("all component probabilities vanish")
    return p_chi / denom * f_chi


def f_eff_from_total(p_chi: float, lam: float, f_chi: float,
                     p_tot: float) -> float:
    """Effective fidelity given an externally supplied total probability:
    (1 - lam^2) lam^2 P_chi F_chi / P_tot. Identical to `f_eff` when P_tot
    is the three-component total (1-lam^2)(P_vac + lam^2 P_chi + lam^4 P_phi2).
    """
    _check_range("lam", lam, 0.0, 1.0, high_open=True)
    if p_tot <= 0.0:
        raise ValidationError(f"p_tot={p_tot} must be positive")
    return (1.0 - lam * lam) * lam * lam * p_chi * f_chi / p_tot


def ideal_negativity(alpha_f: float) -> float:
    """Negativity of the ideal hybrid state: sqrt(1 - exp(-4 alpha_f^2)).

    Follows from the two-term Schmidt decomposition of the hybrid state: the
    coherent branches overlap by exp(-2 alpha_f^2), giving Schmidt
    coefficients (1 +- exp(-2 alpha_f^2))/2 and negativity
    2 sqrt(p_plus p_minus).
    """
    if alpha_f < 0:
        raise ValidationError(f"alpha_f must be nonnegative, got {alpha_f}")
    return math.sqrt(1.0 - math.exp(-4.0 * alpha_f * alpha_f))
