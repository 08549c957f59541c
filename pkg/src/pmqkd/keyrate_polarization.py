"""Asymptotic key rate of the polarization phase-matching scheme.

The two parties each send mu/2 to an untrusted node. The rate is

    R = 1/2 * { Q11 [1 - H(e11)] - Q f H(E) }

with the single-photon-pair terms (Y11, e11) and the overall gain/QBER
(Q, E) given in closed form from the dark-count rate, misalignment and the
two arm transmittances.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .channel import ChannelConfig, Convention, Eq4Variant, SystemParams, arm_transmittances
from .errors import DegenerateChannelError
from .qkdmath import bessel_i0m1, binary_entropy


def _check_prob(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name}={value!r} must be in [0, 1]")


def _click(mean: float, p_d: float) -> float:
    """1 - (1 - p_d) e^{-mean}, accurate when mean and p_d are both tiny."""
    return -math.expm1(-mean) + p_d * math.exp(-mean)


def clamp_error(e: float) -> float:
    """Clip an error rate to [0, 1/2] before it enters the entropy."""
    return min(max(e, 0.0), 0.5)


@dataclass(frozen=True)
class PolarizationKeyRateResult:
    Y_11: float
    e_11: float
    Q_11: float
    Q_D0: float
    Q_D1: float
    Q_total: float
    E_total: float
    mu_prime: float
    x: float
    R: float
    R_clamped: float
    eta_a: float
    eta_b: float
    mu: float
    convention: str | None = None
    eq4_variant: str = Eq4Variant.LITERAL.value

    def as_dict(self) -> dict:
        return asdict(self)


def yield_11(p_d: float, eta_a: float, eta_b: float) -> float:
    """Yield of the event where each party emitted exactly one photon."""
    for name, v in (("p_d", p_d), ("eta_a", eta_a), ("eta_b", eta_b)):
        _check_prob(name, v)
    return (1.0 - p_d) ** 2 * (
        eta_a * eta_b / 2.0
        + (2.0 * eta_a + 2.0 * eta_b - 3.0 * eta_a * eta_b) * p_d
        + 4.0 * (1.0 - eta_a) * (1.0 - eta_b) * p_d * p_d
    )


def error_rate_11(
    p_d: float,
    e_0: float,
    e_d: float,
    eta_a: float,
    eta_b: float,
    variant: Eq4Variant | str = Eq4Variant.LITERAL,
) -> float:
    """Single-photon-pair error rate e11 (unclamped).

    The closed form gives the product e11 * Y11; it is divided by Y11 here.
    """
    for name, v in (("e_0", e_0), ("e_d", e_d)):
        _check_prob(name, v)
    y11 = yield_11(p_d, eta_a, eta_b)
    if y11 == 0.0:
        raise DegenerateChannelError("Y11 = 0: no detection possible (eta_a = eta_b = 0 and p_d = 0)")
    if Eq4Variant.parse(variant) is Eq4Variant.LITERAL:
        fac = 1.0 - p_d * p_d
    else:
        fac = (1.0 - p_d) ** 2
    return (e_0 * y11 - (e_0 - e_d) * fac * eta_a * eta_b / 2.0) / y11


def gains_and_qber(params: SystemParams, eta_a: float, eta_b: float):
    """Return (Q_D0, Q_D1, Q_total, E_total, mu_prime, x) at the given arm transmittances."""
    _check_prob("eta_a", eta_a)
    _check_prob("eta_b", eta_b)
    p_d = params.dark_count_rate
    e_d = params.misalignment
    mu_a, mu_b = params.mu_a, params.mu_b
    mu_prime = eta_a * mu_a + eta_b * mu_b
    x = 0.5 * math.sqrt(eta_a * mu_a * eta_b * mu_b)
    decay = math.exp(-mu_prime / 2.0)
    q_d0 = 2.0 * (1.0 - p_d) ** 2 * decay * _click(eta_a * mu_a / 2.0, p_d) * _click(eta_b * mu_b / 2.0, p_d)
    # I0(2x) - (1 - p_d) e^{-mu'/2}, regrouped so nothing cancels at small mu'
    bracket = bessel_i0m1(2.0 * x) - math.expm1(-mu_prime / 2.0) + p_d * decay
    q_d1 = 2.0 * p_d * (1.0 - p_d) ** 2 * decay * bracket
    q = q_d0 + q_d1
    if q <= 0.0:
        raise DegenerateChannelError("total gain is zero")
    e = (e_d * q_d0 + (1.0 - e_d) * q_d1) / q
    return q_d0, q_d1, q, e, mu_prime, x


def keyrate_polarization_at(
    params: SystemParams, eta_a: float, eta_b: float, convention: Convention | str | None = None
) -> PolarizationKeyRateResult:
    """Key rate for explicit arm transmittances."""
    p_d = params.dark_count_rate
    y11 = yield_11(p_d, eta_a, eta_b)
    e11 = error_rate_11(p_d, params.intrinsic_error, params.misalignment, eta_a, eta_b, params.eq4_variant)
    q_d0, q_d1, q, e, mu_prime, x = gains_and_qber(params, eta_a, eta_b)
    mu_a, mu_b = params.mu_a, params.mu_b
    q11 = mu_a * mu_b * math.exp(-mu_a - mu_b) * y11
    f = params.error_correction_inefficiency
    r = 0.5 * (q11 * (1.0 - binary_entropy(clamp_error(e11))) - q * f * binary_entropy(clamp_error(e)))
    if convention is not None:
        convention = Convention.parse(convention).value
    return PolarizationKeyRateResult(
        Y_11=y11,
        e_11=e11,
        Q_11=q11,
        Q_D0=q_d0,
        Q_D1=q_d1,
        Q_total=q,
        E_total=e,
        mu_prime=mu_prime,
        x=x,
        R=r,
        R_clamped=max(r, 0.0),
        eta_a=eta_a,
        eta_b=eta_b,
        mu=params.intensity,
        convention=convention,
        eq4_variant=params.eq4_variant.value,
    )


def keyrate_polarization(params: SystemParams, cfg: ChannelConfig) -> PolarizationKeyRateResult:
    eta_a, eta_b = arm_transmittances(params, cfg)
    return keyrate_polarization_at(params, eta_a, eta_b, cfg.convention)
