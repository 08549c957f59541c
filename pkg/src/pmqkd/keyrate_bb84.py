"""Decoy-state BB84 baseline (infinite decoys, asymptotic key).

    R = 1/2 * Q_mu * { -f H(E_mu) + q_1 [1 - H(e_1)] }

where q_1 = mu e^{-mu} Y_1 / Q_mu is the fraction of detections caused by
single-photon pulses.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .channel import SystemParams, end_to_end_transmittance
from .errors import DegenerateChannelError
from .keyrate_polarization import clamp_error
from .qkdmath import binary_entropy


@dataclass(frozen=True)
class BB84KeyRateResult:
    Y_0: float
    Y_1: float
    e_1: float
    Q_mu: float
    E_mu: float
    q_1: float
    R: float
    R_clamped: float
    eta: float
    mu: float

    def as_dict(self) -> dict:
        return asdict(self)


def photon_number_stats(y0: float, eta: float, e_0: float, e_d: float, k: int) -> tuple[float, float]:
    """Yield and error rate of the k-photon component: (Y_k, e_k)."""
    if int(k) != k or k < 0:
        raise ValueError(f"photon number k={k!r} must be a non-negative integer")
    for name, v in (("Y_0", y0), ("eta", eta), ("e_0", e_0), ("e_d", e_d)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v!r} must be in [0, 1]")
    y_k = 1.0 - (1.0 - y0) * (1.0 - eta) ** int(k)
    if y_k == 0.0:
        raise DegenerateChannelError(f"Y_{k} = 0, e_{k} undefined")
    if k == 0:
        # the general expression collapses to e_0 but rounds off in floating point
        return y_k, e_0
    return y_k, e_d + (e_0 - e_d) * y0 / y_k


def gain_qber_bb84(params: SystemParams, eta: float) -> tuple[float, float]:
    """Overall gain and QBER (Q_mu, E_mu) of a mean-mu coherent source."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta!r} must be in [0, 1]")
    y0 = params.y0
    mu = params.intensity
    # expm1 keeps Q_mu accurate when eta*mu is below ~1e-8
    q = -math.expm1(-eta * mu) + y0 * math.exp(-eta * mu)
    if q <= 0.0:
        raise DegenerateChannelError("Q_mu = 0")
    e = params.misalignment + (params.intrinsic_error - params.misalignment) * y0 / q
    return q, e


def keyrate_bb84_at(params: SystemParams, eta: float) -> BB84KeyRateResult:
    mu = params.intensity
    y0 = params.y0
    y1, e1 = photon_number_stats(y0, eta, params.intrinsic_error, params.misalignment, 1)
    q, e = gain_qber_bb84(params, eta)
    q1 = mu * math.exp(-mu) * y1 / q
    f = params.error_correction_inefficiency
    r = 0.5 * q * (-f * binary_entropy(clamp_error(e)) + q1 * (1.0 - binary_entropy(clamp_error(e1))))
    return BB84KeyRateResult(
        Y_0=y0, Y_1=y1, e_1=e1, Q_mu=q, E_mu=e, q_1=q1, R=r, R_clamped=max(r, 0.0), eta=eta, mu=mu
    )


def keyrate_bb84(params: SystemParams, length_km: float) -> BB84KeyRateResult:
    """Single-hop Alice to Bob; no midpoint node."""
    return keyrate_bb84_at(params, end_to_end_transmittance(params, length_km))
