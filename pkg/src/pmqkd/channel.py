"""System parameters and fiber transmittance."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class Convention(enum.Enum):
    """How end-to-end loss is divided between the two arms of the midpoint protocol.

    PAPER_LITERAL halves the end-to-end transmittance (eta_a = eta_b = eta/2).
    SYMMETRIC_MID puts the measurement node halfway, so each arm sees L/2 of
    fiber and the node's detector efficiency.
    """

    PAPER_LITERAL = "paper-literal"
    SYMMETRIC_MID = "symmetric-mid"

    @classmethod
    def parse(cls, value: str | Convention) -> Convention:
        if isinstance(value, cls):
            return value
        norm = str(value).strip().lower().replace("_", "-")
        aliases = {"paperliteral": "paper-literal", "symmetricmid": "symmetric-mid"}
        norm = aliases.get(norm, norm)
        try:
            return cls(norm)
        except ValueError:
            choices = ", ".join(c.value for c in cls)
            raise ValueError(f"unknown channel convention {value!r} (expected one of {choices})") from None


class Eq4Variant(enum.Enum):
    """Which factor multiplies the misalignment term of the two-photon error rate.

    LITERAL keeps the printed (1 - p_d^2); SQUARED uses (1 - p_d)^2 as in the
    MDI literature the formula is taken from.
    """

    LITERAL = "literal"
    SQUARED = "squared"

    @classmethod
    def parse(cls, value: str | Eq4Variant) -> Eq4Variant:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown eq4_variant {value!r} (expected 'literal' or 'squared')") from None


def _check_prob(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and 0.0 <= value <= 1.0):
        raise ValueError(f"{name}={value!r} must be a probability in [0, 1]")


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the link. Defaults reproduce the published simulation table.

    Attributes:
        dark_count_rate: p_d, dark-count probability per detector per gate.
        misalignment: e_d, optical misalignment error probability.
        detector_efficiency: eta_d.
        error_correction_inefficiency: f >= 1.
        intrinsic_error: e_0, error probability of a random (dark-count) click.
        attenuation_db_per_km: fiber loss alpha.
        intensity: total mean photon number mu; each party sends mu/2 in
            the midpoint protocol, the BB84 source sends mu.
        eq4_variant: factor used in the two-photon error rate.
    """

    dark_count_rate: float = 8e-8
    misalignment: float = 0.015
    detector_efficiency: float = 0.145
    error_correction_inefficiency: float = 1.15
    intrinsic_error: float = 0.5
    attenuation_db_per_km: float = 0.2
    intensity: float = 0.1
    eq4_variant: Eq4Variant = Eq4Variant.LITERAL

    def __post_init__(self):
        _check_prob("dark_count_rate", self.dark_count_rate)
        _check_prob("misalignment", self.misalignment)
        _check_prob("detector_efficiency", self.detector_efficiency)
        _check_prob("intrinsic_error", self.intrinsic_error)
        f = self.error_correction_inefficiency
        if not (math.isfinite(f) and f >= 1.0):
            raise ValueError(f"error_correction_inefficiency={f!r} must be >= 1")
        a = self.attenuation_db_per_km
        if not (math.isfinite(a) and a > 0.0):
            raise ValueError(f"attenuation_db_per_km={a!r} must be > 0")
        mu = self.intensity
        if not (math.isfinite(mu) and mu > 0.0):
            raise ValueError(f"intensity={mu!r} must be > 0")
        object.__setattr__(self, "eq4_variant", Eq4Variant.parse(self.eq4_variant))

    @property
    def mu_a(self) -> float:
        return self.intensity / 2.0

    @property
    def mu_b(self) -> float:
        return self.intensity / 2.0

    @property
    def y0(self) -> float:
        """Background yield of the two-detector BB84 receiver (2 p_d)."""
        return 2.0 * self.dark_count_rate

    def with_(self, **changes) -> SystemParams:
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "dark_count_rate": self.dark_count_rate,
            "misalignment": self.misalignment,
            "detector_efficiency": self.detector_efficiency,
            "error_correction_inefficiency": self.error_correction_inefficiency,
            "intrinsic_error": self.intrinsic_error,
            "attenuation_db_per_km": self.attenuation_db_per_km,
            "intensity": self.intensity,
            "eq4_variant": self.eq4_variant.value,
        }


@dataclass(frozen=True)
class ChannelConfig:
    length_km: float
    convention: Convention = Convention.PAPER_LITERAL

    def __post_init__(self):
        if not (math.isfinite(self.length_km) and self.length_km >= 0.0):
            raise ValueError(f"length_km={self.length_km!r} must be >= 0")
        object.__setattr__(self, "convention", Convention.parse(self.convention))


def fiber_transmittance(alpha_db_per_km: float, length_km: float) -> float:
    if length_km < 0:
        raise ValueError(f"length_km={length_km!r} must be >= 0")
    return 10.0 ** (-alpha_db_per_km * length_km / 10.0)


def end_to_end_transmittance(params: SystemParams, length_km: float) -> float:
    """eta = eta_d * 10^(-alpha L / 10)."""
    return params.detector_efficiency * fiber_transmittance(params.attenuation_db_per_km, length_km)


def arm_transmittances(params: SystemParams, cfg: ChannelConfig) -> tuple[float, float]:
    if cfg.convention is Convention.PAPER_LITERAL:
        eta = end_to_end_transmittance(params, cfg.length_km) / 2.0
    else:
        eta = end_to_end_transmittance(params, cfg.length_km / 2.0)
    return eta, eta
