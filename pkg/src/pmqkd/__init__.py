"""Polarization phase-matching QKD: closed-form key rates, a protocol simulator, and experiment tooling."""

from .channel import ChannelConfig, Convention, Eq4Variant, SystemParams, arm_transmittances, end_to_end_transmittance
from .errors import ConfigError, DeadAtZeroDistance, DegenerateChannelError
from .keyrate_bb84 import BB84KeyRateResult, keyrate_bb84, keyrate_bb84_at
from .keyrate_polarization import PolarizationKeyRateResult, keyrate_polarization, keyrate_polarization_at
from .qkdmath import Basis, PolarizationState, basis_from_phase, bessel_i0, binary_entropy, bloch_state

__version__ = "0.1.0"
