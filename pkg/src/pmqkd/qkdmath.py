"""Scalar and qubit-level helpers: binary entropy, I0, Bloch states."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

# I0 overflows a double a little above 713
BESSEL_I0_MAX_ARG = 700.0


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy in bits.

    Args:
        x: Probability in [0, 1].
    Tests:
        >>> binary_entropy(0.5)
        1.0
        >>> binary_entropy(0.0)
        0.0
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy: x={x!r} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order zero.

    Summed from the power series sum_k (x/2)^{2k} / (k!)^2, stopping once a
    term drops below 1e-16 of the partial sum. All terms are positive so
    there is no cancellation and the relative error stays near machine
    precision across the allowed range.
    """
    return 1.0 + bessel_i0m1(x)


def bessel_i0m1(x: float) -> float:
    """I0(x) - 1 without the cancellation of subtracting 1 afterwards."""
    if not 0.0 <= x <= BESSEL_I0_MAX_ARG:
        raise ValueError(f"bessel_i0: x={x!r} outside [0, {BESSEL_I0_MAX_ARG}]")
    q = 0.25 * x * x
    if q == 0.0:
        return 0.0
    term = q
    total = q
    k = 1
    while term >= 1e-16 * (1.0 + total):
        k += 1
        term *= q / (k * k)
        total += term
    return total


def bessel_i0_small_arg_bound(x: float) -> float:
    """Upper bound on |I0(x) - (1 + x^2/4)|, the error of the quadratic truncation.

    The tail sum_{k>=2} (x^2/4)^k / (k!)^2 is at most (x^2/4)^2 / 4 * exp(x^2/4).
    """
    return x**4 / 64.0 * math.exp(x * x / 4.0)


@dataclass(frozen=True)
class PolarizationState:
    """Pure qubit polarization a0|0> + a1|1>, global phase fixed so a0 >= 0."""

    amp0: complex
    amp1: complex

    def __post_init__(self):
        for a in (self.amp0, self.amp1):
            if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                raise ValueError("non-finite amplitude")
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state not normalized (norm^2={norm!r})")

    def inner(self, other: PolarizationState) -> complex:
        """<self|other>."""
        return self.amp0.conjugate() * other.amp0 + self.amp1.conjugate() * other.amp1

    def as_tuple(self) -> tuple[complex, complex]:
        return (self.amp0, self.amp1)


def inner(a: PolarizationState, b: PolarizationState) -> complex:
    return a.inner(b)


def bloch_state(theta: float, phi: float) -> PolarizationState:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.

    Tests:
        >>> s = bloch_state(0.0, 1.3)
        >>> s.amp0, s.amp1
        ((1+0j), 0j)
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"bloch_state: theta={theta!r} outside [0, pi]")
    if not math.isfinite(phi):
        raise ValueError(f"bloch_state: phi={phi!r} not finite")
    return PolarizationState(
        complex(math.cos(theta / 2.0), 0.0),
        cmath.exp(1j * phi) * math.sin(theta / 2.0),
    )


@dataclass(frozen=True)
class Basis:
    """Two states on one latitude circle; bit b sits at azimuth phi + pi*b."""

    theta: float
    phi: float
    state0: PolarizationState
    state1: PolarizationState

    def state(self, bit: int) -> PolarizationState:
        return self.state1 if bit else self.state0

    def phase(self, bit: int) -> float:
        """Coherent-state phase carrying ``bit`` in this basis."""
        return (self.phi + math.pi * bit) % TWO_PI

    def overlap(self) -> float:
        """<state0|state1>, equal to cos(theta)."""
        return self.state0.inner(self.state1).real


def basis_from_phase(theta: float, phi: float) -> Basis:
    if not math.isfinite(phi):
        raise ValueError(f"basis_from_phase: phi={phi!r} not finite")
    phi = phi % TWO_PI
    if phi >= TWO_PI:  # tiny negative inputs round up to exactly 2 pi
        phi = 0.0
    return Basis(
        theta=theta,
        phi=phi,
        state0=bloch_state(theta, phi),
        state1=bloch_state(theta, (phi + math.pi) % TWO_PI),
    )
