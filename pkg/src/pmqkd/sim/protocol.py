"""Protocol rounds, sifting and tallies.

Each round: both parties draw a key bit and a basis (polarization mode) or a
discretised random phase (phase mode), send coherent pulses of amplitude
sqrt(eta * mu/2) whose optical phase is the basis phase plus pi*bit, and the
node interferes them on a 50:50 beam splitter. Output port intensities are
|a +/- b|^2 / 2, each threshold detector fires with probability
1 - (1 - p_d) exp(-I), and with probability e_d the optically induced clicks
are routed to the wrong port. Exactly one click is a success; on R Bob flips
his bit.
"""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..channel import ChannelConfig, Convention, SystemParams, arm_transmittances
from ..qkdmath import Basis, PolarizationState, basis_from_phase, bessel_i0
from . import rng


class Mode(enum.Enum):
    POLARIZATION = "polarization"
    PHASE = "phase"

    @classmethod
    def parse(cls, value) -> Mode:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown mode {value!r} (expected 'polarization' or 'phase')") from None


class Outcome(enum.Enum):
    L = "L"
    R = "R"
    NO_CLICK = "NoClick"
    DOUBLE_CLICK = "DoubleClick"


@dataclass(frozen=True)
class ProtocolConfig:
    """One Monte Carlo experiment.

    In polarization mode both parties choose between the two bases
    ``basis_a`` and ``basis_b``, given as (theta, phi); they must share theta.
    In phase mode each party draws a phase uniformly from ``phase_slices``
    equally spaced values in [0, 2 pi).
    """

    params: SystemParams = field(default_factory=SystemParams)
    channel: ChannelConfig = field(default_factory=lambda: ChannelConfig(0.0))
    mode: Mode = Mode.POLARIZATION
    basis_a: tuple[float, float] = (math.pi / 2, math.pi / 6)
    basis_b: tuple[float, float] = (math.pi / 2, math.pi / 4)
    phase_slices: int = 16
    n_rounds: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if int(self.n_rounds) != self.n_rounds or self.n_rounds < 1:
            raise ValueError(f"n_rounds={self.n_rounds!r} must be a positive integer")
        if self.mode is Mode.POLARIZATION and not math.isclose(
            self.basis_a[0], self.basis_b[0], rel_tol=0.0, abs_tol=1e-12
        ):
            raise ValueError("both bases must share theta")
        if self.phase_slices < 1:
            raise ValueError(f"phase_slices={self.phase_slices!r} must be >= 1")
        # validates theta/phi
        self.bases  # noqa: B018

    @property
    def bases(self) -> tuple[Basis, Basis]:
        return basis_from_phase(*self.basis_a), basis_from_phase(*self.basis_b)

    def state(self, choice: int, bit: int) -> PolarizationState:
        return self.bases[choice].state(bit)

    def arm_intensities(self) -> tuple[float, float]:
        """Mean photon numbers reaching the node from each side (eta_a mu_a, eta_b mu_b)."""
        eta_a, eta_b = arm_transmittances(self.params, self.channel)
        return eta_a * self.params.mu_a, eta_b * self.params.mu_b

    def kernel_args(self) -> tuple:
        A, B = self.arm_intensities()
        phi0, phi1 = (b.phi for b in self.bases)
        mode = 0 if self.mode is Mode.POLARIZATION else 1
        p = self.params
        return (mode, phi0, phi1, int(self.phase_slices), A, B, p.dark_count_rate, p.misalignment)


@dataclass(frozen=True)
class RoundRecord:
    k_a: int
    k_b: int
    basis_choice_a: int
    basis_choice_b: int
    outcome: Outcome
    k_b_after_flip: int | None
    kept_after_sift: bool


@dataclass(frozen=True)
class SimTally:
    n_rounds: int
    n_success: int
    n_sifted: int
    n_errors: int
    empirical_gain: float
    empirical_qber: float
    gain_stderr: float
    qber_stderr: float
    seed: int
    mode: str
    convention: str
    n_left: int = 0
    n_right: int = 0
    n_double: int = 0
    n_no_click: int = 0

    JSON_KEYS = (
        "n_rounds",
        "n_success",
        "n_sifted",
        "n_errors",
        "empirical_gain",
        "empirical_qber",
        "gain_stderr",
        "qber_stderr",
        "seed",
        "mode",
        "convention",
    )

    @classmethod
    def from_counts(cls, cfg: ProtocolConfig, counts) -> SimTally:
        n_success, n_sifted, n_errors, n_left, n_right, n_double, n_none = counts
        n = cfg.n_rounds
        gain = n_success / n
        if n_sifted:
            qber = n_errors / n_sifted
            qber_se = math.sqrt(qber * (1.0 - qber) / n_sifted)
        else:
            qber = qber_se = math.nan
        return cls(
            n_rounds=n,
            n_success=n_success,
            n_sifted=n_sifted,
            n_errors=n_errors,
            empirical_gain=gain,
            empirical_qber=qber,
            gain_stderr=math.sqrt(gain * (1.0 - gain) / n),
            qber_stderr=qber_se,
            seed=cfg.seed,
            mode=cfg.mode.value,
            convention=cfg.channel.convention.value,
            n_left=n_left,
            n_right=n_right,
            n_double=n_double,
            n_no_click=n_none,
        )

    def as_dict(self) -> dict:
        """Flat dict with the serialised key set; NaN becomes None."""
        out = {}
        for k in self.JSON_KEYS:
            v = getattr(self, k)
            if isinstance(v, float) and math.isnan(v):
                v = None
            out[k] = v
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), **kw)


def _sift_offset(m: int, d: int) -> int | None:
    """None if the phase-slice difference m is not 0 or pi, else the extra flip."""
    if m == 0:
        return 0
    if d % 2 == 0 and 2 * m == d:
        return 1
    return None


def run_round(cfg: ProtocolConfig, round_index: int) -> RoundRecord:
    """Scalar reference for one round, drawing from the (seed, round_index) substream."""
    key = rng.stream_key(cfg.seed)

    def d(slot):
        return rng.draw(key, round_index, slot)

    mode, phi0, phi1, n_slices, A, B, p_d, e_d = cfg.kernel_args()
    ka = rng.to_bit(d(rng.K_A))
    kb = rng.to_bit(d(rng.K_B))
    if mode == 0:
        ca = rng.to_bit(d(rng.CHOICE_A))
        cb = rng.to_bit(d(rng.CHOICE_B))
        phis = (phi0, phi1)
        angle = (phis[ca] - phis[cb]) + math.pi * (ka - kb)
    else:
        ca = int(rng.to_unit(d(rng.CHOICE_A)) * n_slices)
        cb = int(rng.to_unit(d(rng.CHOICE_B)) * n_slices)
        m = (ca - cb) % n_slices
        angle = (2.0 * math.pi * m) / n_slices + math.pi * (ka - kb)
    c = math.cos(angle)
    s = 2.0 * math.sqrt(A * B)
    il = max(0.5 * ((A + B) + s * c), 0.0)
    ir = max(0.5 * ((A + B) - s * c), 0.0)
    opt_l = rng.to_unit(d(rng.OPT_L)) < -math.expm1(-il)
    opt_r = rng.to_unit(d(rng.OPT_R)) < -math.expm1(-ir)
    if rng.to_unit(d(rng.SWAP)) < e_d:
        opt_l, opt_r = opt_r, opt_l
    click_l = opt_l or rng.to_unit(d(rng.DARK_L)) < p_d
    click_r = opt_r or rng.to_unit(d(rng.DARK_R)) < p_d

    if click_l and click_r:
        outcome = Outcome.DOUBLE_CLICK
    elif click_l:
        outcome = Outcome.L
    elif click_r:
        outcome = Outcome.R
    else:
        outcome = Outcome.NO_CLICK
    flipped = None
    if outcome is Outcome.L:
        flipped = kb
    elif outcome is Outcome.R:
        flipped = 1 - kb
    if flipped is None:
        kept = False
    elif mode == 0:
        kept = ca == cb
    else:
        kept = _sift_offset(m, n_slices) is not None
    return RoundRecord(ka, kb, ca, cb, outcome, flipped, kept)


def sift(records, mode: Mode | str = Mode.POLARIZATION, phase_slices: int | None = None) -> list[tuple[int, int]]:
    """Keep the rounds usable for key and return aligned (k_a, k_b_final) pairs.

    Polarization mode keeps single-click rounds with matching basis indices.
    Phase mode keeps single-click rounds whose phase slices differ by 0 or
    pi, and Bob flips once more at pi; ``phase_slices`` is required there.
    """
    mode = Mode.parse(mode)
    if mode is Mode.PHASE and not phase_slices:
        raise ValueError("phase mode sifting needs phase_slices")
    pairs = []
    for r in records:
        if r.outcome not in (Outcome.L, Outcome.R):
            continue
        if mode is Mode.POLARIZATION:
            if r.basis_choice_a != r.basis_choice_b:
                continue
            pairs.append((r.k_a, r.k_b_after_flip))
        else:
            extra = _sift_offset((r.basis_choice_a - r.basis_choice_b) % phase_slices, phase_slices)
            if extra is None:
                continue
            pairs.append((r.k_a, r.k_b_after_flip ^ extra))
    return pairs


def _split(n: int, parts: int) -> list[tuple[int, int]]:
    step = -(-n // parts)
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]


def simulate(cfg: ProtocolConfig, workers: int = 1, block=None) -> SimTally:
    """Run ``cfg.n_rounds`` rounds and tally them.

    Rounds are split into contiguous blocks evaluated on a thread pool; the
    counts are integers summed after all blocks finish, so the tally does
    not depend on ``workers`` or on completion order.
    """
    if block is None:
        from . import run_block as block
    key = rng.stream_key(cfg.seed)
    args = cfg.kernel_args()
    spans = _split(cfg.n_rounds, max(1, int(workers)))
    if len(spans) == 1:
        parts = [block(key, 0, cfg.n_rounds, *args)]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            parts = list(pool.map(lambda span: block(key, span[0], span[1], *args), spans))
    counts = tuple(sum(col) for col in zip(*parts))
    return SimTally.from_counts(cfg, counts)


def _click(intensity: float, p_d: float) -> float:
    return -math.expm1(-intensity) + p_d * math.exp(-intensity)


def _outcome_probs(il: float, ir: float, p_d: float, e_d: float) -> tuple[float, float]:
    """P(only L), P(only R) with the misalignment swap folded in."""

    def only(a, b):
        return _click(a, p_d) * (1.0 - _click(b, p_d))

    p_l = (1.0 - e_d) * only(il, ir) + e_d * only(ir, il)
    p_r = (1.0 - e_d) * only(ir, il) + e_d * only(il, ir)
    return p_l, p_r


def expected_rates(cfg: ProtocolConfig) -> dict:
    """Exact expectation of the simulated model, by enumerating every choice.

    Returns the per-round success probability (gain), the probability that a
    round is sifted, the sifted error rate (qber) and the L/R split.
    """
    mode, phi0, phi1, n_slices, A, B, p_d, e_d = cfg.kernel_args()
    s = 2.0 * math.sqrt(A * B)
    if mode == 0:
        choices = [((ca, cb), 0.25, phi_diff, ca == cb, 0)
                   for ca, phi_a in enumerate((phi0, phi1))
                   for cb, phi_b in enumerate((phi0, phi1))
                   for phi_diff in [phi_a - phi_b]]
    else:
        choices = []
        for m in range(n_slices):
            extra = _sift_offset(m, n_slices)
            choices.append((m, 1.0 / n_slices, 2.0 * math.pi * m / n_slices, extra is not None, extra or 0))
    gain = sifted = errors = p_left = p_right = 0.0
    for ka in (0, 1):
        for kb in (0, 1):
            for _, weight, phi_diff, keep, extra in choices:
                w = 0.25 * weight
                c = math.cos(phi_diff + math.pi * (ka - kb))
                il = max(0.5 * (A + B + s * c), 0.0)
                ir = max(0.5 * (A + B - s * c), 0.0)
                pl, pr = _outcome_probs(il, ir, p_d, e_d)
                gain += w * (pl + pr)
                p_left += w * pl
                p_right += w * pr
                if keep:
                    sifted += w * (pl + pr)
                    # final bit kb ^ R ^ extra
                    errors += w * (pl * ((kb ^ extra) != ka) + pr * ((1 - kb ^ extra) != ka))
    return {
        "gain": gain,
        "p_left": p_left,
        "p_right": p_right,
        "sifted": sifted,
        "qber": errors / sifted if sifted else math.nan,
    }


def phase_averaged_gain(params: SystemParams, eta_a: float, eta_b: float) -> float:
    """Single-click probability of the beam-splitter model averaged over a uniform relative phase.

    Averaging exp(-|a +/- b e^{i t}|^2 / 2) over t gives exp(-mu'/2) I0(|a||b|),
    hence Q = 2 (1-p_d) e^{-mu'/2} I0(2x) - 2 (1-p_d)^2 e^{-mu'} with
    mu' and x as in the closed-form gain.
    """
    p_d = params.dark_count_rate
    A, B = eta_a * params.mu_a, eta_b * params.mu_b
    mu_prime = A + B
    two_x = math.sqrt(A * B)
    return 2.0 * (1.0 - p_d) * math.exp(-mu_prime / 2.0) * bessel_i0(two_x) - 2.0 * (1.0 - p_d) ** 2 * math.exp(-mu_prime)


def config_for(
    params: SystemParams,
    length_km: float,
    convention: Convention | str = Convention.PAPER_LITERAL,
    **kw,
) -> ProtocolConfig:
    return ProtocolConfig(params=params, channel=ChannelConfig(length_km, convention), **kw)
