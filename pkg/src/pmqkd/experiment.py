"""Distance sweeps, intensity optimization and cutoff distances for both protocols."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .channel import ChannelConfig, Convention, SystemParams
from .errors import DeadAtZeroDistance, DegenerateChannelError
from .keyrate_bb84 import keyrate_bb84
from .keyrate_polarization import keyrate_polarization

PROTOCOLS = ("polarization", "bb84")
MU_MIN = 1e-4
MU_MAX = 4.0
GRID_POINTS = 200
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_FLOOR = 1e-15
CSV_HEADER = ("L_km", "protocol", "convention", "mu", "R", "R_clamped", "Q", "E", "Y_single", "e_single")


def evaluate(params: SystemParams, length_km: float, protocol: str, convention=Convention.PAPER_LITERAL):
    """Closed-form result record for one protocol at one distance."""
    if protocol == "polarization":
        return keyrate_polarization(params, ChannelConfig(length_km, convention))
    if protocol == "bb84":
        return keyrate_bb84(params, length_km)
    raise ValueError(f"unknown protocol {protocol!r} (expected one of {PROTOCOLS})")


def rate(params: SystemParams, length_km: float, protocol: str, convention=Convention.PAPER_LITERAL) -> float:
    """Raw key rate; -inf where the channel is degenerate."""
    try:
        return evaluate(params, length_km, protocol, convention).R
    except DegenerateChannelError:
        return -math.inf


@dataclass(frozen=True)
class MuOptimum:
    mu: float
    rate: float

    @property
    def positive(self) -> bool:
        """False is the 'no positive rate' sentinel: nothing on the grid gives R > 0."""
        return self.rate > 0.0


def mu_grid() -> np.ndarray:
    return np.geomspace(MU_MIN, MU_MAX, GRID_POINTS)


def golden_section_max(f, a: float, b: float, tol: float = 1e-9, max_iter: int = 200) -> tuple[float, float]:
    """Maximise a unimodal f on [a, b]; returns (x, f(x))."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(c) + abs(d)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def optimize_mu(
    params: SystemParams, length_km: float, protocol: str, convention=Convention.PAPER_LITERAL
) -> MuOptimum:
    """Intensity maximising the key rate on (1e-4, 4].

    A 200-point geometric grid brackets the peak; golden-section search then
    refines it inside the two neighbouring grid cells. The refined point is
    kept only if it beats the best grid point, so the result is never worse
    than any grid value.
    """
    grid = mu_grid()

    def f(mu):
        return rate(params.with_(intensity=float(mu)), length_km, protocol, convention)

    values = np.array([f(mu) for mu in grid])
    i = int(np.argmax(values))
    best = MuOptimum(float(grid[i]), float(values[i]))
    if not math.isfinite(best.rate):
        return best
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    mu, r = golden_section_max(f, float(lo), float(hi))
    if r >= best.rate:
        best = MuOptimum(mu, r)
    return best


def optimized_rate(params, length_km, protocol, convention=Convention.PAPER_LITERAL) -> float:
    return optimize_mu(params, length_km, protocol, convention).rate


@dataclass(frozen=True)
class CutoffResult:
    protocol: str
    convention: str
    floor: float
    cutoff_km: float
    lower_bound: bool
    mu_at_cutoff: float | None
    rate_at_cutoff: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def cutoff_distance(
    params: SystemParams,
    protocol: str,
    convention=Convention.PAPER_LITERAL,
    floor: float = DEFAULT_FLOOR,
    mu: float | None = None,
    max_km: float = 1000.0,
    tol_km: float = 0.1,
) -> CutoffResult:
    """Largest L in [0, max_km] with R(L) >= floor, to within ``tol_km``.

    By default the intensity is re-optimised at every distance; pass ``mu``
    to hold it fixed. If R(max_km) still clears the floor the result is
    flagged as a lower bound.
    """
    if not floor > 0:
        raise ValueError(f"floor={floor!r} must be > 0")
    convention = Convention.parse(convention)

    def point(length):
        if mu is None:
            opt = optimize_mu(params, length, protocol, convention)
            return opt.mu, opt.rate
        return mu, rate(params.with_(intensity=mu), length, protocol, convention)

    mu0, r0 = point(0.0)
    if not r0 > floor:
        raise DeadAtZeroDistance(f"{protocol}: R(0 km) = {r0:.3e} does not exceed floor {floor:.3e}")
    m_hi, r_hi = point(max_km)
    if r_hi >= floor:
        return CutoffResult(protocol, convention.value, floor, max_km, True, m_hi, r_hi)
    lo, hi = 0.0, max_km
    m_lo, r_lo = mu0, r0
    while hi - lo > tol_km:
        mid = 0.5 * (lo + hi)
        m_mid, r_mid = point(mid)
        if r_mid >= floor:
            lo, m_lo, r_lo = mid, m_mid, r_mid
        else:
            hi = mid
    return CutoffResult(protocol, convention.value, floor, lo, False, m_lo, r_lo)


@dataclass(frozen=True)
class SweepSpec:
    """Distance grid and policy for a sweep. ``mu=None`` re-optimises mu at each distance."""

    L_start: float = 0.0
    L_end: float = 500.0
    L_step: float = 10.0
    protocols: tuple[str, ...] = PROTOCOLS
    mu: float | None = None
    convention: Convention = Convention.PAPER_LITERAL
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if not self.L_start <= self.L_end:
            raise ValueError("L_start must be <= L_end")
        if not self.L_step > 0:
            raise ValueError("L_step must be > 0")
        if not self.floor > 0:
            raise ValueError("floor must be > 0")
        if self.mu is not None and not self.mu > 0:
            raise ValueError("mu must be > 0")
        bad = [p for p in self.protocols if p not in PROTOCOLS]
        if bad or not self.protocols:
            raise ValueError(f"protocols must be a non-empty subset of {PROTOCOLS}, got {self.protocols!r}")
        object.__setattr__(self, "convention", Convention.parse(self.convention))
        object.__setattr__(self, "protocols", tuple(p for p in PROTOCOLS if p in self.protocols))

    def distances(self) -> list[float]:
        n = int(math.floor((self.L_end - self.L_start) / self.L_step + 1e-9)) + 1
        return [self.L_start + i * self.L_step for i in range(n)]


@dataclass(frozen=True)
class SweepRow:
    L_km: float
    protocol: str
    convention: str
    mu: float
    R: float
    R_clamped: float
    Q: float
    E: float
    Y_single: float
    e_single: float

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, k) for k in CSV_HEADER)


def sweep_point(params: SystemParams, length_km: float, protocol: str, convention, mu: float | None) -> SweepRow:
    convention = Convention.parse(convention)
    if mu is None:
        mu = optimize_mu(params, length_km, protocol, convention).mu
    p = params.with_(intensity=mu)
    try:
        res = evaluate(p, length_km, protocol, convention)
    except DegenerateChannelError:
        nan = math.nan
        return SweepRow(length_km, protocol, convention.value, mu, nan, nan, nan, nan, nan, nan)
    if protocol == "polarization":
        q, e, y, es = res.Q_total, res.E_total, res.Y_11, res.e_11
    else:
        q, e, y, es = res.Q_mu, res.E_mu, res.Y_1, res.e_1
    return SweepRow(length_km, protocol, convention.value, mu, res.R, res.R_clamped, q, e, y, es)


def _sweep_task(args):
    return sweep_point(*args)


def sweep(spec: SweepSpec, params: SystemParams, workers: int = 1) -> list[SweepRow]:
    """One row per (distance, protocol), ordered by distance then protocol."""
    tasks = [(params, L, proto, spec.convention, spec.mu) for L in spec.distances() for proto in spec.protocols]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [_sweep_task(t) for t in tasks]


def write_csv(rows: Iterable[SweepRow], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row.as_tuple()])


def read_csv(fh: TextIO) -> list[SweepRow]:
    reader = csv.reader(fh)
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for rec in reader:
        d = dict(zip(CSV_HEADER, rec))
        rows.append(
            SweepRow(
                L_km=float(d["L_km"]),
                protocol=d["protocol"],
                convention=d["convention"],
                **{k: float(d[k]) for k in CSV_HEADER[3:]},
            )
        )
    return rows


def compare_cutoffs(
    params: SystemParams, convention=Convention.PAPER_LITERAL, floor: float = DEFAULT_FLOOR
) -> dict[str, CutoffResult]:
    return {p: cutoff_distance(params, p, convention, floor) for p in PROTOCOLS}


def rows_for(rows: Sequence[SweepRow], protocol: str) -> list[SweepRow]:
    return [r for r in rows if r.protocol == protocol]
