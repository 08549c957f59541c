"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Each test records a verdict line in VERDICTS (printed in the pytest terminal
summary, or directly when this file is run as a script) and then asserts.
"""

import io
import math
import time

import mpmath as mp
import numpy as np
import pytest

import oracle_transcription as oracle
from pmqkd import cli
from pmqkd.channel import ChannelConfig, Convention, SystemParams, end_to_end_transmittance
from pmqkd.config import parse_config
from pmqkd.errors import ConfigError
from pmqkd.experiment import CSV_HEADER, cutoff_distance, optimize_mu
from pmqkd.keyrate_bb84 import keyrate_bb84, keyrate_bb84_at
from pmqkd.keyrate_polarization import error_rate_11, gains_and_qber, keyrate_polarization, keyrate_polarization_at
from pmqkd.qkdmath import bessel_i0, binary_entropy, bloch_state
from pmqkd.sim import Mode, ProtocolConfig, simulate

P = SystemParams()
VERDICTS = {}


def record(n, ok, detail):
    VERDICTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(VERDICTS[n])
    return ok


def test_criterion_1_cutoff_ordering():
    t0 = time.perf_counter()
    found = []
    for conv in Convention:
        pol = cutoff_distance(P, "polarization", conv, floor=1e-15)
        bb = cutoff_distance(P, "bb84", conv, floor=1e-15)
        found.append((conv.value, pol.cutoff_km, bb.cutoff_km))
    elapsed = time.perf_counter() - t0
    good = [c for c, lp, lb in found if lp > 300.0 and lp > lb]
    detail = "; ".join(f"{c}: pol {lp:.1f} km, bb84 {lb:.1f} km" for c, lp, lb in found)
    ok = bool(good) and elapsed < 10.0
    record(1, ok, f"{detail}; holds under {good or 'none'}; {elapsed:.2f} s")
    assert ok


def test_criterion_2_monte_carlo_vs_closed_form():
    # faithful to the criterion: simulated gain against Q_total and simulated
    # QBER against E_total from the closed-form model, 5 binomial standard errors
    params = P.with_(intensity=0.1)
    lines, ok = [], True
    t_max = 0.0
    for L in (0.0, 25.0, 50.0):
        cfg = ProtocolConfig(params=params, channel=ChannelConfig(L), mode=Mode.POLARIZATION, n_rounds=10**6, seed=2)
        t0 = time.perf_counter()
        t = simulate(cfg)
        t_max = max(t_max, time.perf_counter() - t0)
        ref = keyrate_polarization(params, ChannelConfig(L))
        q, e = ref.Q_total, ref.E_total
        z_gain = (t.empirical_gain - q) / math.sqrt(q * (1 - q) / t.n_rounds)
        if t.n_sifted:
            z_qber = (t.empirical_qber - e) / math.sqrt(e * (1 - e) / t.n_sifted)
        else:
            z_qber = math.inf
        ok = ok and abs(z_gain) <= 5 and abs(z_qber) <= 5
        lines.append(f"L={L:g}: gain {t.empirical_gain:.3e} vs {q:.3e} (z={z_gain:.1f}), qber {t.empirical_qber:.4f} vs {e:.4f} (z={z_qber:.1f})")
    ok = ok and t_max < 60.0
    record(2, ok, "; ".join(lines) + f"; max {t_max:.2f} s/point")
    assert ok


def test_criterion_3_basis_state_vectors():
    r2 = math.sqrt(2) / 2
    expected = [
        (bloch_state(math.pi / 2, math.pi / 6), (r2, r2 * complex(math.sqrt(3) / 2, 0.5))),
        (bloch_state(math.pi / 2, math.pi / 6 + math.pi), (r2, -r2 * complex(math.sqrt(3) / 2, 0.5))),
        (bloch_state(math.pi / 2, math.pi / 4), (r2, r2 * complex(r2, r2))),
        (bloch_state(math.pi / 2, math.pi / 4 + math.pi), (r2, -r2 * complex(r2, r2))),
    ]
    worst = max(abs(got - want) for s, amps in expected for got, want in zip(s.as_tuple(), amps))
    ok = worst <= 1e-12
    record(3, ok, f"four states, max amplitude deviation {worst:.1e}")
    assert ok


def test_criterion_4_analytic_limits():
    rng = np.random.default_rng(4)
    etas = rng.uniform(1e-6, 1.0, size=(200, 2))
    e11_dev = max(abs(error_rate_11(0.0, 0.5, 0.015, a, b) - 0.015) for a, b in etas)
    no_dark = P.with_(dark_count_rate=0.0)
    qd1 = max(abs(gains_and_qber(no_dark, a, b)[1]) for a, b in etas)
    ideal = no_dark.with_(misalignment=0.0)
    e_tot = max(abs(gains_and_qber(ideal, a, b)[3]) for a, b in etas)
    noiseless = ideal.with_(intensity=1.0, error_correction_inefficiency=1.0)
    r_pol = keyrate_polarization_at(noiseless, 1.0, 1.0).R
    r_bb = keyrate_bb84_at(noiseless, 1.0).R
    rel_pol = abs(r_pol / (math.exp(-1) / 16) - 1)
    rel_bb = abs(r_bb / (0.5 * math.exp(-1)) - 1)
    ok = e11_dev <= 1e-12 and qd1 == 0.0 and e_tot == 0.0 and rel_pol <= 1e-12 and rel_bb <= 1e-12
    record(
        4,
        ok,
        f"|e11-e_d| {e11_dev:.1e}, Q_D1 {qd1:g}, E {e_tot:g}, R_pol rel {rel_pol:.1e}, R_bb84 rel {rel_bb:.1e}",
    )
    assert ok


def _library(name):
    if name == "pol_mu0.1_literal_L0":
        return keyrate_polarization(P.with_(intensity=0.1), ChannelConfig(0.0, Convention.PAPER_LITERAL))
    if name == "pol_mu0.3_mid_L100":
        return keyrate_polarization(P.with_(intensity=0.3), ChannelConfig(100.0, Convention.SYMMETRIC_MID))
    if name == "pol_mu0.5_literal_L60_eq4sq":
        return keyrate_polarization(P.with_(intensity=0.5, eq4_variant="squared"), ChannelConfig(60.0))
    if name == "bb84_mu0.48_L0":
        return keyrate_bb84(P.with_(intensity=0.48), 0.0)
    return keyrate_bb84(P.with_(intensity=0.5), 100.0)


def test_criterion_5_transcription_oracle():
    names = ["pol_mu0.1_literal_L0", "pol_mu0.3_mid_L100", "pol_mu0.5_literal_L60_eq4sq", "bb84_mu0.48_L0", "bb84_mu0.5_L100"]
    worst = 0.0
    for name in names:
        ref = oracle.POINTS[name]()
        got = _library(name)
        for key, val in ref.items():
            val = float(val)
            lib = getattr(got, key)
            worst = max(worst, abs(lib - val) / abs(val) if val else abs(lib))
    ok = worst <= 1e-12
    record(5, ok, f"{len(names)} operating points, max relative deviation {worst:.1e}")
    assert ok


def test_criterion_6_properties():
    checks = {}
    # R non-increasing in L at fixed mu: clamped everywhere, raw wherever positive
    mono = True
    for proto, f in (("polarization", lambda p, L: keyrate_polarization(p, ChannelConfig(L))), ("bb84", keyrate_bb84)):
        for mu in (0.05, 0.3, 1.0):
            res = [f(P.with_(intensity=mu), L) for L in np.arange(0.0, 501.0, 2.0)]
            rc = np.array([r.R_clamped for r in res])
            raw = np.array([r.R for r in res])
            mono = mono and np.all(np.diff(rc) <= 0) and np.all(np.diff(raw[raw > 0]) < 0)
    checks["monotone"] = bool(mono)

    cfg = ProtocolConfig(params=P.with_(intensity=0.5), n_rounds=200_000, seed=11)
    checks["deterministic"] = simulate(cfg) == simulate(cfg, workers=3)

    norm = True
    for L in np.arange(0.0, 501.0, 25.0):
        for mu in (1e-3, 0.1, 1.0, 4.0):
            p = P.with_(intensity=mu)
            r = keyrate_polarization(p, ChannelConfig(float(L)))
            b = keyrate_bb84(p, float(L))
            vals = (r.Y_11, r.e_11 + 2 * P.dark_count_rate, r.Q_total, r.E_total, b.Y_1, b.e_1, b.Q_mu, b.E_mu, b.q_1)
            norm = norm and all(0.0 <= v <= 1.0 + 1e-12 for v in vals)
    t = simulate(cfg)
    norm = norm and t.n_success + t.n_double + t.n_no_click == t.n_rounds and 0 <= t.empirical_qber <= 1
    checks["normalized"] = bool(norm)

    xs = np.linspace(0.0, 1.0, 101)
    h_err = max(abs(binary_entropy(x) - float(oracle.h2(mp.mpf(x)))) for x in xs)
    zs = np.linspace(0.0, 50.0, 101)
    i0_err = max(abs(bessel_i0(z) / float(mp.besseli(0, z)) - 1) for z in zs)
    checks["entropy/bessel"] = h_err <= 1e-10 and i0_err <= 1e-10

    mu_star = optimize_mu(P.with_(dark_count_rate=0.0, misalignment=0.0), 30.0, "bb84").mu
    checks["bb84 mu*"] = abs(mu_star - 1.0) <= 1e-4

    ok = all(checks.values())
    record(6, ok, ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items()) + f" (mu*={mu_star:.6f})")
    assert ok


def test_criterion_7_cli_contract(tmp_path, capsys):
    checks = {}
    out = tmp_path / "s.csv"
    rc_ok = cli.main(["sweep", "--stop", "20", "--out", str(out)])
    header = out.read_text().splitlines()[0]
    checks["header"] = rc_ok == 0 and header == "L_km,protocol,convention,mu,R,R_clamped,Q,E,Y_single,e_single"
    checks["header"] = checks["header"] and header == ",".join(CSV_HEADER)

    named = []
    for text, key in (("typo_key = 1", "typo_key"), ("dark_count_rate = -1", "dark_count_rate")):
        try:
            parse_config(text)
            named.append(False)
        except ConfigError as exc:
            named.append(exc.key == key and key in str(exc))
    checks["config errors"] = all(named)

    bad = tmp_path / "bad.cfg"
    bad.write_text("typo_key = 1\n")
    codes = (
        cli.main(["keyrate", "--length", "10"]),
        cli.main(["keyrate", "--config", str(bad)]),
        cli.main(["optimize-mu", "--length", "900", "--protocol", "bb84"]),
    )
    capsys.readouterr()
    checks["exit codes"] = codes == (0, 2, 3)

    ok = all(checks.values())
    record(7, ok, ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items()) + f" codes={codes}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
