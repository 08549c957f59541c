"""Library vs. the mpmath transcription in oracle_transcription.py.

FROZEN holds the oracle's output (printed by running that file) so a change
in either side shows up; the live comparison guards against a stale freeze.
"""

import pytest

import oracle_transcription as oracle
from pmqkd.channel import ChannelConfig, Convention, SystemParams
from pmqkd.keyrate_bb84 import keyrate_bb84
from pmqkd.keyrate_polarization import keyrate_polarization, keyrate_polarization_at

FROZEN = {
    "pol_mu0.1_literal_L0": {
        "Y_11": 0.0026281465180185292166,
        "e_11": 0.015003970950220346193,
        "Q_11": 5.9451132739602086988e-6,
        "Q_D0": 6.5352604686063452824e-6,
        "Q_D1": 5.7739146322295278115e-10,
        "Q_total": 6.5358378600695682352e-6,
        "E_total": 0.01508569210731924472,
        "mu_prime": 0.00725,
        "x": 0.0018125,
        "R": 2.2142804184399078454e-6,
    },
    "pol_mu0.3_mid_L100": {
        "Y_11": 0.00010512957274412932485,
        "e_11": 0.015021095690253080638,
        "Q_11": 1.7523428179800399723e-6,
        "Q_D0": 2.3579547881573219636e-6,
        "Q_D1": 3.4706807124661204025e-10,
        "Q_total": 2.3583018562285685757e-6,
        "E_total": 0.015142753578478540915,
        "mu_prime": 0.00435,
        "x": 0.0010875,
        "R": 6.2408153121783514588e-7,
    },
    "pol_mu0.5_literal_L60_eq4sq": {
        "Y_11": 0.000010464211226118664373,
        "e_11": 0.0150676142376175225,
        "Q_11": 3.966790586468811366e-7,
        "Q_D0": 6.529838812074593953e-7,
        "Q_D1": 1.8272902179929932193e-10,
        "Q_total": 6.5316661022925869462e-7,
        "E_total": 0.015271365909355206244,
        "mu_prime": 0.0022872203737407005292,
        "x": 0.0005718050934351751323,
        "R": 1.331597000584876196e-7,
    },
    "bb84_mu0.48_L0": {
        "Y_0": 1.6e-7,
        "Y_1": 0.1450001368,
        "e_1": 0.015000535171908886089,
        "Q_mu": 0.067233297207333596321,
        "E_mu": 0.015001154190010355994,
        "q_1": 0.64056600658285713838,
        "R": 0.014770034481388832563,
    },
    "bb84_mu0.5_L100": {
        "Y_0": 1.6e-7,
        "Y_1": 0.001450159768,
        "e_1": 0.015053511345240961064,
        "Q_mu": 0.00072489713504355060707,
        "E_mu": 0.015107049671254857314,
        "q_1": 0.60668356809060678442,
        "R": 0.00014801054163958804829,
    },
    "yield_eta0.0145": {
        "Y_11": 0.00010512957274412932485,
        "e_11": 0.015021095690253080638,
        "Q_11": 2.378129279025539188e-7,
        "Q_D0": 2.6264267331073799834e-7,
        "Q_D1": 1.1590769377826921638e-10,
        "Q_total": 2.6275858100451626756e-7,
        "E_total": 0.015427885028664349107,
        "mu_prime": 0.00145,
        "x": 0.0003625,
        "R": 8.8165812566874228076e-8,
    },
}

P = SystemParams()


def library(name):
    if name == "pol_mu0.1_literal_L0":
        return keyrate_polarization(P.with_(intensity=0.1), ChannelConfig(0.0, Convention.PAPER_LITERAL))
    if name == "pol_mu0.3_mid_L100":
        return keyrate_polarization(P.with_(intensity=0.3), ChannelConfig(100.0, Convention.SYMMETRIC_MID))
    if name == "pol_mu0.5_literal_L60_eq4sq":
        return keyrate_polarization(P.with_(intensity=0.5, eq4_variant="squared"), ChannelConfig(60.0))
    if name == "bb84_mu0.48_L0":
        return keyrate_bb84(P.with_(intensity=0.48), 0.0)
    if name == "bb84_mu0.5_L100":
        return keyrate_bb84(P.with_(intensity=0.5), 100.0)
    if name == "yield_eta0.0145":
        return keyrate_polarization_at(P.with_(intensity=0.1), 0.0145, 0.0145)
    raise KeyError(name)


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen(name):
    got = library(name)
    for key, val in FROZEN[name].items():
        assert getattr(got, key) == pytest.approx(val, rel=1e-12), key


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_freeze_matches_live_oracle(name):
    live = oracle.POINTS[name]()
    for key, val in FROZEN[name].items():
        assert float(live[key]) == pytest.approx(val, rel=1e-15), key


@pytest.mark.parametrize("L", [150.0, 250.0, 400.0])
@pytest.mark.parametrize("conv", list(Convention))
def test_long_distance_against_oracle(L, conv):
    # tiny arm intensities: the regime where 1 - (1 - p_d) e^{-y} cancels
    got = keyrate_polarization(P.with_(intensity=0.6), ChannelConfig(L, conv))
    ref = oracle.polarization("0.6", got.eta_a, got.eta_b)
    for key in ("Q_D0", "Q_D1", "Q_total", "E_total", "Y_11", "e_11", "R"):
        assert getattr(got, key) == pytest.approx(float(ref[key]), rel=1e-11), key
