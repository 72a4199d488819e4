import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from su11chain import thermo
from su11chain.errors import QuadratureNonConvergence
from su11chain.model import HS, XX, ChainSpec, Elliptic, Regime, critical_point, dispersion
from su11chain.special_fns import gamma_fn, riemann_zeta
from su11chain.thermo import (
    endpoint_coefficient,
    finite_chain_free_energy,
    fit_central_charge,
    fit_power_law,
    free_energy,
    free_energy_sweep,
    ground_state_energy,
    low_T_expansion,
    softplus_neg,
)

DISPS = {"xx": dispersion(XX()), "hs": dispersion(HS()), "ell5": dispersion(Elliptic(5.0))}
INTERS = {"xx": XX(), "hs": HS(), "ell5": Elliptic(5.0)}


def spec_at(name, frac):
    return ChainSpec(INTERS[name], lam=frac * DISPS[name].e_pi)


def test_softplus_stable_at_extremes():
    x = np.array([-800.0, -30.0, 0.0, 30.0, 800.0])
    out = softplus_neg(x)
    assert np.all(np.isfinite(out))
    assert out[0] == pytest.approx(800.0, rel=1e-15)
    assert out[2] == pytest.approx(math.log(2), rel=1e-15)
    assert out[-1] == 0.0 or out[-1] < 1e-300


def test_xx_half_filling_ground_energy():
    # (1/pi) int_0^{pi/2} (2 - 2 cos p - 2) dp = -(2/pi) sin(pi/2)
    spec = ChainSpec(XX(), lam=2.0)
    cp = critical_point(spec, DISPS["xx"])
    assert ground_state_energy(DISPS["xx"], cp, 2.0) == pytest.approx(-2 / math.pi, rel=1e-13)


def test_empty_band_freezes_out():
    spec = ChainSpec(XX(), lam=-0.5)
    r = free_energy(spec, DISPS["xx"], 0.01)
    assert r.f0 == 0.0
    assert abs(r.f) < 1e-20


def test_hs_quarter_band_matches_sommerfeld():
    spec = ChainSpec(HS(), lam=math.pi**2 / 4)
    cp = critical_point(spec, DISPS["hs"])
    T = 0.1
    r = free_energy(spec, DISPS["hs"], T)
    assert abs(r.f - (r.f0 - math.pi * T**2 / (6 * cp.v))) < 2e-3 * T**2


@pytest.mark.parametrize("name", list(DISPS))
@pytest.mark.parametrize("frac", [-0.2, 0.0, 0.3, 0.8, 1.0, 1.3])
def test_decomposition_identity(name, frac):
    spec = spec_at(name, frac)
    for T in (0.003, 0.05, 0.7):
        r = free_energy(spec, DISPS[name], T)
        assert abs(r.f - (r.f0 + r.f1 + r.f2)) < 1e-10
        assert r.f1 <= 0.0 and r.f2 <= 0.0
        assert r.f <= r.f0 + 1e-14


@settings(max_examples=15)
@given(st.floats(0.01, 0.99), st.sampled_from(list(DISPS)))
def test_free_energy_non_increasing_in_T(frac, name):
    spec = spec_at(name, frac)
    temps = np.geomspace(1e-3, 1.0, 12)
    f = [r.f for r in free_energy_sweep(spec, DISPS[name], temps)]
    assert np.all(np.diff(f) <= 1e-13)


@pytest.mark.parametrize("name, frac", [("xx", 0.5), ("hs", 0.3), ("ell5", 0.7), ("ell5", 0.0)])
@pytest.mark.parametrize("T", [0.05, 0.3])
def test_finite_mode_sum_matches_integral(name, frac, T):
    spec = spec_at(name, frac)
    exact = finite_chain_free_energy(spec.with_sites(4000), T)
    assert exact == pytest.approx(free_energy(spec, DISPS[name], T).f, abs=1e-6)


def test_threaded_sweep_matches_serial():
    spec = spec_at("ell5", 0.4)
    temps = list(np.geomspace(1e-3, 0.2, 10))
    serial = free_energy_sweep(spec, DISPS["ell5"], temps)
    parallel = free_energy_sweep(spec, DISPS["ell5"], temps, threads=4)
    assert [r.f for r in serial] == [r.f for r in parallel]


def test_temperature_must_be_positive():
    with pytest.raises(ValueError):
        free_energy(spec_at("xx", 0.5), DISPS["xx"], 0.0)


def test_quadrature_failure_is_reported():
    with pytest.raises(QuadratureNonConvergence) as info:
        thermo.integrate(lambda x: 1.0 / abs(x - 0.3) ** 0.99, 0.0, 1.0, epsabs=1e-14)
    assert info.value.achieved > info.value.requested


# -- asymptotics -----------------------------------------------------------


def test_endpoint_coefficient_kappa_two():
    a = 0.7
    expected = a / math.pi * (1 - 2**-0.5) * gamma_fn(1.5) * riemann_zeta(1.5)
    assert endpoint_coefficient(2, a) == pytest.approx(expected, rel=1e-15)


def test_endpoint_coefficient_kappa_one_is_half_of_cft():
    # (a/pi)(1/2) Gamma(2) zeta(2) = pi a / 12 = pi / (12 v) with a = 1/v
    assert endpoint_coefficient(1, 1 / math.pi) == pytest.approx(1 / 12, rel=1e-14)


def test_prediction_per_regime():
    hs0 = low_T_expansion(ChainSpec(HS()), DISPS["hs"])
    assert (hs0.exponent, hs0.critical) == (2.0, True)
    assert hs0.coefficient == pytest.approx(1 / 12, rel=1e-7)

    ell0 = low_T_expansion(ChainSpec(Elliptic(5.0)), DISPS["ell5"])
    assert ell0.exponent == 1.5 and not ell0.critical
    assert ell0.coefficient == pytest.approx(endpoint_coefficient(2, DISPS["ell5"].a_coef))

    top = low_T_expansion(spec_at("ell5", 1.0), DISPS["ell5"])
    assert top.regime is Regime.UPPER_ENDPOINT
    assert top.exponent == 1.5 and not top.critical

    mid = low_T_expansion(spec_at("xx", 0.5), DISPS["xx"])
    assert (mid.exponent, mid.coefficient) == (2.0, pytest.approx(math.pi / 12))

    with pytest.raises(ValueError):
        low_T_expansion(spec_at("xx", 1.5), DISPS["xx"])


@pytest.mark.parametrize("name", ["hs", "ell5"])
def test_endpoint_asymptote_converges(name):
    spec = ChainSpec(INTERS[name])
    pred = low_T_expansion(spec, DISPS[name])
    rel = []
    for T in (1e-1, 1e-2, 1e-3):
        f = free_energy(spec, DISPS[name], T).f
        rel.append(abs(f - pred(T)) / T**pred.exponent)
    assert rel[0] > rel[1] > rel[2]
    assert rel[-1] < 0.05


def test_upper_endpoint_asymptote():
    spec = spec_at("xx", 1.0)
    pred = low_T_expansion(spec, DISPS["xx"])
    T = 1e-3
    f = free_energy(spec, DISPS["xx"], T).f
    assert (f - pred.f0) / T**1.5 == pytest.approx(-pred.coefficient, rel=0.02)


def test_central_charge_requires_criticality():
    with pytest.raises(ValueError):
        fit_central_charge(spec_at("ell5", 0.0), DISPS["ell5"])
    with pytest.raises(ValueError):
        fit_central_charge(spec_at("xx", 0.5), DISPS["xx"], T_grid=[0.01, 0.02])


def test_central_charge_xx_half_filling():
    fit = fit_central_charge(spec_at("xx", 0.5), DISPS["xx"], threads=2)
    assert fit.c_hat == pytest.approx(1.0, abs=0.02)
    assert fit.v_used == pytest.approx(2.0)
    assert fit.residual >= 0.0
    assert len(fit.T_grid) == 8


def test_power_law_fit_recovers_exact_law():
    T = np.geomspace(1e-3, 1e-2, 7)
    exponent, coef = fit_power_law(T, -0.37 * T**1.5)
    assert exponent == pytest.approx(1.5, rel=1e-12)
    assert coef == pytest.approx(0.37, rel=1e-12)


def test_sweep_is_thread_safe_under_concurrent_callers():
    spec = spec_at("hs", 0.5)
    temps = [0.01, 0.02, 0.05]
    expected = [r.f for r in free_energy_sweep(spec, DISPS["hs"], temps)]
    results = []

    def work():
        results.append([r.f for r in free_energy_sweep(spec, DISPS["hs"], temps)])

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == expected for r in results)
