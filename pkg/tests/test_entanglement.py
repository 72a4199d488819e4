import math
import threading
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from su11chain.entanglement import (
    SpectrumCache,
    asymptotic_slope,
    binary_entropy,
    block_entropy,
    calibrate_gamma1,
    correlation_matrix,
    correlation_matrix_finite_N,
    correlation_spectrum,
    endpoint_entropy_limits,
    entropy,
    entropy_asymptotic,
    finite_chain_entropy,
    lookup_gamma1,
    read_calibration,
    renyi_mode_entropy,
    spectrum_of,
    write_calibration,
)
from su11chain.errors import DegenerateGroundState, EigensolverFailure, SizeCapExceeded
from su11chain.model import HS, XX, ChainSpec, Elliptic, critical_point, dispersion


def test_single_site_block():
    assert np.array_equal(correlation_matrix(0.9, 1), [[0.9 / math.pi]])
    assert block_entropy(math.pi / 2, 1).S_exact == pytest.approx(math.log(2), rel=1e-15)


def test_sine_kernel_entries():
    m = correlation_matrix(1.1, 6)
    assert np.allclose(m, m.T)
    assert m[0, 3] == pytest.approx(math.sin(3.3) / (3 * math.pi), rel=1e-15)
    assert np.allclose(np.diag(m), 1.1 / math.pi)


@given(st.floats(0.01, math.pi - 0.01), st.integers(1, 120))
def test_trace_and_range(p0, L):
    spec = correlation_spectrum(p0, L, cache=None)
    assert abs(spec.trace - L * p0 / math.pi) < 1e-8
    assert np.all((spec.mu >= 0) & (spec.mu <= 1))
    assert np.all(np.diff(spec.mu) >= 0)


def test_small_fermi_momentum_is_rank_one():
    p0, L = 1e-7, 8
    m = correlation_matrix(p0, L)
    assert np.allclose(m, p0 / math.pi * np.ones((L, L)), rtol=1e-12)
    eps = 1e-7
    top = correlation_matrix(math.pi - eps, L)
    sign = (-1.0) ** np.subtract.outer(np.arange(L), np.arange(L))
    assert np.allclose(top, np.eye(L) - eps / math.pi * sign, atol=1e-14)


@given(st.floats(0.02, math.pi - 0.02), st.integers(1, 80))
def test_particle_hole_symmetry_of_spectrum(p0, L):
    lo = correlation_spectrum(p0, L, cache=None).mu
    hi = correlation_spectrum(math.pi - p0, L, cache=None).mu
    assert np.allclose(np.sort(1 - hi), lo, atol=1e-12)
    assert block_entropy(p0, L, cache=None).S_exact == pytest.approx(
        block_entropy(math.pi - p0, L, cache=None).S_exact, abs=1e-9
    )


@given(st.floats(0.05, math.pi - 0.05), st.integers(1, 60), st.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_entropy_bounds(p0, L, q):
    s = block_entropy(p0, L, q, cache=None).S_exact
    assert 0.0 <= s <= L * math.log(2) + 1e-12


@pytest.mark.parametrize("q", [0.5, 1.0, 2.0, 3.0])
def test_tiny_block_filling_single_mode_form(q):
    p0, L = 1e-4, 5
    x = L * p0 / math.pi
    exact = block_entropy(p0, L, q, cache=None).S_exact
    # the next eigenvalue is O((L p0)^3); q < 1 magnifies it to O((L p0)^1.5)
    assert exact == pytest.approx(float(renyi_mode_entropy(x, q)), rel=1e-3)


def test_endpoint_limit_values():
    assert endpoint_entropy_limits(1e-3, q=2.0) == pytest.approx(2e-3, rel=1e-15)
    assert endpoint_entropy_limits(1e-3) == pytest.approx(1e-3 * math.log(1e3), rel=1e-15)
    assert endpoint_entropy_limits(1e-3, q=0.5) == pytest.approx(1e-3**0.5 / 0.5, rel=1e-15)
    L = 7
    eps = 1e-3 * math.pi / L
    assert endpoint_entropy_limits(eps, L=L, q=2.0) == pytest.approx(2e-3, rel=1e-12)
    assert endpoint_entropy_limits(0.0) == 0.0


@pytest.mark.parametrize("q", [0.5, 1.0, 2.0])
def test_endpoint_limit_tracks_exact_entropy(q):
    L = 6
    for p0 in (1e-5, 1e-6):
        x = L * p0 / math.pi
        exact = block_entropy(p0, L, q, cache=None).S_exact
        mirror = block_entropy(math.pi - p0, L, q, cache=None).S_exact
        limit = endpoint_entropy_limits(p0, L=L, q=q)
        # relative size of the first neglected term of s_q(x)
        next_order = 1.5 / abs(math.log(x)) if q == 1.0 else 2 * x ** min(q, abs(1 - q))
        assert abs(exact - limit) <= next_order * limit
        # eigenvalues near 1 carry absolute roundoff ~1e-16, raised to the power q
        assert mirror == pytest.approx(exact, rel=1e-6, abs=L * 1e-15**q)


@settings(max_examples=25)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=30))
def test_renyi_continuous_at_one(mus):
    vn = entropy(mus, 1.0).S_exact
    for q in (1 - 1e-4, 1 + 1e-4):
        assert abs(entropy(mus, q).S_exact - vn) < 1e-3


def test_renyi_near_one_routes_to_von_neumann():
    x = np.array([0.2, 0.5, 0.9])
    assert np.array_equal(renyi_mode_entropy(x, 1 + 1e-7), binary_entropy(x))
    with pytest.raises(ValueError):
        renyi_mode_entropy(x, 0.0)


def test_binary_entropy_edges():
    assert np.array_equal(binary_entropy([0.0, 1.0]), [0.0, 0.0])


def test_entropy_accepts_matrix():
    m = correlation_matrix(1.0, 12)
    assert entropy(m).S_exact == pytest.approx(block_entropy(1.0, 12, cache=None).S_exact, rel=1e-14)


def test_eigensolver_rejects_invalid_kernel():
    with pytest.raises(EigensolverFailure) as info:
        spectrum_of(np.array([[2.0, 0.0], [0.0, 0.5]]))
    assert info.value.bad_values == [2.0]
    assert info.value.condition == pytest.approx(4.0)


def test_asymptote_slope_and_warning():
    assert asymptotic_slope(1.0) == pytest.approx(1 / 3)
    assert entropy_asymptotic(math.pi / 2, 100) == pytest.approx(math.log(100) / 3)
    assert entropy_asymptotic(math.pi / 2, 100, gamma1_q=0.5) == pytest.approx(math.log(100) / 3 + 0.5)
    with pytest.warns(RuntimeWarning):
        entropy_asymptotic(0.1, 10)


def test_hs_asymptote_argument():
    lam = 2.0
    cp = critical_point(ChainSpec(HS(), lam=lam), dispersion(HS()))
    # sin p0 = sin(pi - sqrt(pi^2 - 2 lam)) = sin(sqrt(pi^2 - 2 lam))
    assert math.sin(cp.p0) == pytest.approx(math.sin(math.sqrt(math.pi**2 - 2 * lam)), rel=1e-13)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        val = entropy_asymptotic(cp.p0, 400)
    assert val == pytest.approx(math.log(400 * math.sin(math.sqrt(math.pi**2 - 2 * lam))) / 3, rel=1e-12)


def test_block_entropy_reports_asymptote():
    res = block_entropy(math.pi / 3, 50, gamma1_q=0.7)
    assert res.S_asymptotic == pytest.approx(entropy_asymptotic(math.pi / 3, 50, gamma1_q=0.7))
    assert block_entropy(0.0, 50).S_exact == 0.0
    assert block_entropy(math.pi, 50).S_exact == 0.0


def test_universality_in_fermi_momentum():
    values = []
    for L in (500, 600, 1000, 2000):
        p0 = math.asin(500 / L)
        values += [block_entropy(p0, L, cache=None).S_exact, block_entropy(math.pi - p0, L, cache=None).S_exact]
    assert max(values) - min(values) < 0.01


def test_entropy_vanishes_continuously_at_band_edges():
    L = 20
    s = [block_entropy(p0, L, cache=None).S_exact for p0 in (1e-2, 1e-4, 1e-6)]
    assert s[0] > s[1] > s[2]
    assert s[2] < 1e-4
    t = [block_entropy(math.pi - p0, L, cache=None).S_exact for p0 in (1e-2, 1e-4, 1e-6)]
    assert t[0] > t[1] > t[2]


def test_entropy_slope_diverges_at_lower_edge():
    disp = dispersion(XX())
    L = 10

    def s_of(lam):
        return block_entropy(critical_point(ChainSpec(XX(), lam=lam), disp).p0, L, cache=None).S_exact

    slopes = []
    for lam in np.geomspace(1e-3, 1e-4, 5):
        h = lam * 1e-3
        slopes.append((s_of(lam + h) - s_of(lam - h)) / (2 * h))
    assert np.all(np.diff(slopes) > 0)


# -- finite chains ----------------------------------------------------------


def test_finite_correlation_matrix_approaches_sine_kernel():
    lam = 1.0
    p0 = critical_point(ChainSpec(XX(), lam=lam), dispersion(XX())).p0
    errs = []
    for n in (101, 401, 1601):
        m = correlation_matrix_finite_N(ChainSpec(XX(), n, lam), 8)
        errs.append(np.max(np.abs(m - correlation_matrix(p0, 8))))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 2.0 / 1601


def test_finite_chain_outside_band_is_product_state():
    full = correlation_matrix_finite_N(ChainSpec(XX(), 12, 5.0), 6)
    assert np.allclose(full, np.eye(6))
    assert finite_chain_entropy(ChainSpec(XX(), 12, 5.0), 6) == pytest.approx(0.0, abs=1e-12)
    empty = correlation_matrix_finite_N(ChainSpec(XX(), 12, -1.0), 6)
    assert np.array_equal(empty, np.zeros((6, 6)))
    assert finite_chain_entropy(ChainSpec(XX(), 12, -1.0), 6) == 0.0


def test_finite_chain_degenerate_fermi_level():
    # eps_8(2) = 2(1 - cos(pi/2)) = 2
    with pytest.raises(DegenerateGroundState) as info:
        correlation_matrix_finite_N(ChainSpec(XX(), 8, 2.0), 3)
    assert info.value.mode in (2, 6)


def test_finite_chain_validation():
    with pytest.raises(ValueError):
        correlation_matrix_finite_N(ChainSpec(XX(), lam=1.0), 3)
    with pytest.raises(ValueError):
        correlation_matrix_finite_N(ChainSpec(Elliptic(2.0), 6, 1.0), 7)


# -- calibration and cache ---------------------------------------------------


def test_gamma1_is_stable_on_default_grid():
    cal = calibrate_gamma1(1.0)
    assert cal.spread < 1e-3
    assert cal.L_grid == (500, 1000, 2000)


def test_calibration_file_round_trip(tmp_path):
    path = tmp_path / "calibration.txt"
    write_calibration(path, {1.0: 0.7260669392, 2.0: 0.2750000001, 0.5: 1.25})
    text = path.read_text()
    assert "gamma1[1]=0.7260669392" in text
    table = read_calibration(path)
    assert lookup_gamma1(table, 1.0) == pytest.approx(0.7260669392, abs=1e-10)
    assert lookup_gamma1(table, 0.5) == 1.25
    assert lookup_gamma1(table, 3.0) is None
    assert lookup_gamma1(None, 1.0) is None


def test_calibration_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# comment\n\ngamma[1]=2\n")
    with pytest.raises(ValueError, match="bad.txt:3"):
        read_calibration(path)


def test_cache_cap_and_reuse():
    cache = SpectrumCache(l_cap=16)
    a = cache.get(1.0, 10)
    assert cache.get(1.0 + 1e-14, 10) is a
    assert len(cache) == 1
    with pytest.raises(SizeCapExceeded):
        cache.get(1.0, 17)
    cache.clear()
    assert len(cache) == 0


def test_cache_concurrent_insertion():
    cache = SpectrumCache()
    keys = [(0.3 + 0.1 * (i % 5), 40 + i % 3) for i in range(60)]
    out = {}

    def work(chunk):
        for p0, L in chunk:
            out.setdefault((p0, L), []).append(cache.get(p0, L).mu)

    threads = [threading.Thread(target=work, args=(keys[i::6],)) for i in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(cache) == 15
    for (p0, L), mus in out.items():
        ref = correlation_spectrum(p0, L, cache=None).mu
        assert all(np.array_equal(m, ref) for m in mus)
