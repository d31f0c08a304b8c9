import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spincorr import closed_forms as cf
from spincorr.correlations import correlation_report, thermal_report
from spincorr.errors import InvalidInput, InvalidTemperature
from spincorr.models import XXZ, ThermalPoint, XxxDM, dm_hamiltonian, xxz_hamiltonian


def plogp(p):
    return p * np.log2(p)


def raw_xxz(J, Jz, B, b, T):
    """Q and C evaluated directly, with no rescaling or rearrangement."""
    eta = np.sqrt(b * b + J * J)
    m = np.cosh(eta / T)
    n = b * np.sinh(eta / T) / eta
    ez = np.exp(Jz / (2 * T))
    rho22, rho33 = ez * (m - n), ez * (m + n)
    Z = np.exp(-(Jz + 2 * B) / (2 * T)) + np.exp(-(Jz - 2 * B) / (2 * T)) + rho22 + rho33
    lo, hi = np.exp((Jz - 2 * eta) / (2 * T)), np.exp((Jz + 2 * eta) / (2 * T))
    q = -plogp(rho22 / Z) - plogp(rho33 / Z) + plogp(lo / Z) + plogp(hi / Z)
    mu = b * b + J * J * np.cosh(2 * eta / T)
    nu = np.sqrt(J * J * Z**4 * (b * b + mu + J * J) * np.sinh(eta / T) ** 2) * np.exp(Jz / T)
    xi_p = np.exp(Jz / T) * Z**2 * mu + np.sqrt(2) * nu
    xi_m = np.exp(Jz / T) * Z**2 * mu - np.sqrt(2) * nu
    c = np.sqrt(xi_p) / (eta * Z**2) - np.sqrt(xi_m) / (eta * Z**2) - 2 * np.exp(-Jz / (2 * T)) / Z
    return q, np.maximum(c, 0)


def raw_dm(J, D, T):
    delta = 2 * J * np.sqrt(1 + D * D)
    Z = 2 * np.exp(-J / (2 * T)) * (1 + np.exp(J / T) * np.cosh(delta / (2 * T)))
    Lp, Lm = np.exp((J + delta) / (2 * T)), np.exp((J - delta) / (2 * T))
    Mp, Mm = 1 + np.exp(delta / T), -1 + np.exp(delta / T)
    rho22 = Lm * Mp / 2
    q = -2 * plogp(rho22 / Z) + plogp(Lm / Z) + plogp(Lp / Z)
    c = np.maximum(2 / Z * (0.5 * np.abs(Lm * Mm) - np.exp(-J / (2 * T))), 0)
    return q, c


def uniform_box(rng, n, **box):
    return {k: rng.uniform(lo, hi, n) for k, (lo, hi) in box.items()}


def test_xxz_matrix_trivial_and_xx():
    assert np.allclose(cf.xxz_thermal_matrix(0, 0, 0, 0, 0.3), np.eye(4) / 4, atol=1e-16)
    rho = cf.xxz_thermal_matrix(1, 0, 0, 0, 1.0)
    Z = 2 + 2 * np.cosh(1)
    expected = np.diag([1, np.cosh(1), np.cosh(1), 1]) / Z
    expected[1, 2] = expected[2, 1] = -np.sinh(1) / Z
    assert np.allclose(rho, expected, atol=1e-15)


def test_xxz_marginal_matches_reduced_state_formula():
    from spincorr.linalg import partial_trace
    J, Jz, B, b, T = 1.0, 0.4, 0.5, 0.8, 0.4
    d = cf.xxz_derived(J, Jz, B, b, T)
    rho_a = partial_trace(cf.xxz_thermal_matrix(J, Jz, B, b, T), "A")
    expected = np.diag([d.corner_11 + d.rho22, d.rho33 + d.corner_00]) / d.Z
    assert np.allclose(rho_a, expected, atol=1e-15)


def test_xxz_mid_examples():
    rng = np.random.default_rng(0)
    p = uniform_box(rng, 500, Jz=(-2, 2), B=(0, 2), b=(-2, 2), T=(0.1, 2))
    assert np.all(cf.xxz_mid(J=0.0, **p) == 0)
    generic = correlation_report(ThermalPoint(XXZ(1, 0, 0, 0.5), 0.4)).Q
    assert abs(cf.xxz_mid(1, 0, 0, 0.5, 0.4) - generic) <= 1e-10


def test_xxz_concurrence_examples():
    rng = np.random.default_rng(1)
    p = uniform_box(rng, 500, Jz=(-2, 2), B=(0, 2), T=(0.01, 2))
    assert np.all(cf.xxz_concurrence(J=0.0, b=0.0, **p) == 0)
    generic = correlation_report(ThermalPoint(XXZ(1, 0, 0, 0.5), 0.4)).C
    assert abs(cf.xxz_concurrence(1, 0, 0, 0.5, 0.4) - generic) <= 1e-9


def test_dm_examples():
    assert cf.dm_mid(0, 1.3, 0.7) == 0
    assert cf.dm_concurrence(0, 1.3, 0.7) == 0
    assert abs(cf.dm_mid(1, 1, 0.6) - correlation_report(ThermalPoint(XxxDM(1, 1), 0.6)).Q) <= 1e-10
    generic = correlation_report(ThermalPoint(XxxDM(1, 2), 0.6)).C
    assert abs(cf.dm_concurrence(1, 2, 0.6) - generic) <= 1e-10
    assert cf.dm_concurrence(-1, 0.1, 0.6) == 0


def test_isotropic_examples():
    assert cf.dm_isotropic_mid(0.0) == pytest.approx(1 / 3, abs=1e-15)
    assert cf.dm_isotropic_mid(1.0) == 0
    assert abs(cf.dm_isotropic_mid(100.0) - 1) <= 1e-3
    assert cf.dm_isotropic_concurrence(3 ** 0.25) <= 1e-15
    assert cf.dm_isotropic_concurrence(2.0) == pytest.approx(13 / 19, abs=1e-15)
    assert cf.dm_isotropic_concurrence(0.0) == 0


def test_isotropic_matches_direct_form():
    x = np.linspace(0.01, 5, 500)
    direct_q = (4 * x**4 * np.log2(x) - (1 + x**4) * (-1 + np.log2(1 + x**4))) / (3 + x**4)
    direct_c = np.maximum((-2 + np.abs(-1 + x**4)) / (3 + x**4), 0)
    assert np.max(np.abs(cf.dm_isotropic_mid(x) - direct_q)) <= 1e-12
    assert np.max(np.abs(cf.dm_isotropic_concurrence(x) - direct_c)) <= 1e-12
    # large x stays finite where x^4 would overflow
    assert cf.dm_isotropic_mid(1e100) == pytest.approx(1)
    assert cf.dm_isotropic_concurrence(1e100) == pytest.approx(1)


def test_input_validation():
    with pytest.raises(InvalidInput):
        cf.dm_isotropic_mid(-1.0)
    with pytest.raises(InvalidInput):
        cf.dm_isotropic_concurrence(np.nan)
    with pytest.raises(InvalidTemperature):
        cf.xxz_mid(1, 0, 0, 0, 0.0)
    with pytest.raises(InvalidTemperature):
        cf.dm_concurrence(1, 0, -0.5)


def test_stable_forms_match_direct_expressions():
    # moderate temperatures, where the direct forms do not lose digits
    rng = np.random.default_rng(2)
    p = uniform_box(rng, 5000, J=(-2, 2), Jz=(-2, 2), B=(0, 2), b=(-2, 2), T=(0.5, 2))
    q, c = raw_xxz(**p)
    assert np.max(np.abs(cf.xxz_mid(**p) - q)) <= 1e-11
    assert np.max(np.abs(cf.xxz_concurrence(**p) - c)) <= 1e-10
    p = uniform_box(rng, 5000, J=(-3, 3), D=(0, 3), T=(0.5, 2))
    q, c = raw_dm(**p)
    assert np.max(np.abs(cf.dm_mid(**p) - q)) <= 1e-12
    assert np.max(np.abs(cf.dm_concurrence(**p) - c)) <= 1e-12


def test_xxz_low_temperature_finite():
    rng = np.random.default_rng(3)
    p = uniform_box(rng, 2000, J=(-10, 10), Jz=(-10, 10), B=(0, 10), b=(-10, 10), T=(1e-3, 1e-2))
    q, c = cf.xxz_mid(**p), cf.xxz_concurrence(**p)
    assert np.all(np.isfinite(q) & np.isfinite(c))
    generic = thermal_report(xxz_hamiltonian(p["J"], p["Jz"], p["B"], p["b"]), p["T"])
    assert np.max(np.abs(generic.Q - q)) <= 1e-9
    assert np.max(np.abs(generic.C - c)) <= 1e-9


def test_dm_reduces_to_isotropic():
    rng = np.random.default_rng(4)
    J, T = rng.uniform(-3, 3, 2000), rng.uniform(0.1, 2, 2000)
    x = cf.isotropic_x(J, T)
    assert np.max(np.abs(cf.dm_mid(J, 0, T) - cf.dm_isotropic_mid(x))) <= 1e-12
    assert np.max(np.abs(cf.dm_concurrence(J, 0, T) - cf.dm_isotropic_concurrence(x))) <= 1e-12


def test_isotropic_mid_increasing_above_one():
    q = cf.dm_isotropic_mid(np.linspace(1, 20, 1000))
    assert np.all(np.diff(q) > 0)


def test_xxz_symmetries():
    rng = np.random.default_rng(5)
    p = uniform_box(rng, 1000, J=(-2, 2), Jz=(-2, 2), B=(0, 2), b=(-2, 2), T=(0.1, 2))
    flipped_b = dict(p, b=-p["b"])
    flipped_j = dict(p, J=-p["J"])
    for fn in (cf.xxz_mid, cf.xxz_concurrence):
        assert np.array_equal(fn(**p), fn(**flipped_b))
        assert np.array_equal(fn(**p), fn(**flipped_j))


def test_dm_even_in_d():
    rng = np.random.default_rng(6)
    J, D, T = rng.uniform(-3, 3, 1000), rng.uniform(0, 3, 1000), rng.uniform(0.1, 2, 1000)
    for fn in (cf.dm_mid, cf.dm_concurrence):
        assert np.array_equal(fn(J, D, T), fn(J, -D, T))


def test_oracle_equivalence_dm_negative_coupling():
    # delta changes sign with J; the closed forms still agree with the generic route
    rng = np.random.default_rng(7)
    J, D, T = rng.uniform(-3, 0, 2000), rng.uniform(0, 3, 2000), rng.uniform(0.1, 2, 2000)
    generic = thermal_report(dm_hamiltonian(J, D), T)
    assert np.max(np.abs(generic.Q - cf.dm_mid(J, D, T))) <= 1e-10
    assert np.max(np.abs(generic.C - cf.dm_concurrence(J, D, T))) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 2), st.floats(-2, 2), st.floats(0.1, 2))
def test_xxz_closed_forms_in_range(J, Jz, B, b, T):
    q, c = cf.xxz_mid(J, Jz, B, b, T), cf.xxz_concurrence(J, Jz, B, b, T)
    assert 0 <= q <= 2
    assert 0 <= c <= 1
