import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from casimir import closed_form as cf
from casimir import mode_sum
from casimir.core import Engine, PlateConfig, SeriesControl, ThermalState
from casimir.errors import ConvergenceError, DomainError, ValidationError


def brute_force(N, d, beta, bc, kind, M=12):
    """Direct mpmath summation of the thermal double series over m, n <= M."""
    with mpmath.workdps(30):
        h = mpmath.mpf(N) / 2
        d, beta = mpmath.mpf(d), mpmath.mpf(beta)
        x = 4 * mpmath.pi * d / beta
        s = 0
        for m in range(1, M + 1):
            sign = (-1) ** m if bc == "DN" else 1
            for n in range(1, M + 1):
                if kind == "E":
                    s += sign * n ** (h + 1) * mpmath.mpf(m) ** (1 - h) * mpmath.besselk(h - 1, x * m * n)
                else:
                    s += sign * (mpmath.mpf(n) / m) ** h * mpmath.besselk(h, x * m * n)
        if kind == "E":
            return float(-mpmath.pi * 2 ** (4 - h) * d ** (2 - h) * beta ** (-h - 2) * s)
        lead = mpmath.gamma(h) * mpmath.zeta(N) / (mpmath.pi ** h * 2 ** N * beta * d ** (N - 1))
        lead = (1 - mpmath.mpf(2) ** (1 - N)) * lead if bc == "DN" else -lead
        return float(lead - 2 ** (2 - h) * d ** (1 - h) * beta ** (-h - 1) * s)


# ---------------------------------------------------------------- zero temperature

def test_zero_T_known_values():
    assert cf.energy_zero_T(PlateConfig(3, 1.0), "DD") == pytest.approx(-math.pi ** 2 / 1440, rel=1e-12)
    assert cf.energy_zero_T(PlateConfig(1, 1.0), "DD") == pytest.approx(-math.pi / 24, rel=1e-12)
    assert cf.energy_zero_T(PlateConfig(2, 1.0), "DD") == pytest.approx(-1.2020569031595943 / (16 * math.pi),
                                                                        rel=1e-13)
    assert cf.energy_zero_T(PlateConfig(3, 1.0), "DN") == pytest.approx(5.997155e-3, rel=1e-6)
    assert cf.pressure_zero_T(PlateConfig(3, 1.0), "DD") == pytest.approx(-2.056168e-2, rel=1e-6)


@pytest.mark.parametrize("N", range(1, 9))
def test_zero_T_ratios(N):
    cfg = PlateConfig(N, 1.3)
    dd = cf.energy_zero_T(cfg, "DD")
    assert cf.energy_zero_T(cfg, "DN") / dd == pytest.approx(-(1 - 2.0 ** -N), rel=1e-12)
    assert abs(cf.energy_zero_T(cfg, "NN") - dd) <= 1e-15 * abs(dd)


@pytest.mark.parametrize("N", [1, 2, 3, 5])
@pytest.mark.parametrize("bc", ["DD", "DN", "NN"])
def test_zero_T_pressure_is_minus_derivative(N, bc):
    d, h = 0.8, 1e-5
    fd = -(cf.energy_zero_T(PlateConfig(N, d + h), bc) - cf.energy_zero_T(PlateConfig(N, d - h), bc)) / (2 * h)
    assert cf.pressure_zero_T(PlateConfig(N, d), bc) == pytest.approx(fd, rel=1e-8)


# ---------------------------------------------------------------- finite-temperature series

def test_finite_T_reference_point():
    cfg, stt = PlateConfig(3, 1.0), ThermalState(1.0)
    e = cf.energy_finite_T(cfg, stt, "DD")
    f = cf.free_energy_finite_T(cfg, stt, "DD")
    assert e.value == pytest.approx(brute_force(3, 1.0, 1.0, "DD", "E"), rel=1e-6)
    assert f.value == pytest.approx(brute_force(3, 1.0, 1.0, "DD", "F"), rel=1e-6)
    # frozen from the brute-force and mode-sum oracles
    assert e.value == pytest.approx(-2.19119621e-5, rel=1e-8)
    assert f.value == pytest.approx(-2.39160447e-2, rel=1e-8)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
@pytest.mark.parametrize("bc", ["DD", "DN"])
@pytest.mark.parametrize("d, beta", [(1.0, 1.0), (0.5, 2.0), (2.0, 3.0)])
def test_series_against_brute_force(N, bc, d, beta):
    cfg, stt = PlateConfig(N, d), ThermalState(beta)
    M = 12 if 4 * math.pi * d / beta > 2 else 40
    assert cf.energy_series(cfg, stt, bc).value == pytest.approx(brute_force(N, d, beta, bc, "E", M), rel=1e-10)
    assert cf.free_energy_series(cfg, stt, bc).value == pytest.approx(brute_force(N, d, beta, bc, "F", M),
                                                                      rel=1e-10)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("bc", ["DD", "DN"])
def test_series_against_mode_sum(N, bc):
    # totals: zero-point energy plus thermal correction from the mode spectrum
    cfg, stt = PlateConfig(N, 1.0), ThermalState(1.5)
    tot = mode_sum.low_temperature_totals(cfg, stt, bc)
    scale = abs(cf.energy_zero_T(cfg, bc))
    assert abs(cf.energy_finite_T(cfg, stt, bc).value - tot.energy.value) <= 1e-9 * scale
    assert abs(cf.free_energy_finite_T(cfg, stt, bc).value - tot.free_energy.value) <= 1e-9 * scale


def test_iter_energy_terms_sum_matches_series():
    cfg, stt = PlateConfig(3, 1.0), ThermalState(1.0)
    total = math.fsum(t.value for t in cf.iter_energy_terms(cfg, stt, "DD", 8))
    assert total == pytest.approx(cf.energy_series(cfg, stt, "DD").value, rel=1e-12)
    first = next(cf.iter_energy_terms(cfg, stt, "DN", 2))
    assert (first.m, first.n) == (1, 1)


def test_series_tends_to_zero_T_energy():
    cfg = PlateConfig(3, 1.0)
    e0 = cf.energy_zero_T(cfg, "DD")
    # x = 4 pi d / beta above the mode-sum switch; the gap closes as a power of T
    gaps = [abs(cf.energy_series(cfg, ThermalState(4 * math.pi / x), "DD").value - e0) for x in (0.5, 0.1, 0.03)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-6 * abs(e0)


# ---------------------------------------------------------------- N = 1

@pytest.mark.parametrize("bc", ["DD", "DN"])
@pytest.mark.parametrize("d, beta", [(1.0, 2.0), (0.5, 1.0), (2.0, 1.0)])
def test_n1_closed_form_matches_general_series(bc, d, beta):
    cfg, stt = PlateConfig(1, d), ThermalState(beta)
    a = cf.energy_finite_T(cfg, stt, bc).value
    b = cf.energy_series(cfg, stt, bc).value
    assert abs(a - b) <= 1e-10 * abs(b)


def test_n1_reference_energy():
    # beta = 2: x = 2 pi, so the sinh^-2 sum runs over csch^2(pi n)
    e = cf.energy_finite_T(PlateConfig(1, 1.0), ThermalState(2.0), "DD").value
    assert e == pytest.approx(-5.8998e-3, rel=1e-4)
    with mpmath.workdps(30):
        oracle = -mpmath.pi / 4 * mpmath.nsum(lambda n: mpmath.csch(mpmath.pi * n) ** 2, [1, mpmath.inf])
    assert e == pytest.approx(float(oracle), rel=1e-13)


def test_n1_free_energy_closed_form():
    # Lambert identity: sum_n 1 / (n (e^{xn} - 1)) = -sum_k log(1 - e^{-xk})
    d, beta = 1.0, 2.0
    x = 4 * math.pi * d / beta
    oracle = math.fsum(math.log1p(-math.exp(-x * k)) for k in range(1, 60)) / beta
    f = cf.free_energy_finite_T(PlateConfig(1, d), ThermalState(beta), "DD").value
    assert f == pytest.approx(oracle, rel=1e-13)


def test_n1_general_free_energy_refused():
    with pytest.raises(DomainError):
        cf.free_energy_finite_T(PlateConfig(1, 1.0), ThermalState(1.0), "DD", general_form=True)


def test_n1_pressure_is_energy_over_d():
    cfg, stt = PlateConfig(1, 1.5), ThermalState(2.0)
    p = cf.pressure_finite_T(cfg, stt, "DN").value
    assert p == pytest.approx(cf.energy_finite_T(cfg, stt, "DN").value / 1.5, rel=1e-14)


# ---------------------------------------------------------------- thermodynamics

@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("bc", ["DD", "DN"])
@pytest.mark.parametrize("T", [0.3, 1.0, 4.0])
def test_entropy_is_minus_dF_dT(N, bc, T):
    cfg = PlateConfig(N, 0.7)
    s = cf.entropy(cfg, ThermalState(1 / T), bc).value
    h = 1e-4 * T
    fp = cf.free_energy_finite_T(cfg, ThermalState(1 / (T + h)), bc).value
    fm = cf.free_energy_finite_T(cfg, ThermalState(1 / (T - h)), bc).value
    assert -(fp - fm) / (2 * h) == pytest.approx(s, rel=1e-6)


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("bc", ["DD", "DN"])
@pytest.mark.parametrize("d, T", [(1.0, 0.2), (0.5, 1.0), (2.0, 3.0)])
def test_pressure_is_minus_dF_dd(N, bc, d, T):
    stt = ThermalState(1 / T)
    p = cf.pressure_finite_T(PlateConfig(N, d), stt, bc, self_check=False).value
    h = 1e-5 * d
    fd = -(cf.free_energy_finite_T(PlateConfig(N, d + h), stt, bc).value
           - cf.free_energy_finite_T(PlateConfig(N, d - h), stt, bc).value) / (2 * h)
    assert p == pytest.approx(fd, rel=1e-7)


def test_report_identity():
    r = cf.casimir_report(PlateConfig(3, 1.0), ThermalState(0.7), "DN")
    assert r.engine is Engine.CLOSED_FORM
    assert r.entropy_identity_residual() <= 0.0


# ---------------------------------------------------------------- high temperature

def test_entropy_high_T_values():
    assert cf.entropy_high_T(PlateConfig(3, 1.0), "DD") == pytest.approx(1.2020569031595943 / (16 * math.pi),
                                                                         rel=1e-12)
    assert cf.entropy_high_T(PlateConfig(3, 1.0), "DN") == pytest.approx(
        -0.75 * 1.2020569031595943 / (16 * math.pi), rel=1e-12)
    assert cf.entropy_high_T(PlateConfig(1, 5.0), "DD") == 0.0
    with pytest.raises(ValidationError):
        cf.entropy_high_T(PlateConfig(3, 1.0), "NN")


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("bc", ["DD", "DN"])
def test_high_T_limits(N, bc):
    cfg = PlateConfig(N, 1.0)
    beta = 4 * math.pi / 25
    f = cf.free_energy_finite_T(cfg, ThermalState(beta), bc).value
    s_inf = cf.entropy_high_T(cfg, bc)
    assert beta * f == pytest.approx(-s_inf, rel=1e-8)
    # the energy part of P keeps an extra factor x in front of e^{-x}
    p = cf.pressure_finite_T(cfg, ThermalState(beta), bc).value
    assert p * beta == pytest.approx(cf.high_T_pressure_coefficient(cfg, bc), rel=1e-7)


def test_high_T_energy_is_exponentially_small():
    cfg = PlateConfig(2, 1.0)
    beta = 4 * math.pi / 25
    e = cf.energy_finite_T(cfg, ThermalState(beta), "DD").value
    f = cf.free_energy_finite_T(cfg, ThermalState(beta), "DD").value
    assert abs(e) <= 1e-8 * abs(f)


# ---------------------------------------------------------------- regime switch and errors

@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("bc", ["DD", "DN"])
def test_low_T_switch_is_continuous(N, bc):
    cfg = PlateConfig(N, 1.0)
    beta_switch = 4 * math.pi / cf.LOW_T_SWITCH
    lo, hi = ThermalState(beta_switch * (1 - 1e-9)), ThermalState(beta_switch * (1 + 1e-9))
    assert cf.finite_T_engine(cfg, lo) is Engine.CLOSED_FORM
    assert cf.finite_T_engine(cfg, hi) is Engine.MODE_SUM
    scale = abs(cf.energy_zero_T(cfg, bc))
    for fn in (cf.energy_finite_T, cf.free_energy_finite_T):
        assert abs(fn(cfg, lo, bc).value - fn(cfg, hi, bc).value) <= 1e-9 * scale


def test_n4_stays_on_series_at_low_T():
    cfg, stt = PlateConfig(4, 1.0), ThermalState(4 * math.pi / 0.01)
    assert cf.finite_T_engine(cfg, stt) is Engine.CLOSED_FORM
    e = cf.energy_finite_T(cfg, stt, "DD")
    assert e.value == pytest.approx(cf.energy_zero_T(cfg, "DD"), rel=1e-6)


def test_tolerance_below_rounding_raises():
    with pytest.raises(ConvergenceError):
        cf.energy_finite_T(PlateConfig(3, 1.0), ThermalState(1.0), "DD", SeriesControl(rel_tol=1e-16))


def test_term_budget_raises():
    cfg, stt = PlateConfig(3, 1.0), ThermalState(4 * math.pi / 0.05)
    with pytest.raises(ConvergenceError):
        cf.energy_series(cfg, stt, "DD", SeriesControl(max_terms=16))


def test_zero_temperature_state_refused():
    with pytest.raises(DomainError):
        cf.energy_finite_T(PlateConfig(3, 1.0), ThermalState(math.inf), "DD")


def test_nn_finite_T_refused():
    with pytest.raises(ValidationError):
        cf.casimir_report(PlateConfig(3, 1.0), ThermalState(1.0), "NN")


def test_error_bounds_cover_brute_force():
    cfg, stt = PlateConfig(3, 0.6), ThermalState(1.3)
    ctrl = SeriesControl(rel_tol=1e-6)
    e = cf.energy_series(cfg, stt, "DN", ctrl)
    assert abs(e.value - brute_force(3, 0.6, 1.3, "DN", "E")) <= e.error + 1e-14 * abs(e.value)


# ---------------------------------------------------------------- properties

@settings(max_examples=40, deadline=None)
@given(N=st.integers(2, 4), d=st.floats(0.3, 3.0), T=st.floats(0.05, 10.0), kappa=st.floats(0.5, 4.0))
def test_scaling_covariance(N, d, T, kappa):
    a = cf.casimir_report(PlateConfig(N, d), ThermalState(1 / T), "DD")
    b = cf.casimir_report(PlateConfig(N, kappa * d), ThermalState(kappa / T), "DD")
    assert b.energy_per_area == pytest.approx(a.energy_per_area * kappa ** -N, rel=1e-9, abs=1e-300)
    assert b.free_energy_per_area == pytest.approx(a.free_energy_per_area * kappa ** -N, rel=1e-9)
    assert b.entropy_per_area == pytest.approx(a.entropy_per_area * kappa ** (1 - N), rel=1e-8)
    assert b.pressure == pytest.approx(a.pressure * kappa ** -(N + 1), rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(N=st.integers(2, 5), d=st.floats(0.2, 5.0), T=st.floats(0.01, 30.0))
def test_sign_theorems(N, d, T):
    cfg, stt = PlateConfig(N, d), ThermalState(1 / T)
    assert cf.pressure_finite_T(cfg, stt, "DD").value < 0.0
    assert cf.pressure_finite_T(cfg, stt, "DN").value > 0.0
    assert cf.free_energy_finite_T(cfg, stt, "DD").value < 0.0


@settings(max_examples=30, deadline=None)
@given(N=st.integers(2, 4), T1=st.floats(0.05, 5.0), T2=st.floats(0.05, 5.0))
def test_free_energy_decreases_with_T(N, T1, T2):
    # S = -dF/dT > 0 for DD
    cfg = PlateConfig(N, 1.0)
    lo, hi = sorted((T1, T2))
    if hi > lo * 1.01:
        assert (cf.free_energy_finite_T(cfg, ThermalState(1 / hi), "DD").value
                < cf.free_energy_finite_T(cfg, ThermalState(1 / lo), "DD").value)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("bc", ["DD", "DN"])
@pytest.mark.parametrize("d", [0.5, 1.0, 2.0])
def test_energy_exponentially_small_at_high_temperature(N, bc, d):
    # |E| scales as d^-N, so the size check is relative to the T=0 energy
    cfg = PlateConfig(N, d)
    e0 = abs(cf.energy_zero_T(cfg, bc))
    e50 = cf.energy_finite_T(cfg, ThermalState(4 * math.pi * d / 50), bc).value
    e40 = cf.energy_finite_T(cfg, ThermalState(4 * math.pi * d / 40), bc).value
    assert abs(e50) <= 1e-16 * e0
    # leading decay is e^{-x} times a power of x
    assert abs(e50 / e40) == pytest.approx(math.exp(-10) * (50 / 40) ** ((N + 3) / 2), rel=0.02)
