import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from casimir import closed_form as cf
from casimir import mode_sum as ms
from casimir.core import PlateConfig, SeriesControl, ThermalState
from casimir.errors import DomainError, ExtrapolationError, ValidationError


def test_spectrum():
    dd, dn = ms.ModeSpectrum("DD", 2.0), ms.ModeSpectrum("dn", 2.0)
    assert dd.k(1) == pytest.approx(math.pi / 2) and dd.k(3) == pytest.approx(3 * math.pi / 2)
    assert dn.k(1) == pytest.approx(math.pi / 4)
    assert dd.has_zero_mode and not dn.has_zero_mode
    assert dd.count_below(10.0) == 6 and dn.count_below(10.0) == 6
    assert dd.count_below(0.1) == 0 and dn.count_below(0.1) == 0
    with pytest.raises(DomainError):
        dd.k(0)
    with pytest.raises(ValidationError):
        ms.ModeSpectrum("DD", 0.0)


@pytest.mark.parametrize("beta, w", [(1.0, 0.3), (2.0, 5.0), (0.1, 40.0)])
def test_oscillator_thermodynamics(beta, w):
    with mpmath.workdps(30):
        e_ref = float(w / 2 * mpmath.coth(beta * w / 2))
        f_ref = float(w / 2 + mpmath.log(1 - mpmath.exp(-beta * w)) / beta)
    assert ms.mode_energy(beta, w) == pytest.approx(e_ref, rel=1e-14)
    assert ms.mode_free_energy(beta, w) == pytest.approx(f_ref, rel=1e-14)
    assert ms.mode_energy(math.inf, w) == w / 2
    # E = d(beta F)/d beta
    h = 1e-6 * beta
    fd = ((beta + h) * ms.mode_free_energy(beta + h, w) - (beta - h) * ms.mode_free_energy(beta - h, w)) / (2 * h)
    assert fd == pytest.approx(ms.mode_energy(beta, w), rel=1e-7)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("bc", ["DD", "DN", "NN"])
def test_zero_T_oracle(N, bc):
    cfg = PlateConfig(N, 1.0)
    o = ms.energy_zero_T_oracle(cfg, bc)
    exact = cf.energy_zero_T(cfg, bc)
    assert abs(o.value - exact) <= 1e-4 * abs(exact)
    assert abs(o.value - exact) <= o.error


def test_zero_T_oracle_scales_with_d():
    a = ms.energy_zero_T_oracle(PlateConfig(2, 1.0), "DD").value
    b = ms.energy_zero_T_oracle(PlateConfig(2, 0.5), "DD").value
    assert b == pytest.approx(a * 4, rel=1e-5)


def test_damped_sum_approaches_closed_form():
    cfg = PlateConfig(3, 1.0)
    exact = cf.energy_zero_T(cfg, "DD")
    gaps = [abs(ms.damped_sum(cfg, "DD", lam).value - exact) for lam in (0.1, 0.05, 0.025)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_unstable_extrapolation_raises():
    ctrl = SeriesControl(extrapolation_tol=1e-12)
    with pytest.raises(ExtrapolationError):
        ms.energy_zero_T_oracle(PlateConfig(3, 1.0), "DD", ctrl)


def test_oracle_dimension_limit():
    with pytest.raises(DomainError):
        ms.energy_zero_T_oracle(PlateConfig(4, 1.0), "DD")
    with pytest.raises(ValidationError):
        ms.energy_zero_T_oracle(PlateConfig(2, 1.0), "DD", SeriesControl(damping_ladder=(0.1, 0.05)))


@pytest.mark.parametrize("bc", ["DD", "DN"])
@pytest.mark.parametrize("d, beta", [(1.0, 1.0), (0.7, 3.0), (2.0, 0.5)])
def test_thermal_energy_n1_explicit_sum(bc, d, beta):
    # sum_n' k_n / (e^{beta k_n} - 1) - (d/pi) int_0^inf k / (e^{beta k} - 1) dk
    shift = 0.5 if bc == "DN" else 0.0
    ks = [math.pi * (n - shift) / d for n in range(1, 2000)]
    s = math.fsum(k * math.exp(-beta * k) / -math.expm1(-beta * k) for k in ks)
    if bc == "DD":
        s += 0.5 / beta
    s -= (d / math.pi) * math.pi ** 2 / (6 * beta ** 2)
    got = ms.thermal_correction_oracle(PlateConfig(1, d), ThermalState(beta), bc).energy
    assert got.value == pytest.approx(s, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("bc", ["DD", "DN"])
def test_thermal_pressure_is_minus_dF_dd(N, bc):
    stt = ThermalState(1.3)
    h = 1e-5
    p = ms.thermal_correction_oracle(PlateConfig(N, 1.0), stt, bc).pressure.value
    fp = ms.thermal_correction_oracle(PlateConfig(N, 1.0 + h), stt, bc).free_energy.value
    fm = ms.thermal_correction_oracle(PlateConfig(N, 1.0 - h), stt, bc).free_energy.value
    assert p == pytest.approx(-(fp - fm) / (2 * h), rel=1e-6)


@pytest.mark.parametrize("d, T", [(1.0, 0.5), (0.4, 2.0), (3.0, 0.2)])
def test_n1_log_term_identity(d, T):
    # the plain mode sum differs from the hyperbolic closed form by (T/2) ln(2 d T) for DD
    # and by (T/2) ln 2 for DN
    cfg, stt = PlateConfig(1, d), ThermalState(1 / T)
    for bc, shift in (("DD", 0.5 * T * math.log(2 * d * T)), ("DN", 0.5 * T * math.log(2.0))):
        plain = cf.energy_zero_T(cfg, bc) + ms.thermal_correction_oracle(cfg, stt, bc).free_energy.value
        closed = cf.free_energy_finite_T(cfg, stt, bc).value
        assert plain - closed == pytest.approx(shift, rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("bc", ["DD", "DN"])
def test_totals_match_series(N, bc):
    cfg, stt = PlateConfig(N, 1.0), ThermalState(2.0)
    tot = ms.low_temperature_totals(cfg, stt, bc)
    e, f = cf.energy_finite_T(cfg, stt, bc), cf.free_energy_finite_T(cfg, stt, bc)
    assert abs(tot.energy.value - e.value) <= tot.energy.error + e.error
    assert abs(tot.free_energy.value - f.value) <= tot.free_energy.error + f.error
    p = cf.pressure_finite_T(cfg, stt, bc)
    assert tot.pressure.value == pytest.approx(p.value, rel=1e-10)
    assert tot.entropy.value == pytest.approx(2.0 * (tot.energy.value - tot.free_energy.value), rel=1e-12)


def test_zero_temperature_correction_vanishes():
    th = ms.thermal_correction_oracle(PlateConfig(2, 1.0), ThermalState(math.inf), "DD")
    assert th.energy.value == th.free_energy.value == th.pressure.value == 0.0


def test_nn_thermal_refused():
    with pytest.raises(ValidationError):
        ms.thermal_correction_oracle(PlateConfig(2, 1.0), ThermalState(1.0), "NN")


@settings(max_examples=25, deadline=None)
@given(N=st.integers(1, 3), d=st.floats(0.3, 3.0), T=st.floats(0.05, 3.0))
def test_thermal_energy_correction_positive_for_dd(N, d, T):
    # heating the plates adds energy: E(T) - E(0) >= 0 up to the error bound
    th = ms.thermal_correction_oracle(PlateConfig(N, d), ThermalState(1 / T), "DD")
    assert th.energy.value >= -th.energy.error
