"""Cross-engine consistency checks behind ``casimir validate``."""

import math
from dataclasses import dataclass

from . import closed_form as cf
from . import mode_sum, optical
from .core import BoundaryPair, PlateConfig, ThermalState, default_control
from .errors import ConvergenceError

__all__ = ["CheckResult", "FAULTS", "run_checks", "check_names"]

FAULTS = ("sign", "energy")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ""

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: deviation={self.deviation:.3e} tol={self.tolerance:.1e} {self.detail}".rstrip()


def _rel(a, b):
    return abs(a - b) / abs(b)


class _Engines:
    """Closed-form entry points, optionally with a deliberate fault."""

    def __init__(self, ctrl, fault):
        self.ctrl = ctrl
        self.fault = fault

    def energy_zero_T(self, cfg, bc):
        e = cf.energy_zero_T(cfg, bc)
        return e * (1.0 + 1e-3) if self.fault == "energy" else e

    def pressure(self, cfg, T, bc):
        if T == 0.0:
            p = cf.pressure_zero_T(cfg, bc)
        else:
            p = cf.pressure_finite_T(cfg, ThermalState(1.0 / T), bc, self.ctrl).value
        if self.fault == "sign" and BoundaryPair.parse(bc) is BoundaryPair.DN:
            p = -p
        return p


def _zero_T_oracle(eng):
    worst = 0.0
    for N in (1, 2, 3):
        for bc in ("DD", "DN"):
            cfg = PlateConfig(N, 1.0)
            o = mode_sum.energy_zero_T_oracle(cfg, bc, eng.ctrl)
            worst = max(worst, _rel(o.value, eng.energy_zero_T(cfg, bc)))
    return CheckResult("mode-sum zero-T energy", worst <= 1e-4, worst, 1e-4, "N=1..3, DD/DN, d=1")


def _thermal_oracle(eng):
    worst = 0.0
    st = ThermalState(1.0)
    for N in (1, 2, 3):
        for bc in ("DD", "DN"):
            cfg = PlateConfig(N, 1.0)
            tot = mode_sum.low_temperature_totals(cfg, st, bc, eng.ctrl)
            e0 = abs(eng.energy_zero_T(cfg, bc))
            e = cf.energy_finite_T(cfg, st, bc, eng.ctrl).value
            f = cf.free_energy_finite_T(cfg, st, bc, eng.ctrl).value
            worst = max(worst, abs(tot.energy.value - e) / e0, abs(tot.free_energy.value - f) / e0)
    return CheckResult("mode-sum thermal totals", worst <= 1e-5, worst, 1e-5, "N=1..3, DD/DN, d=1, T=1")


def _optical_even(eng):
    worst = 0.0
    for N in (1, 2, 3, 4):
        for bc in ("DD", "DN", "NN"):
            cfg = PlateConfig(N, 1.0)
            v, tail = optical.even_energy_per_area(cfg, bc, 10**4)
            worst = max(worst, abs(v - eng.energy_zero_T(cfg, bc)) / tail)
    return CheckResult("optical even paths", worst <= 1.0, worst, 1.0, "|diff| / tail bound, n_max=1e4")


def _optical_odd(eng):
    worst_d, worst_dn = 0.0, 0.0
    for N, n_max in ((1, 4_000_000), (2, 100_000), (3, 100_000)):
        cfg = PlateConfig(N, 1.0)
        for bc in ("DD", "DN", "NN"):
            worst_d = max(worst_d, optical.odd_energy_d_independence_check(cfg, bc, 0.01, (1.0, 1.5), n_max))
        worst_dn = max(worst_dn, abs(optical.odd_energy_per_area(cfg, "DN", 0.01, n_max)[0]))
    ok = worst_d <= 1e-8 and worst_dn <= 1e-10
    return CheckResult("optical odd paths", ok, max(worst_d, worst_dn), 1e-8,
                       f"d-independence {worst_d:.1e}, DN cancellation {worst_dn:.1e}")


def _thermo_identity(eng):
    worst = 0.0
    for N in (2, 3):
        for d in (0.5, 1.0):
            for T in (0.5, 1.0, 2.0):
                cfg = PlateConfig(N, d)
                s = cf.entropy(cfg, ThermalState(1.0 / T), "DD", eng.ctrl).value
                h = 1e-4 * T
                fp = cf.free_energy_finite_T(cfg, ThermalState(1.0 / (T + h)), "DD", eng.ctrl).value
                fm = cf.free_energy_finite_T(cfg, ThermalState(1.0 / (T - h)), "DD", eng.ctrl).value
                worst = max(worst, _rel(-(fp - fm) / (2.0 * h), s))
    return CheckResult("entropy vs -dF/dT", worst <= 1e-5, worst, 1e-5, "N=2,3; d=0.5,1; T=0.5,1,2")


def _scaling(eng):
    kappa = 2.0
    worst = 0.0
    for N in (1, 2, 3):
        for bc in ("DD", "DN"):
            for d, T in ((1.0, 0.0), (1.0, 1.0), (0.5, 0.3)):
                a = cf.casimir_report(PlateConfig(N, d), ThermalState.from_temperature(T), bc, eng.ctrl)
                b = cf.casimir_report(PlateConfig(N, kappa * d), ThermalState.from_temperature(T / kappa), bc,
                                      eng.ctrl)
                pairs = [
                    (b.energy_per_area, a.energy_per_area * kappa ** -N),
                    (b.free_energy_per_area, a.free_energy_per_area * kappa ** -N),
                    (b.pressure, a.pressure * kappa ** -(N + 1)),
                ]
                if T > 0.0:
                    pairs.append((b.entropy_per_area, a.entropy_per_area * kappa ** -(N - 1)))
                for x, y in pairs:
                    if y != 0.0:
                        worst = max(worst, _rel(x, y))
    return CheckResult("scaling covariance", worst <= 1e-10, worst, 1e-10, "kappa=2")


def _signs(eng):
    bad = []
    for N in (2, 3, 4):
        for d in (0.5, 1.0, 2.0):
            for T in (0.0, 0.1, 1.0, 10.0):
                cfg = PlateConfig(N, d)
                if not eng.pressure(cfg, T, "DD") < 0.0:
                    bad.append(f"DD N={N} d={d} T={T}")
                if not eng.pressure(cfg, T, "DN") > 0.0:
                    bad.append(f"DN N={N} d={d} T={T}")
    return CheckResult("pressure signs", not bad, float(len(bad)), 0.0,
                       ("violations: " + ", ".join(bad[:3])) if bad else "DD < 0, DN > 0 on 36 points")


def _n1_equivalence(eng):
    worst = 0.0
    for d, beta in ((1.0, 2.0), (0.5, 1.0), (2.0, 1.0)):
        cfg, st = PlateConfig(1, d), ThermalState(beta)
        for bc in ("DD", "DN"):
            worst = max(worst, _rel(cf.energy_series(cfg, st, bc, eng.ctrl).value,
                                    cf.energy_finite_T(cfg, st, bc, eng.ctrl).value))
    return CheckResult("N=1 closed form vs general series", worst <= 1e-10, worst, 1e-10)


def _high_T(eng):
    worst = 0.0
    for N in (2, 3):
        for bc in ("DD", "DN"):
            cfg = PlateConfig(N, 1.0)
            beta = 4.0 * math.pi / 25.0
            f = cf.free_energy_finite_T(cfg, ThermalState(beta), bc, eng.ctrl).value
            worst = max(worst, _rel(beta * f, -cf.entropy_high_T(cfg, bc)))
    return CheckResult("high-T free energy vs entropy", worst <= 1e-8, worst, 1e-8, "4 pi d / beta = 25")


_CHECKS = [
    _zero_T_oracle,
    _thermal_oracle,
    _optical_even,
    _optical_odd,
    _thermo_identity,
    _scaling,
    _signs,
    _n1_equivalence,
    _high_T,
]


def check_names():
    return [c.__name__.lstrip("_") for c in _CHECKS]


def run_checks(ctrl=None, fault=None):
    """Run every check; returns ``(results, convergence_errors)``."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    eng = _Engines(default_control() if ctrl is None else ctrl, fault)
    results, errors = [], []
    for check in _CHECKS:
        try:
            results.append(check(eng))
        except ConvergenceError as exc:
            errors.append(f"{check.__name__.lstrip('_')}: {exc}")
    return results, errors
