r"""Closed-form engine: zero-temperature energies and the thermal Bessel series.

With :math:`x = 4\pi d/\beta` the finite-temperature energy and free energy per
area are double series in :math:`K_\nu(x m n)`, summed over all pairs with
:math:`mn \le P`. Since :math:`e^y K_\nu(y)` is decreasing and the number of
pairs with a given product :math:`k` is at most :math:`2\sqrt{k}`, the
discarded part is bounded by a geometric series in :math:`e^{-x}`; that bound
is what decides :math:`P`.

The series values are totals: they already contain the zero-temperature
energy and tend to it as :math:`\beta \to \infty`.
"""

import math
from typing import NamedTuple
from dataclasses import dataclass

import numpy as np

from . import specfun
from .core import (
    BoundaryPair,
    CasimirReport,
    ClassicalScale,
    Engine,
    ErrorBounds,
    classical_limit_ratio,
    default_control,
)
from .errors import ConvergenceError, DomainError, ValidationError

__all__ = [
    "Estimate",
    "DoubleSeriesTerm",
    "LOW_T_SWITCH",
    "energy_zero_T",
    "pressure_zero_T",
    "energy_finite_T",
    "free_energy_finite_T",
    "entropy",
    "entropy_high_T",
    "high_T_pressure_coefficient",
    "pressure_finite_T",
    "energy_series",
    "free_energy_series",
    "iter_energy_terms",
    "finite_T_engine",
    "casimir_report",
]

_EPS = float(np.finfo(float).eps)
# per-term relative error: K_nu to ~30 ulp plus the power factors
_TERM_REL_ERR = 64.0 * _EPS
_LN_TINY = math.log(float(np.finfo(float).tiny))

# below this x = 4 pi d / beta the double series needs ~(1/x) log(1/x) terms;
# N <= 3 then switches to the mode sum (beta / (4 pi d) > 50)
LOW_T_SWITCH = 1.0 / 50.0


class Estimate(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class DoubleSeriesTerm:
    m: int
    n: int
    value: float

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValidationError("series indices start at 1")
        if not math.isfinite(self.value):
            raise ValidationError(f"non-finite series term at (m={self.m}, n={self.n})")


def _ctrl(ctrl):
    return default_control() if ctrl is None else ctrl


def _sign_alternates(bc):
    bc = BoundaryPair.parse(bc)
    bc.require_finite_temperature_support()
    return bc is BoundaryPair.DN


def _require_finite(state):
    if state.is_zero_temperature:
        raise DomainError("finite-temperature operation called with beta = inf; use the zero-temperature form")


# ---------------------------------------------------------------- zero temperature

def _zero_T_dd_magnitude(n_dim, d):
    N = n_dim
    return (specfun.gamma((N + 1) / 2.0) * specfun.riemann_zeta(N + 1.0)
            / ((4.0 * math.pi) ** ((N + 1) / 2.0) * d ** N))


def energy_zero_T(cfg, bc):
    r"""Zero-temperature energy per area.

    DD and NN give :math:`-\Gamma(\frac{N+1}{2})\zeta(N+1)/((4\pi)^{(N+1)/2} d^N)`;
    DN gives :math:`(1 - 2^{-N})` times the same magnitude with positive sign.
    """
    bc = BoundaryPair.parse(bc)
    mag = _zero_T_dd_magnitude(cfg.n_dim, cfg.separation)
    if bc is BoundaryPair.DN:
        return -math.expm1(-cfg.n_dim * math.log(2.0)) * mag
    return -mag


def pressure_zero_T(cfg, bc):
    """Zero-temperature pressure, ``-dE/dd = N E / d``."""
    return cfg.n_dim * energy_zero_T(cfg, bc) / cfg.separation


# ---------------------------------------------------------------- series kernel

def _pair_indices(P):
    ns = np.arange(1, P + 1, dtype=np.int64)
    counts = P // ns
    total = int(counts.sum())
    n = np.repeat(ns, counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    m = np.arange(total, dtype=np.int64) - starts + 1
    return m, n


def _log_k(mu, y):
    # log K_mu(y) from the scaled function, safe past exp underflow
    return math.log(specfun.bessel_ke(mu, y)) - y


def _tail_bound(components, x, P):
    """Bound on sum over m n > P of |terms|, or inf if not yet geometric."""
    total = 0.0
    for coef, p, r, mu in components:
        if coef == 0.0:
            continue
        s = p + max(r, 0.0) + 0.5
        k1 = P + 1.0
        log_ratio = s * math.log1p(1.0 / k1) - x
        if log_ratio >= 0.0:
            return math.inf
        log_first = math.log(2.0 * abs(coef)) + s * math.log(k1) + _log_k(abs(mu), x * k1)
        log_b = log_first - math.log(-math.expm1(log_ratio))
        total += math.exp(log_b) if log_b > _LN_TINY else 0.0
    return total


def _double_series(components, x, alternating, ctrl, *, what, unit, prefactor, offset=0.0):
    r"""Evaluate ``offset + prefactor * sum_{m,n} s_m sum_c coef n^p m^r K_mu(x m n)``.

    ``components`` is a list of ``(coef, p, r, mu)`` with ``p >= 0``.
    Returns an :class:`Estimate` whose error covers truncation and rounding.
    """
    for _, p, _, _ in components:
        if p < 0:
            raise DomainError("series kernel needs a non-negative power of n")
    target = ctrl.rel_tol
    X = x + math.log(1.0 / target) + 10.0
    while True:
        P = max(1, int(math.ceil(X / x)))
        n_terms = int((P // np.arange(1, P + 1)).sum())
        if n_terms > ctrl.max_terms:
            raise ConvergenceError(
                f"{what}: {n_terms} terms needed at 4*pi*d/beta={x:.4g}, max_terms={ctrl.max_terms}"
            )
        m, n = _pair_indices(P)
        mf = m.astype(float)
        nf = n.astype(float)
        y = x * mf * nf
        terms = np.zeros_like(y)
        for coef, p, r, mu in components:
            if coef == 0.0:
                continue
            with np.errstate(under="ignore"):
                terms += coef * nf ** p * mf ** r * specfun.bessel_k(abs(mu), y)
        if alternating:
            terms = np.where(m % 2 == 1, -terms, terms)
        series = math.fsum(terms)
        rounding = _TERM_REL_ERR * float(np.abs(terms).sum())
        tail = _tail_bound(components, x, P)
        value = offset + prefactor * series
        err = abs(prefactor) * (tail + rounding) + 8.0 * _EPS * (abs(offset) + abs(prefactor * series))
        rounding_err = abs(prefactor) * rounding + 8.0 * _EPS * (abs(offset) + abs(prefactor * series))
        floor = ctrl.abs_tol * unit
        if rounding_err > ctrl.rel_tol * abs(value) and not (abs(value) <= floor and rounding_err <= floor):
            # more terms cannot help
            raise ConvergenceError(
                f"{what}: rounding error {rounding_err:.3e} alone exceeds the requested "
                f"tolerance (rel_tol={ctrl.rel_tol:g}) for value {value:.6e}"
            )
        if math.isfinite(tail) and (err <= ctrl.rel_tol * abs(value) or (abs(value) <= floor and err <= floor)):
            return Estimate(value, err)
        X *= 1.5


def energy_series(cfg, state, bc, ctrl=None):
    r"""General-:math:`N` energy double series, valid for :math:`N = 1` as well.

    .. math::
        E = -\frac{\pi}{2^{N/2-4} d^{N/2-2} \beta^{N/2+2}}
            \sum_{m,n} s_m \frac{n^{N/2+1}}{m^{N/2-1}} K_{N/2-1}(4\pi d m n/\beta)
    """
    ctrl = _ctrl(ctrl)
    _require_finite(state)
    alt = _sign_alternates(bc)
    N, d, b = cfg.n_dim, cfg.separation, state.beta
    h = N / 2.0
    x = 4.0 * math.pi * d / b
    pref = -math.pi * 2.0 ** (4.0 - h) * d ** (2.0 - h) * b ** (-h - 2.0)
    return _double_series([(1.0, h + 1.0, 1.0 - h, h - 1.0)], x, alt, ctrl,
                          what="energy series", unit=d ** -N, prefactor=pref)


def _free_energy_leading(n_dim, d, beta, alternating):
    N = n_dim
    mag = specfun.gamma(N / 2.0) * specfun.riemann_zeta(N) / (math.pi ** (N / 2.0) * 2.0 ** N * beta * d ** (N - 1))
    if alternating:
        return -math.expm1((1 - N) * math.log(2.0)) * mag
    return -mag


def free_energy_series(cfg, state, bc, ctrl=None):
    r"""General-:math:`N` free energy series (:math:`N \ge 2`).

    The leading :math:`\zeta(N)/\beta` term diverges at :math:`N = 1`, where the
    cancellation against the double series is analytic, so ``N = 1`` is refused.
    """
    ctrl = _ctrl(ctrl)
    _require_finite(state)
    if cfg.n_dim < 2:
        raise DomainError("general free-energy series needs n_dim >= 2; N = 1 has its own closed form")
    alt = _sign_alternates(bc)
    N, d, b = cfg.n_dim, cfg.separation, state.beta
    h = N / 2.0
    x = 4.0 * math.pi * d / b
    lead = _free_energy_leading(N, d, b, alt)
    pref = -(2.0 ** (2.0 - h)) * d ** (1.0 - h) * b ** (-h - 1.0)
    return _double_series([(1.0, h, -h, h)], x, alt, ctrl,
                          what="free-energy series", unit=d ** -N, prefactor=pref, offset=lead)


def _pressure_series(cfg, state, bc, ctrl):
    # -dF/dd termwise with dK_nu/dy = -(K_{nu-1} + K_{nu+1}) / 2
    alt = _sign_alternates(bc)
    N, d, b = cfg.n_dim, cfg.separation, state.beta
    h = N / 2.0
    x = 4.0 * math.pi * d / b
    lead = _free_energy_leading(N, d, b, alt)
    B = -(2.0 ** (2.0 - h)) * b ** (-h - 1.0)
    # d/dd [d^{1-h} (n/m)^h K_h(y)], y = x m n, dy/dd = y / d
    #   = d^{-h} (n/m)^h [(1-h) K_h - (y/2)(K_{h-1} + K_{h+1})]
    # (n/m)^h y = x n^{h+1} m^{1-h}
    comps = [
        (1.0 - h, h, -h, h),
        (-0.5 * x, h + 1.0, 1.0 - h, h - 1.0),
        (-0.5 * x, h + 1.0, 1.0 - h, h + 1.0),
    ]
    pref = B * d ** (-h)
    # -dF/dd: leading term scales as d^{1-N}
    offset = (N - 1) * lead / d
    est = _double_series(comps, x, alt, ctrl, what="pressure series",
                         unit=d ** (-N - 1), prefactor=-pref, offset=offset)
    return est


# ---------------------------------------------------------------- N = 1 forms

def _single_series(kind, cfg, state, alternating, ctrl):
    d, b = cfg.separation, state.beta
    x = 4.0 * math.pi * d / b
    X = x + math.log(1.0 / ctrl.rel_tol) + 10.0
    while True:
        n_max = max(1, int(math.ceil(X / x)))
        if n_max > ctrl.max_terms:
            raise ConvergenceError(f"N=1 {kind}: {n_max} terms needed, max_terms={ctrl.max_terms}")
        n = np.arange(1, n_max + 1, dtype=float)
        y = x * n
        with np.errstate(over="ignore", under="ignore"):
            if kind == "energy":
                # sinh^{-2}(y/2) = 4 e^{-y} / (1 - e^{-y})^2
                e = np.exp(-y)
                terms = 4.0 * e / (-np.expm1(-y)) ** 2
                pref = -math.pi * d / (b * b)
                # successive-term ratio < e^{-x} / (1 - e^{-x})^2 bound on geometric tail
                first_tail = 4.0 * math.exp(-x * (n_max + 1)) / (-math.expm1(-x * (n_max + 1))) ** 2
            else:
                terms = 1.0 / (n * np.expm1(y))
                pref = -1.0 / b
                first_tail = math.exp(-x * (n_max + 1)) / ((n_max + 1) * (-math.expm1(-x * (n_max + 1))))
        if alternating:
            terms = np.where(n.astype(np.int64) % 2 == 1, -terms, terms)
        tail = first_tail / (-math.expm1(-x))
        series = math.fsum(terms)
        rounding = 16.0 * _EPS * float(np.abs(terms).sum())
        value = pref * series
        err = abs(pref) * (tail + rounding) + 4.0 * _EPS * abs(value)
        unit = 1.0 / d
        floor = ctrl.abs_tol * unit
        ok = err <= ctrl.rel_tol * abs(value) or (abs(value) <= floor and err <= floor)
        rounding_err = abs(pref) * rounding + 4.0 * _EPS * abs(value)
        if not ok and rounding_err > ctrl.rel_tol * abs(value) and not (abs(value) <= floor and rounding_err <= floor):
            raise ConvergenceError(
                f"N=1 {kind}: rounding error {rounding_err:.3e} alone exceeds the requested tolerance"
            )
        if ok:
            return Estimate(value, err)
        X *= 1.5


# ---------------------------------------------------------------- regime selection

def finite_T_engine(cfg, state):
    """Engine used for a finite-temperature point."""
    x = 4.0 * math.pi * cfg.separation / state.beta
    if x < LOW_T_SWITCH and cfg.n_dim <= 3:
        return Engine.MODE_SUM
    return Engine.CLOSED_FORM


def _low_T(cfg, state, bc, ctrl):
    from . import mode_sum

    return mode_sum.low_temperature_totals(cfg, state, bc, ctrl)


# ---------------------------------------------------------------- public thermal API

def energy_finite_T(cfg, state, bc, ctrl=None):
    """Energy per area at finite temperature, as ``Estimate(value, error)``.

    N = 1 uses the hyperbolic closed form; deep in the quantum regime
    (beta / (4 pi d) > 50, N <= 3) the mode sum supplies the value.
    """
    ctrl = _ctrl(ctrl)
    _require_finite(state)
    alt = _sign_alternates(bc)
    if finite_T_engine(cfg, state) is Engine.MODE_SUM:
        return _low_T(cfg, state, bc, ctrl).energy
    if cfg.n_dim == 1:
        return _single_series("energy", cfg, state, alt, ctrl)
    return energy_series(cfg, state, bc, ctrl)


def free_energy_finite_T(cfg, state, bc, ctrl=None, *, general_form=False):
    """Free energy per area at finite temperature.

    ``general_form=True`` forces the general-N series, which is refused at N = 1.
    """
    ctrl = _ctrl(ctrl)
    _require_finite(state)
    alt = _sign_alternates(bc)
    if general_form:
        return free_energy_series(cfg, state, bc, ctrl)
    if finite_T_engine(cfg, state) is Engine.MODE_SUM:
        return _low_T(cfg, state, bc, ctrl).free_energy
    if cfg.n_dim == 1:
        return _single_series("free_energy", cfg, state, alt, ctrl)
    return free_energy_series(cfg, state, bc, ctrl)


def entropy(cfg, state, bc, ctrl=None):
    """Entropy per area, ``beta (E - F)``."""
    ctrl = _ctrl(ctrl)
    _require_finite(state)
    _sign_alternates(bc)
    if finite_T_engine(cfg, state) is Engine.MODE_SUM:
        return _low_T(cfg, state, bc, ctrl).entropy
    e = energy_finite_T(cfg, state, bc, ctrl)
    f = free_energy_finite_T(cfg, state, bc, ctrl)
    b = state.beta
    s = b * (e.value - f.value)
    return Estimate(s, b * (e.error + f.error) + 2.0 * _EPS * abs(s))


def entropy_high_T(cfg, bc):
    """Classical-limit entropy per area; 0 for N = 1."""
    bc = BoundaryPair.parse(bc)
    bc.require_finite_temperature_support()
    N, d = cfg.n_dim, cfg.separation
    if N == 1:
        return 0.0
    mag = specfun.gamma(N / 2.0) * specfun.riemann_zeta(N) / (math.pi ** (N / 2.0) * 2.0 ** N * d ** (N - 1))
    if bc is BoundaryPair.DN:
        return math.expm1((1 - N) * math.log(2.0)) * mag
    return mag


def high_T_pressure_coefficient(cfg, bc):
    """Limit of P / T as T -> inf, equal to ``-(N-1) S_inf / d``."""
    return -(cfg.n_dim - 1) * entropy_high_T(cfg, bc) / cfg.separation


def _pressure_analytic(cfg, state, bc, ctrl):
    if finite_T_engine(cfg, state) is Engine.MODE_SUM:
        return _low_T(cfg, state, bc, ctrl).pressure
    if cfg.n_dim == 1:
        # for the N = 1 forms -dF/dd = E / d exactly
        e = energy_finite_T(cfg, state, bc, ctrl)
        return Estimate(e.value / cfg.separation, e.error / cfg.separation)
    return _pressure_series(cfg, state, bc, ctrl)


def pressure_finite_T(cfg, state, bc, ctrl=None, *, self_check=True):
    """Pressure ``-(dF/dd)_T`` per area at finite temperature.

    Termwise analytic derivative; with ``self_check`` it is compared to a
    central difference of the free energy (step ``1e-5 d``) at ``1e-6`` relative.
    """
    ctrl = _ctrl(ctrl)
    _require_finite(state)
    _sign_alternates(bc)
    est = _pressure_analytic(cfg, state, bc, ctrl)
    if self_check:
        h = 1e-5 * cfg.separation
        fp = free_energy_finite_T(cfg.with_separation(cfg.separation + h), state, bc, ctrl)
        fm = free_energy_finite_T(cfg.with_separation(cfg.separation - h), state, bc, ctrl)
        fd = -(fp.value - fm.value) / (2.0 * h)
        # difference noise from the two free-energy bounds
        noise = (fp.error + fm.error) / (2.0 * h)
        if abs(fd - est.value) > 1e-6 * abs(est.value) + noise + est.error:
            raise ConvergenceError(
                f"pressure self-check failed: analytic {est.value:.10e}, finite difference {fd:.10e}"
            )
    return est


def iter_energy_terms(cfg, state, bc, n_max):
    """Yield the leading ``m, n <= n_max`` energy series terms (prefactor included)."""
    _require_finite(state)
    alt = _sign_alternates(bc)
    N, d, b = cfg.n_dim, cfg.separation, state.beta
    h = N / 2.0
    x = 4.0 * math.pi * d / b
    pref = -math.pi * 2.0 ** (4.0 - h) * d ** (2.0 - h) * b ** (-h - 2.0)
    for n in range(1, n_max + 1):
        for m in range(1, n_max + 1):
            sign = -1.0 if (alt and m % 2) else 1.0
            k = specfun.bessel_k(abs(h - 1.0), x * m * n)
            yield DoubleSeriesTerm(m, n, sign * pref * n ** (h + 1) * m ** (1 - h) * k)


# ---------------------------------------------------------------- report

def casimir_report(cfg, state, bc, ctrl=None):
    """Assemble a :class:`CasimirReport` for one point."""
    ctrl = _ctrl(ctrl)
    bc = BoundaryPair.parse(bc)
    scale = ClassicalScale.for_config(cfg)
    ratio = classical_limit_ratio(state, scale)
    if state.is_zero_temperature:
        e = energy_zero_T(cfg, bc)
        p = pressure_zero_T(cfg, bc)
        # specfun-level accuracy of gamma and zeta
        ee = 1e-13 * abs(e)
        return CasimirReport(
            engine=Engine.CLOSED_FORM, n_dim=cfg.n_dim, bc=bc, d=cfg.separation, T=0.0,
            energy_per_area=e, free_energy_per_area=e, entropy_per_area=0.0, pressure=p,
            error_bounds=ErrorBounds(ee, ee, 0.0, 1e-13 * abs(p)), classical_ratio=ratio,
        )
    bc.require_finite_temperature_support()
    engine = finite_T_engine(cfg, state)
    e = energy_finite_T(cfg, state, bc, ctrl)
    f = free_energy_finite_T(cfg, state, bc, ctrl)
    s = entropy(cfg, state, bc, ctrl)
    p = pressure_finite_T(cfg, state, bc, ctrl)
    return CasimirReport(
        engine=engine, n_dim=cfg.n_dim, bc=bc, d=cfg.separation, T=state.temperature,
        energy_per_area=e.value, free_energy_per_area=f.value, entropy_per_area=s.value,
        pressure=p.value, error_bounds=ErrorBounds(e.error, f.error, s.error, p.error),
        classical_ratio=ratio,
    )
