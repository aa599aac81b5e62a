r"""Mode-summation oracle for N in {1, 2, 3}.

Independent of the Bessel series: energies are built from the discrete
longitudinal spectrum :math:`k_n`, the transverse momenta are integrated
radially, and the in-gap continuum :math:`(d/\pi)\int_0^\infty dk` is
subtracted.

Zero temperature uses exponential damping :math:`e^{-\lambda\omega}` and a
polynomial extrapolation to :math:`\lambda = 0`. The thermal parts need no
damping and converge absolutely.

For DD the sum carries half weight at :math:`k = 0`. That term is
:math:`d`-independent, so it does not change any force, but it is what
makes the sum match the symmetric (Poisson-resummed) closed forms value
for value. NN uses the same convention; DN has no zero mode.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy import integrate

from . import specfun
from .closed_form import Estimate, energy_zero_T, pressure_zero_T
from .core import BoundaryPair, default_control
from .errors import ConvergenceError, DomainError, ExtrapolationError, ValidationError

__all__ = [
    "ModeSpectrum",
    "ThermalCorrection",
    "ThermalTotals",
    "mode_energy",
    "mode_free_energy",
    "damped_sum",
    "energy_zero_T_oracle",
    "thermal_correction_oracle",
    "low_temperature_totals",
    "MAX_ORACLE_DIM",
]

MAX_ORACLE_DIM = 3

_EPS = float(np.finfo(float).eps)
# exp(-y) is negligible against O(1) terms past this exponent
_CUT_EXP = 50.0
_QUAD_REL = 1e-12


class ModeSpectrum:
    """Longitudinal wave numbers between the plates, indexed from n = 1."""

    def __init__(self, bc, d):
        self.bc = BoundaryPair.parse(bc)
        d = float(d)
        if not (d > 0.0 and math.isfinite(d)):
            raise ValidationError("separation > 0 required")
        self.d = d

    @property
    def has_zero_mode(self):
        return self.bc is not BoundaryPair.DN

    def k(self, n):
        n = np.asarray(n, dtype=float)
        if np.any(n < 1):
            raise DomainError("mode index starts at 1")
        shift = 0.5 if self.bc is BoundaryPair.DN else 0.0
        out = math.pi * (n - shift) / self.d
        return float(out) if out.ndim == 0 else out

    def count_below(self, k_max):
        """Number of modes with k_n <= k_max."""
        shift = 0.5 if self.bc is BoundaryPair.DN else 0.0
        return max(0, int(math.floor(k_max * self.d / math.pi + shift)))


def mode_energy(beta, omega):
    """Mean energy of one oscillator, ``(omega/2) coth(beta omega / 2)``."""
    if omega <= 0.0:
        raise DomainError("omega > 0 required")
    if math.isinf(beta):
        return 0.5 * omega
    # coth(a) = 1 + 2 / (e^{2a} - 1)
    return 0.5 * omega + omega / math.expm1(beta * omega)


def mode_free_energy(beta, omega):
    """Free energy of one oscillator, ``omega/2 + ln(1 - e^{-beta omega}) / beta``."""
    if omega <= 0.0:
        raise DomainError("omega > 0 required")
    if not math.isfinite(beta) or beta <= 0.0:
        raise DomainError("finite beta > 0 required")
    return 0.5 * omega + math.log(-math.expm1(-beta * omega)) / beta


def _check_dim(cfg):
    if cfg.n_dim > MAX_ORACLE_DIM:
        raise DomainError(f"mode-sum oracle supports n_dim <= {MAX_ORACLE_DIM}, got {cfg.n_dim}")


def _transverse_const(N):
    # solid angle of S^{N-2} over (2 pi)^{N-1}
    return 2.0 * math.pi ** ((N - 1) / 2.0) / specfun.gamma((N - 1) / 2.0) / (2.0 * math.pi) ** (N - 1)


def _bulk_const(N):
    # (1/2) * solid angle of S^{N-1} over (2 pi)^{N-1}
    return math.pi ** (N / 2.0) / specfun.gamma(N / 2.0) / (2.0 * math.pi) ** (N - 1)


def _quad(f, a, b, what):
    val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=_QUAD_REL, limit=200)
    if not err <= 1e-9 * abs(val) + 1e-300:
        raise ConvergenceError(f"{what}: quadrature error {err:.2e} for value {val:.6e}")
    return val, err


# ---------------------------------------------------------------- zero temperature

def _damped_transverse(N, k, lam):
    """Transverse integral of omega e^{-lam omega} and its error."""
    if N == 1:
        return k * math.exp(-lam * k), 0.0
    C = _transverse_const(N)
    if k == 0.0:
        return C * specfun.gamma(N) / lam ** N, 0.0
    z = lam * k
    # q = k sinh t, omega = k cosh t
    t_max = math.acosh(1.0 + 745.0 / z)

    def f(t):
        return math.sinh(t) ** (N - 2) * math.cosh(t) ** 2 * math.exp(-z * (math.cosh(t) - 1.0))

    val, err = _quad(f, 0.0, t_max, "damped transverse integral")
    scale = C * k ** N * math.exp(-z)
    return scale * val, scale * err


def damped_sum(cfg, bc, lam):
    r"""Damped, continuum-subtracted zero-point sum :math:`S(\lambda)` per area.

    Returns ``Estimate(S, error)`` with
    :math:`S = \tfrac12 [\sum'_n g_\lambda(k_n) - (d/\pi)\int_0^\infty g_\lambda]`.
    """
    _check_dim(cfg)
    N, d = cfg.n_dim, cfg.separation
    spectrum = ModeSpectrum(bc, d)
    n_max = spectrum.count_below(_CUT_EXP / lam) + 1
    parts, errs = [], []
    if N == 1:
        k = spectrum.k(np.arange(1, n_max + 1))
        parts.extend((k * np.exp(-lam * k)).tolist())
    else:
        for n in range(1, n_max + 1):
            v, e = _damped_transverse(N, spectrum.k(n), lam)
            parts.append(v)
            errs.append(e)
    if spectrum.has_zero_mode:
        parts.append(0.5 * _damped_transverse(N, 0.0, lam)[0])
    # closed-form continuum, d/pi times half the bulk integral
    continuum = (d / math.pi) * _bulk_const(N) * specfun.gamma(N + 1.0) / lam ** (N + 1)
    parts.append(-continuum)
    total = math.fsum(parts)
    # cutoff tail: next term times a geometric factor
    k_next = spectrum.k(n_max + 1)
    tail = (k_next + N / lam) ** (N + 1) * math.exp(-lam * k_next) / (-math.expm1(-lam * math.pi / d))
    scale = sum(abs(p) for p in parts)
    err = 0.5 * (math.fsum(errs) + tail + 16.0 * _EPS * scale)
    return Estimate(0.5 * total, err)


def _extrapolate(lams, values, errors):
    lams = np.asarray(lams)
    vals = np.asarray(values)
    deg = min(3, len(lams) - 1)
    coeffs = np.polyfit(lams, vals, deg)
    c0 = float(coeffs[-1])
    fit_resid = float(np.max(np.abs(np.polyval(coeffs, lams) - vals)))
    loo = []
    for i in range(len(lams)):
        keep = np.arange(len(lams)) != i
        c = np.polyfit(lams[keep], vals[keep], min(deg, int(keep.sum()) - 1))
        loo.append(float(c[-1]))
    spread = max(abs(c - c0) for c in loo)
    # propagate per-point errors through the interpolation weights at 0
    weights = []
    for i in range(len(lams)):
        w = 1.0
        for j in range(len(lams)):
            if j != i:
                w *= -lams[j] / (lams[i] - lams[j])
        weights.append(abs(w))
    prop = float(np.dot(weights, errors)) if deg == len(lams) - 1 else float(max(errors)) * len(lams)
    return c0, spread, fit_resid, prop


def energy_zero_T_oracle(cfg, bc, ctrl=None):
    """Zero-temperature Casimir energy per area by damped mode summation.

    Damping lengths are ``ctrl.damping_ladder`` times ``d``. The error is the
    leave-one-out spread plus the fit residual plus propagated quadrature error.
    """
    ctrl = default_control() if ctrl is None else ctrl
    _check_dim(cfg)
    ladder = ctrl.damping_ladder
    if len(ladder) < 3 or not all(0.0 < v <= 0.2 for v in ladder):
        raise ValidationError("damping ladder needs >= 3 values of lambda/d in (0, 0.2]")
    lams = [v * cfg.separation for v in ladder]
    ests = [damped_sum(cfg, bc, lam) for lam in lams]
    c0, spread, resid, prop = _extrapolate(lams, [e.value for e in ests], [e.error for e in ests])
    if spread > ctrl.extrapolation_tol * abs(c0):
        raise ExtrapolationError(
            f"lambda -> 0 extrapolation unstable: leave-one-out spread {spread:.3e} for value {c0:.6e}"
        )
    return Estimate(c0, spread + resid + prop)


# ---------------------------------------------------------------- thermal parts

class ThermalCorrection(NamedTuple):
    energy: Estimate
    free_energy: Estimate
    pressure: Estimate


class ThermalTotals(NamedTuple):
    energy: Estimate
    free_energy: Estimate
    entropy: Estimate
    pressure: Estimate


def _bose(beta, w):
    # 1 / (e^{beta w} - 1) without overflow
    return math.exp(-beta * w) / -math.expm1(-beta * w)


def _planck(beta, w):
    return w * _bose(beta, w)


def _log_planck(beta, w):
    return math.log(-math.expm1(-beta * w)) / beta


def _transverse_thermal(N, k, beta):
    """Transverse integrals at longitudinal k > 0 for E, F and dF/dk."""
    if N == 1:
        return (_planck(beta, k), _log_planck(beta, k), _bose(beta, k)), 0.0
    C = _transverse_const(N)
    bk = beta * k
    if bk > 745.0:
        return (0.0, 0.0, 0.0), 0.0
    # q = k sinh t; factor e^{-beta k} out of every integrand
    t_max = math.acosh(1.0 + 745.0 / bk)

    def parts(t):
        sh = math.sinh(t)
        w = k * math.cosh(t)
        u = math.exp(-beta * w)
        damp = math.exp(-2.0 * bk * math.sinh(0.5 * t) ** 2)
        inv = 1.0 / -math.expm1(-beta * w)
        jac = sh ** (N - 2) * math.cosh(t)
        # log1p(-u) / u -> -1 as u -> 0
        lu = math.log1p(-u) / u if u > 1e-300 else -1.0
        return jac * damp, w * inv, lu / beta, inv / w

    e, ee = _quad(lambda t: (lambda a, b, c, d: a * b)(*parts(t)), 0.0, t_max, "thermal energy integral")
    f, fe = _quad(lambda t: (lambda a, b, c, d: a * c)(*parts(t)), 0.0, t_max, "thermal free-energy integral")
    g, ge = _quad(lambda t: (lambda a, b, c, d: a * d)(*parts(t)), 0.0, t_max, "thermal pressure integral")
    scale = C * k ** (N - 1) * math.exp(-bk)
    return (scale * e, scale * f, scale * k * g), scale * (ee + fe + k * ge)


def thermal_correction_oracle(cfg, state, bc, ctrl=None):
    r"""Temperature-dependent parts of E, F and P per area by direct mode sums.

    Each is :math:`\sum'_n h(k_n) - (d/\pi)\int_0^\infty h(k)\,dk` for the
    transverse-integrated Planck term. For N = 1 DD the free-energy zero
    mode diverges logarithmically and is left out of the sum.
    """
    _check_dim(cfg)
    if state.is_zero_temperature:
        zero = Estimate(0.0, 0.0)
        return ThermalCorrection(zero, zero, zero)
    bc = BoundaryPair.parse(bc)
    bc.require_finite_temperature_support()
    N, d, beta = cfg.n_dim, cfg.separation, state.beta
    spectrum = ModeSpectrum(bc, d)
    n_max = spectrum.count_below(745.0 / beta) + 1
    e_parts, f_parts, p_parts, qerr = [], [], [], 0.0
    for n in range(1, n_max + 1):
        k = spectrum.k(n)
        (e, f, g), err = _transverse_thermal(N, k, beta)
        e_parts.append(e)
        f_parts.append(f)
        # -dF/dd through k_n = const / d
        p_parts.append(g * k / d)
        qerr += err * (1.0 + k / d)
    if spectrum.has_zero_mode:
        if N == 1:
            e_parts.append(0.5 / beta)
        else:
            C = _transverse_const(N)
            e_parts.append(0.5 * C * specfun.gamma(N) * specfun.riemann_zeta(N) / beta ** N)
            f_parts.append(-0.5 * C * specfun.gamma(N - 1.0) * specfun.riemann_zeta(N) / beta ** N)
    B = _bulk_const(N)
    e_cont = (d / math.pi) * B * specfun.gamma(N + 1.0) * specfun.riemann_zeta(N + 1.0) / beta ** (N + 1)
    f_cont = -(d / math.pi) * B * specfun.gamma(N) * specfun.riemann_zeta(N + 1.0) / beta ** (N + 1)
    e_parts.append(-e_cont)
    f_parts.append(-f_cont)
    p_parts.append(f_cont / d)

    def est(parts):
        v = math.fsum(parts)
        # quad's own estimate can undershoot on tiny integrals; floor it at the requested accuracy
        return Estimate(v, qerr + (_QUAD_REL + 16.0 * _EPS) * sum(abs(p) for p in parts))

    return ThermalCorrection(est(e_parts), est(f_parts), est(p_parts))


def low_temperature_totals(cfg, state, bc, ctrl=None):
    """Zero-temperature closed form plus the thermal mode sums.

    For N = 1 the free energy is shifted to the convention of the hyperbolic
    closed forms, which drop ``(T/2) ln(2 d T)`` (DD) and ``(T/2) ln 2`` (DN)
    relative to the plain mode sum, so both engines describe one quantity.
    """
    th = thermal_correction_oracle(cfg, state, bc, ctrl)
    bc = BoundaryPair.parse(bc)
    N, d, beta = cfg.n_dim, cfg.separation, state.beta
    e0 = energy_zero_T(cfg, bc)
    p0 = pressure_zero_T(cfg, bc)
    f_th, p_th = th.free_energy.value, th.pressure.value
    if N == 1:
        # the N = 1 closed forms sit below the plain mode sum by
        # (T/2) ln(2 d T) for DD and by the constant (T/2) ln 2 for DN
        if bc is BoundaryPair.DD:
            f_th -= 0.5 * math.log(2.0 * d / beta) / beta
            p_th += 0.5 / (beta * d)
        else:
            f_th -= 0.5 * math.log(2.0) / beta
    e0_err = 1e-13 * abs(e0)
    energy = Estimate(e0 + th.energy.value, th.energy.error + e0_err)
    free = Estimate(e0 + f_th, th.free_energy.error + e0_err)
    s = beta * (th.energy.value - f_th)
    ent = Estimate(s, beta * (th.energy.error + th.free_energy.error) + 4.0 * _EPS * abs(s))
    pres = Estimate(p0 + p_th, th.pressure.error + 1e-13 * abs(p0))
    return ThermalTotals(energy, free, ent, pres)
