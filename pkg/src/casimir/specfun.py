r"""Special functions used by the Casimir engines.

Gamma, Riemann zeta, Dirichlet eta and the modified Bessel function of the
second kind :math:`K_\nu(x)` for real order :math:`\nu \ge 0` and real
argument :math:`x > 0`.

``bessel_k`` accepts a scalar order and a scalar or array argument; the
array path is what the double series in :mod:`casimir.closed_form` use.
Half-integer orders are evaluated from the terminating closed form,
every other order by Temme's series (``x < 2``) or Steed's continued
fraction CF2 (``x >= 2``) at the reduced order :math:`|\mu| \le 1/2`,
followed by forward recurrence, which is stable for :math:`K_\nu`.
"""

import math
from collections import namedtuple
from fractions import Fraction

import numpy as np

from .errors import DomainError

__all__ = [
    "gamma",
    "riemann_zeta",
    "dirichlet_eta",
    "bessel_k",
    "bessel_ke",
    "bessel_k_bounded",
    "is_half_integer",
    "BesselValue",
    "MAX_ORDER",
]

MAX_ORDER = 60.0

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny
# exp(-x) is subnormal or zero past this argument
_UNDERFLOW_X = -math.log(_TINY)

BesselValue = namedtuple("BesselValue", ["value", "abs_error", "underflow"])


def gamma(x):
    """Gamma function for real ``x > 0``.

    Parameters
    ----------
    x : float
        positive, finite argument

    Returns
    -------
    float
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma requires finite x > 0, got {x!r}")
    return math.gamma(x)


# B_2, B_4, ..., B_24
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330), Fraction(854513, 138),
    Fraction(-236364091, 2730),
]
_EM_COEFF = [float(b / math.factorial(2 * k + 2)) for k, b in enumerate(_BERNOULLI)]
_EM_CUT = 16


def riemann_zeta(s):
    r"""Riemann zeta function :math:`\zeta(s)` for real ``s > 1``.

    Direct summation of the first terms plus the Euler--Maclaurin tail

    .. math::
        \zeta(s) = \sum_{n<M} n^{-s} + \frac{M^{1-s}}{s-1} + \frac{M^{-s}}{2}
        + \sum_k \frac{B_{2k}}{(2k)!} (s)_{2k-1} M^{-s-2k+1}.
    """
    s = float(s)
    if not math.isfinite(s) or s <= 1.0:
        raise DomainError(f"riemann_zeta requires s > 1, got {s!r}")
    M = _EM_CUT
    parts = [n ** -s for n in range(M - 1, 0, -1)]
    parts.append(M ** (1.0 - s) / (s - 1.0))
    parts.append(0.5 * M ** -s)
    # rising factorial s (s+1) ... (s+2k-2) times M^{-s-2k+1}
    term = s * M ** (-s - 1.0)
    for k, coeff in enumerate(_EM_COEFF):
        if k:
            term *= (s + 2 * k - 1) * (s + 2 * k) / (M * M)
        corr = coeff * term
        parts.append(corr)
        if abs(corr) < 1e-18 * parts[0]:
            break
    return math.fsum(parts)


def dirichlet_eta(s):
    r"""Dirichlet eta :math:`\eta(s) = (1-2^{1-s})\zeta(s)`, restricted to ``s > 1``."""
    s = float(s)
    if not math.isfinite(s) or s <= 1.0:
        raise DomainError(f"dirichlet_eta requires s > 1, got {s!r}")
    return -math.expm1((1.0 - s) * math.log(2.0)) * riemann_zeta(s)


def is_half_integer(nu):
    """True if ``nu`` is (exactly) an odd multiple of 1/2."""
    two_nu = 2.0 * nu
    return two_nu == math.floor(two_nu) and int(two_nu) % 2 == 1


def _check_order(nu):
    nu = float(nu)
    if not math.isfinite(nu) or nu < 0.0:
        raise DomainError(f"order must be finite and non-negative, got {nu!r}")
    if nu > MAX_ORDER:
        raise DomainError(f"order {nu!r} exceeds supported maximum {MAX_ORDER}")
    return nu


def _half_integer_ke(nu, x):
    # K_{k+1/2}(x) e^x = sqrt(pi/2x) sum_j (k+j)!/(j!(k-j)!) (2x)^{-j}
    k = int(nu - 0.5)
    coeffs = [math.factorial(k + j) / (math.factorial(j) * math.factorial(k - j))
              for j in range(k + 1)]
    u = 1.0 / (2.0 * x)
    acc = np.full_like(x, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * u + c
    return np.sqrt(math.pi / (2.0 * x)) * acc


# Taylor coefficients of 1/Gamma(1+z) about z = 0
_RGAMMA1 = [
    1.0,
    0.57721566490153286,
    -0.65587807152025388,
    -0.042002635034095236,
    0.16653861138229149,
    -0.042197734555544337,
    -0.0096219715278769736,
    0.0072189432466630995,
]


def _temme_gammas(mu):
    """Return (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))."""
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    if abs(mu) < 1e-3:
        m2 = mu * mu
        gam1 = -(_RGAMMA1[1] + m2 * (_RGAMMA1[3] + m2 * (_RGAMMA1[5] + m2 * _RGAMMA1[7])))
        gam2 = _RGAMMA1[0] + m2 * (_RGAMMA1[2] + m2 * (_RGAMMA1[4] + m2 * _RGAMMA1[6]))
    else:
        gam1 = (gammi - gampl) / (2.0 * mu)
        gam2 = 0.5 * (gammi + gampl)
    return gam1, gam2, gampl, gammi


def _temme(mu, x):
    """K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2 and 0 < x < 2 (unscaled)."""
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -np.log(x2)
    e = mu * d
    with np.errstate(invalid="ignore", divide="ignore"):
        fact2 = np.where(np.abs(e) < _EPS, 1.0, np.sinh(e) / np.where(e == 0.0, 1.0, e))
    ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * d)
    total = ff.copy()
    ee = np.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    c = np.ones_like(x)
    dd = x2 * x2
    total1 = p.copy()
    mu2 = mu * mu
    for i in range(1, 500):
        ff = (i * ff + p + q) / (i * i - mu2)
        c = c * (dd / i)
        p = p / (i - mu)
        q = q / (i + mu)
        delta = c * ff
        total = total + delta
        total1 = total1 + c * (p - i * ff)
        if np.all(np.abs(delta) < np.abs(total) * _EPS):
            break
    else:  # pragma: no cover - series converges in < 40 terms for x < 2
        raise ArithmeticError("Temme series failed to converge")
    return total, total1 * (2.0 / x)


def _steed_scaled(mu, x):
    """e^x K_mu(x) and e^x K_{mu+1}(x) for |mu| <= 1/2 and x >= 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25 - mu * mu
    q = np.full_like(x, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, 10000):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) < np.abs(s) * _EPS):
            break
    else:  # pragma: no cover
        raise ArithmeticError("CF2 failed to converge")
    h = a1 * h
    kmu = np.sqrt(math.pi / (2.0 * x)) / s
    k1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, k1


def _general_ke(nu, x):
    nl = int(nu + 0.5)
    mu = nu - nl
    kmu = np.empty_like(x)
    k1 = np.empty_like(x)
    small = x < 2.0
    if np.any(small):
        xs = x[small]
        a, b = _temme(mu, xs)
        scale = np.exp(xs)
        kmu[small] = a * scale
        k1[small] = b * scale
    if np.any(~small):
        a, b = _steed_scaled(mu, x[~small])
        kmu[~small] = a
        k1[~small] = b
    for i in range(1, nl + 1):
        kmu, k1 = k1, (mu + i) * (2.0 / x) * k1 + kmu
    return kmu


def _prepare(nu, x):
    nu = _check_order(nu)
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("bessel_k requires finite x > 0")
    return nu, arr


def _ke(nu, arr):
    flat = np.atleast_1d(arr).astype(float).ravel()
    if is_half_integer(nu):
        out = _half_integer_ke(nu, flat)
    else:
        out = _general_ke(nu, flat)
    return out.reshape(np.shape(arr))


def bessel_ke(nu, x):
    r"""Exponentially scaled :math:`e^{x} K_\nu(x)`; never underflows."""
    nu, arr = _prepare(nu, x)
    out = _ke(nu, arr)
    return float(out) if np.ndim(arr) == 0 else out


def bessel_k(nu, x):
    r"""Modified Bessel function of the second kind :math:`K_\nu(x)`.

    Parameters
    ----------
    nu : float
        order, ``0 <= nu <= 60``
    x : float or array_like
        positive argument

    Returns
    -------
    float or np.ndarray
        Past the underflow threshold of :math:`e^{-x}` the value is 0; use
        :func:`bessel_k_bounded` to get the accompanying absolute bound.
    """
    nu, arr = _prepare(nu, x)
    with np.errstate(under="ignore"):
        out = _ke(nu, arr) * np.exp(-arr)
    return float(out) if np.ndim(arr) == 0 else out


def bessel_k_bounded(nu, x):
    """Scalar :math:`K_\\nu(x)` with an absolute-error flag for underflow.

    Returns a ``BesselValue(value, abs_error, underflow)``. When
    :math:`e^{-x}` leaves the normal floating-point range the value is
    reported as ``0.0`` and ``abs_error`` bounds the true (positive) value.
    """
    nu, arr = _prepare(nu, x)
    if np.ndim(arr) != 0:
        raise DomainError("bessel_k_bounded takes a scalar argument")
    xv = float(arr)
    scaled = float(_ke(nu, arr))
    if xv < _UNDERFLOW_X:
        return BesselValue(scaled * math.exp(-xv), 0.0, False)
    log_bound = math.log(scaled) - xv
    bound = math.exp(log_bound) if log_bound > math.log(_TINY) else float(_TINY)
    return BesselValue(0.0, bound, True)
