r"""Optical (image-path) engine at zero temperature.

A closed path from a point back to itself between the plates is labelled by
an integer ``n`` and a parity. Even paths hit both plates equally often and
have length :math:`|2dn|`; odd paths hit one plate once more than the other
and have length :math:`|2x_N + 2dn|`. A path contributes
:math:`c_N\, l^{-(N+1)}` to the energy density, with
:math:`c_N = -\Gamma(\frac{N+1}{2}) / (2\pi^{(N+1)/2})`, times the product of
reflection factors (-1 at a Dirichlet plate, +1 at a Neumann plate).

The first plate (x_N = 0) is Dirichlet for DD and DN; the second is
Neumann for DN and NN.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .core import BoundaryPair
from .errors import CutoffError, DegeneratePathError, KernelDecayError, ValidationError

__all__ = [
    "Parity",
    "Path",
    "enumerate_paths",
    "path_sign",
    "path_length",
    "path_coefficient",
    "even_energy_per_area",
    "odd_energy_per_area",
    "odd_energy_d_independence_check",
    "TestKernel",
    "gaussian_kernel",
    "rational_kernel",
    "bump_kernel",
    "image_kernel_bc_check",
]

_EPS = float(np.finfo(float).eps)
_CHUNK = 1 << 20


class Parity(enum.Enum):
    EVEN = "Even"
    ODD = "Odd"


@dataclass(frozen=True)
class Path:
    index: int
    parity: Parity
    sigma_d: int
    sigma_n: int
    sign: int

    def __post_init__(self):
        if self.sigma_d < 0 or self.sigma_n < 0:
            raise ValidationError("reflection counts are non-negative")
        if abs(self.sigma_d - self.sigma_n) > 1:
            raise ValidationError("reflection counts differ by more than one")
        if (self.parity is Parity.EVEN) != (self.sigma_d == self.sigma_n):
            raise ValidationError("parity does not match the reflection counts")
        if self.sign not in (1, -1):
            raise ValidationError("sign must be +1 or -1")

    @property
    def reflections(self):
        return self.sigma_d + self.sigma_n


def _reflections(parity, n):
    """(hits on the first plate, hits on the second plate)."""
    if parity is Parity.EVEN:
        return abs(n), abs(n)
    # odd image sits at -y - 2 n d
    if n >= 0:
        return n + 1, n
    return -n - 1, -n


def path_sign(bc, parity, n):
    """Product of the reflection factors along the path."""
    first, second = BoundaryPair.parse(bc).plate_factors
    sd, sn = _reflections(parity, n)
    return (first ** sd) * (second ** sn)


def enumerate_paths(bc, n_max):
    """Even paths with 0 < |n| <= n_max and odd paths with |n| <= n_max."""
    if isinstance(n_max, bool) or int(n_max) != n_max or n_max < 1:
        raise ValidationError("n_max >= 1 required")
    bc = BoundaryPair.parse(bc)
    out = []
    for n in range(-n_max, n_max + 1):
        if n != 0:
            sd, sn = _reflections(Parity.EVEN, n)
            out.append(Path(n, Parity.EVEN, sd, sn, path_sign(bc, Parity.EVEN, n)))
    for n in range(-n_max, n_max + 1):
        sd, sn = _reflections(Parity.ODD, n)
        out.append(Path(n, Parity.ODD, sd, sn, path_sign(bc, Parity.ODD, n)))
    return out


def path_length(p, x_n, d):
    """Length of the closed path through a point at height ``x_n``."""
    if not 0.0 <= x_n <= d:
        raise ValidationError("0 <= x_n <= d required")
    if p.parity is Parity.EVEN:
        length = abs(2.0 * d * p.index)
    else:
        length = abs(2.0 * x_n + 2.0 * d * p.index)
    if length < 1e-12 * d:
        raise DegeneratePathError(f"path {p.parity.value} n={p.index} has zero length at x_n={x_n}")
    return length


def path_coefficient(n_dim):
    r""":math:`c_N = -\Gamma(\frac{N+1}{2}) / (2 \pi^{(N+1)/2})`."""
    return -specfun.gamma((n_dim + 1) / 2.0) / (2.0 * math.pi ** ((n_dim + 1) / 2.0))


def even_energy_per_area(cfg, bc, n_max):
    """Even-path energy per area truncated at ``|n| <= n_max``.

    Returns ``(value, tail_bound)``; the bound covers the discarded paths
    and the floating-point error of the finite sum.
    """
    if n_max < 8:
        raise ValidationError("n_max >= 8 required")
    bc = BoundaryPair.parse(bc)
    N, d = cfg.n_dim, cfg.separation
    c = path_coefficient(N)
    n = np.arange(1, n_max + 1, dtype=float)
    base = c * d * (2.0 * d * n) ** (-(N + 1))
    signs = np.array([path_sign(bc, Parity.EVEN, k) for k in (1, 2)], dtype=float)
    # sign depends on n only through its parity, and n, -n share it
    terms = 2.0 * np.where(n.astype(np.int64) % 2 == 1, signs[0], signs[1]) * base
    value = math.fsum(terms[::-1])
    tail = abs(c) * 2.0 * d * (2.0 * d) ** (-(N + 1)) * float(n_max) ** (-N) / N
    rounding = 8.0 * _EPS * float(np.abs(terms).sum())
    return value, tail + rounding


def _odd_interval(a, b, delta, N):
    # integral of u^{-(N+1)} over [max(a, delta), b], zero when b <= delta
    lo = np.maximum(a, delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (lo ** (-N) - b ** (-N)) / N
    return np.where(b > delta, val, 0.0)


def odd_energy_per_area(cfg, bc, delta, n_max):
    r"""Odd-path energy per area with cutoff ``delta`` on the path length.

    Computes :math:`\int_0^d dx \sum_{|n|\le n_{max}} s_n c_N |2x+2dn|^{-(N+1)}`
    restricted to lengths above ``delta``, interval by interval from the
    exact antiderivative. Returns ``(value, truncation_bound)``.
    """
    bc = BoundaryPair.parse(bc)
    N, d = cfg.n_dim, cfg.separation
    delta = float(delta)
    if not delta > 0.0:
        raise CutoffError("delta > 0 required")
    if delta >= 2.0 * d:
        raise CutoffError(f"cutoff {delta} removes more than the first image interval (2d = {2 * d})")
    if n_max < 1:
        raise ValidationError("n_max >= 1 required")
    c = path_coefficient(N)
    first, second = bc.plate_factors
    parts = []
    for start in range(-n_max, n_max + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, n_max + 1), dtype=np.int64)
        nf = n.astype(float)
        # u = 2x + 2dn sweeps [2dn, 2dn + 2d]; integrate in |u| (dx = du/2)
        a = np.where(n >= 0, 2.0 * d * nf, -2.0 * d * (nf + 1.0))
        b = np.where(n >= 0, 2.0 * d * (nf + 1.0), -2.0 * d * nf)
        sd = np.where(n >= 0, n + 1, -n - 1)
        sn = np.abs(n)
        sign = np.where(sd % 2 == 1, float(first), 1.0) * np.where(sn % 2 == 1, float(second), 1.0)
        parts.append(0.5 * c * sign * _odd_interval(a, b, delta, N))
    terms = np.concatenate(parts)
    value = math.fsum(terms)
    # discarded intervals lie beyond |u| = 2 d n_max on both sides
    trunc = abs(c) * (2.0 * d * n_max) ** (-N) / N + 8.0 * _EPS * float(np.abs(terms).sum())
    return value, trunc


def odd_energy_d_independence_check(cfg, bc, delta, d_pair, n_max):
    """``|I(d1) - I(d2)|`` for the cut-off odd-path energy at two separations."""
    d1, d2 = (float(v) for v in d_pair)
    if not delta < min(d1, d2) / 10.0:
        raise CutoffError("delta < min(d_pair) / 10 required")
    i1, _ = odd_energy_per_area(cfg.with_separation(d1), bc, delta, n_max)
    i2, _ = odd_energy_per_area(cfg.with_separation(d2), bc, delta, n_max)
    return abs(i1 - i2)


# ---------------------------------------------------------------- image b.c. checks

@dataclass(frozen=True)
class TestKernel:
    """Test kernel g(dt, rho, dz), even in dz.

    ``value`` and ``dz_derivative`` take scalar ``dt``, ``rho`` and an array
    ``dz``. ``envelope(dt, rho, r)`` bounds both |g| and |dg/dz| for all
    ``|dz| >= r``. ``decay_power`` is the algebraic decay rate in ``|dz|``
    (``inf`` for faster than any power).
    """

    __test__ = False  # not a pytest class

    name: str
    value: object
    dz_derivative: object
    envelope: object
    decay_power: float


def gaussian_kernel(width=0.3):
    s2 = width * width

    def value(dt, rho, dz):
        return np.exp(-(dt * dt + rho * rho + dz * dz) / (2.0 * s2))

    def deriv(dt, rho, dz):
        return -dz / s2 * value(dt, rho, dz)

    def envelope(dt, rho, r):
        return max(1.0, r / s2) * math.exp(-r * r / (2.0 * s2)) if r >= width else max(1.0, 1.0 / width)

    return TestKernel("gaussian", value, deriv, envelope, math.inf)


def rational_kernel(n_dim, core=0.2):
    """Massless-propagator shape ``(rho^2 + dz^2 - dt^2 + core^2)^{-(N-1)/2}``.

    Spacelike separations only; ``core`` softens the coincidence singularity.
    """
    p = 0.5 * (n_dim - 1)
    a2 = core * core

    def q(dt, rho, dz):
        return rho * rho + dz * dz - dt * dt + a2

    def value(dt, rho, dz):
        return q(dt, rho, dz) ** (-p)

    def deriv(dt, rho, dz):
        return -2.0 * p * dz * q(dt, rho, dz) ** (-p - 1.0)

    def envelope(dt, rho, r):
        base = r * r - dt * dt + a2
        if base <= 0.0:
            return math.inf
        # |dz| (dz^2 + c)^{-p-1} <= (dz^2 + c)^{-p-1/2}
        return max(base ** (-p), 2.0 * p * base ** (-p - 0.5))

    return TestKernel(f"rational(N={n_dim})", value, deriv, envelope, 2.0 * p)


def bump_kernel(radius=0.8):
    R2 = radius * radius

    def s2(dt, rho, dz):
        return (dt * dt + rho * rho + dz * dz) / R2

    def value(dt, rho, dz):
        t = np.asarray(s2(dt, rho, dz), dtype=float)
        out = np.zeros_like(t)
        inside = t < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - t[inside]))
        return out

    def deriv(dt, rho, dz):
        t = np.asarray(s2(dt, rho, dz), dtype=float)
        dz = np.broadcast_to(np.asarray(dz, dtype=float), t.shape)
        out = np.zeros_like(t)
        inside = t < 1.0
        ti = t[inside]
        out[inside] = -np.exp(-1.0 / (1.0 - ti)) / (1.0 - ti) ** 2 * 2.0 * dz[inside] / R2
        return out

    def envelope(dt, rho, r):
        # |g| <= e^{-1}, |g'| <= 2 / radius; both vanish outside the support
        return 0.0 if r >= radius else max(1.0, 2.0 / radius)

    return TestKernel("bump", value, deriv, envelope, math.inf)


def _image_sums(bc, kernel, dt, rho, x_n, y_n, d, n_max, derivative):
    n = np.arange(-n_max, n_max + 1)
    nf = n.astype(float)
    s_even = np.array([path_sign(bc, Parity.EVEN, int(k)) for k in n], dtype=float)
    s_odd = np.array([path_sign(bc, Parity.ODD, int(k)) for k in n], dtype=float)
    # direct term n = 0 enters unreflected
    s_even[n == 0] = 1.0
    f = kernel.dz_derivative if derivative else kernel.value
    even = s_even * f(dt, rho, x_n - y_n + 2.0 * nf * d)
    odd = s_odd * f(dt, rho, x_n + y_n + 2.0 * nf * d)
    terms = np.concatenate([even, odd])
    return math.fsum(terms), float(np.abs(terms).sum())


def image_kernel_bc_check(bc, kernel, x, n_max, *, y, d):
    r"""Boundary-condition violation of a truncated image sum.

    ``x`` and ``y`` are ``(t, x_perp, x_N)`` with ``x_perp`` a scalar offset
    along one transverse axis; only ``x[:2]`` of ``x`` enters, its normal
    coordinate is replaced by the plate positions. Dirichlet plates test
    :math:`|G|`, Neumann plates :math:`|\partial G/\partial x_N|`.

    Returns ``(violation, tail_bound)``.
    """
    bc = BoundaryPair.parse(bc)
    if n_max < 1:
        raise ValidationError("n_max >= 1 required")
    if not 0.0 < y[2] < d:
        raise ValidationError("source point must lie strictly inside the slab")
    if not kernel.decay_power > 0.0:
        raise KernelDecayError(f"kernel {kernel.name} does not decay; tail cannot be certified")
    dt = float(x[0]) - float(y[0])
    rho = abs(float(x[1]) - float(y[1]))
    first, second = bc.plate_factors
    worst, scale = 0.0, 0.0
    for plate, factor in ((0.0, first), (d, second)):
        val, mag = _image_sums(bc, kernel, dt, rho, plate, y[2], d, n_max, derivative=(factor == 1))
        worst = max(worst, abs(val))
        scale = max(scale, mag)
    # the image pairing is exact at x_N = 0; at x_N = d two end terms are unpaired
    env = kernel.envelope(dt, rho, 2.0 * d * n_max)
    if not math.isfinite(env):
        raise KernelDecayError(f"kernel {kernel.name}: no finite envelope at |dz| = {2 * d * n_max}")
    return worst, 2.0 * env + 16.0 * _EPS * scale
