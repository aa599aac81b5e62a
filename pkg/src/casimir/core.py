"""Domain types, unit conventions and report assembly.

Natural units hbar = c = k_B = 1 throughout. Extensive quantities are
reported per unit plate hyper-area, so an energy density in N spatial
dimensions carries units length^-N. Terms that do not depend on the
plate separation are dropped by every engine. Negative pressure means
attraction.
"""

import enum
import math
import os
from dataclasses import dataclass, field, asdict

from .errors import ValidationError

__all__ = [
    "BoundaryPair",
    "Engine",
    "PlateConfig",
    "ThermalState",
    "ClassicalScale",
    "SeriesControl",
    "ErrorBounds",
    "CasimirReport",
    "make_config",
    "classical_limit_ratio",
    "default_control",
    "REL_TOL_ENV",
]

REL_TOL_ENV = "CASIMIR_REL_TOL"


class BoundaryPair(enum.Enum):
    """Boundary conditions on the plates at x_N = 0 and x_N = d."""

    DD = "DD"
    DN = "DN"
    NN = "NN"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValidationError(f"unknown boundary pair {value!r}; expected dd, dn or nn") from None

    @property
    def plate_factors(self):
        """Reflection factor at the first and second plate (-1 Dirichlet, +1 Neumann)."""
        return {"DD": (-1, -1), "DN": (-1, 1), "NN": (1, 1)}[self.value]

    def require_finite_temperature_support(self):
        if self is BoundaryPair.NN:
            raise ValidationError("NN boundary conditions are supported at zero temperature only")


class Engine(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    MODE_SUM = "ModeSum"
    OPTICAL = "Optical"


@dataclass(frozen=True)
class PlateConfig:
    n_dim: int
    separation: float

    def __post_init__(self):
        if isinstance(self.n_dim, bool) or int(self.n_dim) != self.n_dim or self.n_dim < 1:
            raise ValidationError(f"n_dim ≥ 1 required (integer), got {self.n_dim!r}")
        object.__setattr__(self, "n_dim", int(self.n_dim))
        d = float(self.separation)
        if not math.isfinite(d) or d <= 0.0:
            raise ValidationError(f"separation > 0 and finite required, got {self.separation!r}")
        object.__setattr__(self, "separation", d)

    def with_separation(self, d):
        return PlateConfig(self.n_dim, d)


@dataclass(frozen=True)
class ThermalState:
    """Inverse temperature; ``beta = inf`` is zero temperature."""

    beta: float

    def __post_init__(self):
        b = float(self.beta)
        if math.isnan(b) or b <= 0.0:
            raise ValidationError(f"beta > 0 required, got {self.beta!r}")
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_temperature(cls, temperature):
        t = float(temperature)
        if not math.isfinite(t) or t < 0.0:
            raise ValidationError(f"temperature ≥ 0 required, got {temperature!r}")
        return cls(math.inf if t == 0.0 else 1.0 / t)

    @property
    def is_zero_temperature(self):
        return math.isinf(self.beta)

    @property
    def temperature(self):
        return 0.0 if self.is_zero_temperature else 1.0 / self.beta


@dataclass(frozen=True)
class ClassicalScale:
    """Geometry temperature scale T_c = pi / d."""

    t_c: float

    @classmethod
    def for_config(cls, cfg):
        return cls(math.pi / cfg.separation)


def _default_rel_tol():
    raw = os.environ.get(REL_TOL_ENV)
    if raw is None or raw.strip() == "":
        return 1e-10
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"{REL_TOL_ENV} is not a number: {raw!r}") from None


@dataclass(frozen=True)
class SeriesControl:
    """Tolerances and budgets for the series and the damping extrapolation.

    ``damping_ladder`` holds damping lengths in units of the plate
    separation (lambda / d), strictly decreasing. ``extrapolation_tol`` is
    the relative leave-one-out spread tolerated by the damping
    extrapolation; it is separate from ``rel_tol`` because extrapolation
    from a finite ladder cannot approach series precision.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_terms: int = 10**6
    damping_ladder: tuple = (0.1, 0.05, 0.025, 0.0125)
    extrapolation_tol: float = 1e-4

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            v = float(getattr(self, name))
            if not 0.0 < v < 1.0:
                raise ValidationError(f"{name} must lie in (0, 1), got {v!r}")
            object.__setattr__(self, name, v)
        if isinstance(self.max_terms, bool) or int(self.max_terms) != self.max_terms or self.max_terms < 16:
            raise ValidationError(f"max_terms ≥ 16 required, got {self.max_terms!r}")
        object.__setattr__(self, "max_terms", int(self.max_terms))
        ladder = tuple(float(v) for v in self.damping_ladder)
        if any(not (v > 0.0 and math.isfinite(v)) for v in ladder):
            raise ValidationError("damping_ladder entries must be positive")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValidationError("damping_ladder must be strictly decreasing")
        object.__setattr__(self, "damping_ladder", ladder)
        if not 0.0 < float(self.extrapolation_tol) < 1.0:
            raise ValidationError("extrapolation_tol must lie in (0, 1)")

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return SeriesControl(**values)


def default_control():
    """Built-in defaults, with ``CASIMIR_REL_TOL`` overriding ``rel_tol``."""
    return SeriesControl(rel_tol=_default_rel_tol())


@dataclass(frozen=True)
class ErrorBounds:
    energy: float = 0.0
    free_energy: float = 0.0
    entropy: float = 0.0
    pressure: float = 0.0


@dataclass(frozen=True)
class CasimirReport:
    """Per-area Casimir observables at one (N, d, T, bc) point."""

    engine: Engine
    n_dim: int
    bc: BoundaryPair
    d: float
    T: float
    energy_per_area: float
    free_energy_per_area: float
    entropy_per_area: float
    pressure: float
    error_bounds: ErrorBounds = field(default_factory=ErrorBounds)
    classical_ratio: float = 0.0

    @property
    def beta(self):
        return math.inf if self.T == 0.0 else 1.0 / self.T

    def entropy_identity_residual(self):
        """|S - beta (E - F)| minus the combined error budget (<= 0 when consistent)."""
        if self.T == 0.0:
            return 0.0
        b = self.beta
        resid = abs(self.entropy_per_area - b * (self.energy_per_area - self.free_energy_per_area))
        budget = self.error_bounds.entropy + b * (self.error_bounds.energy + self.error_bounds.free_energy)
        return resid - budget

    def to_dict(self):
        """Plain mapping with the serialized field names, in output order."""
        out = asdict(self)
        out["engine"] = self.engine.value
        out["bc"] = self.bc.value
        return out

    @classmethod
    def from_dict(cls, data):
        eb = data["error_bounds"]
        return cls(
            engine=Engine(data["engine"]),
            n_dim=int(data["n_dim"]),
            bc=BoundaryPair.parse(data["bc"]),
            d=float(data["d"]),
            T=float(data["T"]),
            energy_per_area=float(data["energy_per_area"]),
            free_energy_per_area=float(data["free_energy_per_area"]),
            entropy_per_area=float(data["entropy_per_area"]),
            pressure=float(data["pressure"]),
            error_bounds=ErrorBounds(**{k: float(eb[k]) for k in ("energy", "free_energy", "entropy", "pressure")}),
            classical_ratio=float(data["classical_ratio"]),
        )


def make_config(n_dim, separation, beta):
    """Validate and bundle geometry, temperature and classical scale."""
    cfg = PlateConfig(n_dim, separation)
    state = ThermalState(beta)
    return cfg, state, ClassicalScale.for_config(cfg)


def classical_limit_ratio(state, scale):
    """T / T_c; zero at zero temperature."""
    if state.is_zero_temperature:
        return 0.0
    return 1.0 / (state.beta * scale.t_c)
