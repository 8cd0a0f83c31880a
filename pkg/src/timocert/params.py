"""Space-varying beam parameters and the field calculus used downstream.

A :class:`ParameterField` is a scalar function on ``[0, L]``. Three
representations are supported (constant, sinusoid, tabulated); anything else
has to be tabulated first. Essential extrema are taken on a dense uniform
grid (``N_GRID = 4096`` points by default) and then polished locally with a
bounded scalar minimisation to an abscissa tolerance of ``1e-10``. Sinusoids
that contain a full period in ``[0, L]`` use the closed form ``base +/- |amplitude|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np
from scipy.optimize import minimize_scalar

N_GRID = 4096
REFINE_XTOL = 1e-10

FIELD_NAMES = ("rho", "i_rho", "k_shear", "ei", "gamma", "delta")


class DomainError(ValueError):
    """Evaluation point outside ``[0, L]``."""


def _check_domain(xi, length: float) -> np.ndarray:
    x = np.asarray(xi, dtype=float)
    slack = 1e-12 * max(length, 1.0)
    if np.any(x < -slack) or np.any(x > length + slack):
        raise DomainError(f"xi outside [0, {length}]")
    return np.clip(x, 0.0, length)


def refined_min(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, y: np.ndarray,
                refine: bool = True) -> float:
    """Minimum of ``fn`` given its samples ``y`` on the uniform grid ``x``.

    The grid minimiser is polished inside its two neighbouring cells with a
    bounded Brent search; the result is never above the grid minimum.
    """
    k = int(np.argmin(y))
    best = float(y[k])
    if not refine or len(x) < 3:
        return best
    a, b = x[max(k - 1, 0)], x[min(k + 1, len(x) - 1)]
    res = minimize_scalar(lambda s: float(np.asarray(fn(np.array([s])))[0]),
                          bounds=(a, b), method="bounded",
                          options={"xatol": REFINE_XTOL})
    return min(best, float(res.fun))


def grid_extrema(fn: Callable[[np.ndarray], np.ndarray], length: float,
                 n_grid: int = N_GRID, refine: bool = True) -> tuple[float, float]:
    """Return ``(inf, sup)`` of a vectorised ``fn`` on ``[0, length]``."""
    x = np.linspace(0.0, length, n_grid)
    y = np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape)
    lo = refined_min(fn, x, y, refine)
    hi = -refined_min(lambda s: -np.asarray(fn(s)), x, -y, refine)
    return lo, hi


class ParameterField:
    """Scalar field on ``[0, length]``; subclasses implement ``_values``."""

    length: float

    def __call__(self, xi):
        """Evaluate at ``xi`` (scalar or array); raises :class:`DomainError` off the domain."""
        x = _check_domain(xi, self.length)
        out = self._values(x)
        return float(out) if np.ndim(out) == 0 else out

    def _values(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self) -> "ParameterField":
        raise NotImplementedError

    def reflected(self) -> "ParameterField":
        """The field ``xi -> f(L - xi)``."""
        raise NotImplementedError

    def extrema(self, n_grid: int = N_GRID) -> tuple[float, float]:
        return grid_extrema(self._values, self.length, n_grid)

    def ess_sup(self, n_grid: int = N_GRID) -> float:
        return self.extrema(n_grid)[1]

    def ess_inf(self, n_grid: int = N_GRID) -> float:
        return self.extrema(n_grid)[0]

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(ParameterField):
    value: float
    length: float = 1.0

    def __post_init__(self):
        _check_length(self.length)
        if not math.isfinite(self.value):
            raise ValueError("constant value must be finite")

    def _values(self, x):
        return np.full_like(x, self.value, dtype=float)

    def derivative(self):
        return Constant(0.0, self.length)

    def reflected(self):
        return self

    def extrema(self, n_grid=N_GRID):
        return float(self.value), float(self.value)

    def to_dict(self):
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True)
class Sinusoid(ParameterField):
    """``base + amplitude * sin(frequency * xi + phase)``."""

    base: float
    amplitude: float
    frequency: float
    phase: float = 0.0
    length: float = 1.0

    def __post_init__(self):
        _check_length(self.length)
        if not all(map(math.isfinite, (self.base, self.amplitude, self.frequency, self.phase))):
            raise ValueError("sinusoid coefficients must be finite")

    def _values(self, x):
        return self.base + self.amplitude * np.sin(self.frequency * x + self.phase)

    def derivative(self):
        # d/dx a sin(wx + p) = a w sin(wx + p + pi/2)
        return Sinusoid(0.0, self.amplitude * self.frequency, self.frequency,
                        self.phase + math.pi / 2, self.length)

    def reflected(self):
        return Sinusoid(self.base, self.amplitude, -self.frequency,
                        self.frequency * self.length + self.phase, self.length)

    def extrema(self, n_grid=N_GRID):
        a = abs(self.amplitude)
        if a == 0.0 or self.frequency == 0.0:
            v = self.base + self.amplitude * math.sin(self.phase)
            return v, v
        if abs(self.frequency) * self.length >= 2 * math.pi:
            return self.base - a, self.base + a
        return grid_extrema(self._values, self.length, n_grid)

    def to_dict(self):
        return {"kind": "sinusoid", "base": self.base, "amplitude": self.amplitude,
                "frequency": self.frequency, "phase": self.phase}


@dataclass(frozen=True)
class Tabulated(ParameterField):
    """Piecewise-linear interpolant of samples on a uniform grid over ``[0, length]``."""

    values: tuple[float, ...]
    length: float = 1.0

    def __post_init__(self):
        _check_length(self.length)
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 2:
            raise ValueError("tabulated field needs at least 2 samples")
        if not all(map(math.isfinite, vals)):
            raise ValueError("tabulated samples must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.length, len(self.values))

    def _values(self, x):
        return np.interp(x, self.nodes, np.asarray(self.values))

    def derivative(self):
        v = np.asarray(self.values)
        h = self.length / (len(v) - 1)
        return Tabulated(tuple(np.gradient(v, h)), self.length)

    def reflected(self):
        return Tabulated(self.values[::-1], self.length)

    def extrema(self, n_grid=N_GRID):
        return float(min(self.values)), float(max(self.values))

    def to_dict(self):
        return {"kind": "tabulated", "values": list(self.values)}


def _check_length(length: float) -> None:
    if not (math.isfinite(length) and length > 0):
        raise ValueError(f"beam length must be positive, got {length}")


@dataclass(frozen=True)
class BeamParameters:
    rho: ParameterField
    i_rho: ParameterField
    k_shear: ParameterField
    ei: ParameterField
    gamma: ParameterField
    delta: ParameterField
    length: float = 1.0

    def fields(self) -> Iterator[tuple[str, ParameterField]]:
        for name in FIELD_NAMES:
            yield name, getattr(self, name)

    def reflected(self) -> "BeamParameters":
        """Parameters seen from the other end, ``xi -> L - xi``."""
        return BeamParameters(**{n: f.reflected() for n, f in self.fields()}, length=self.length)

    @property
    def is_constant(self) -> bool:
        return all(isinstance(f, Constant) for _, f in self.fields())


@dataclass
class ValidationReport:
    margins: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures

    @property
    def min_margin(self) -> float:
        return min(self.margins.values()) if self.margins else float("nan")


def validate(params: BeamParameters, n_grid: int = N_GRID) -> ValidationReport:
    """Check positivity (via ``ess_inf``) and length consistency of every field.

    Never raises on bad parameters; problems are collected in ``failures``.
    """
    report = ValidationReport()
    try:
        _check_length(params.length)
    except ValueError as exc:
        report.failures.append(str(exc))
    for name, f in params.fields():
        if not isinstance(f, ParameterField):
            report.failures.append(f"{name}: not a parameter field")
            continue
        if abs(f.length - params.length) > 1e-12 * params.length:
            report.failures.append(f"{name}: length {f.length} != beam length {params.length}")
        if isinstance(f, Sinusoid) and abs(f.amplitude) >= f.base:
            report.failures.append(f"{name}: amplitude {f.amplitude} >= base {f.base}, field not positive definite")
        try:
            margin = f.ess_inf(n_grid)
        except Exception as exc:  # pragma: no cover - defensive
            report.failures.append(f"{name}: {exc}")
            continue
        report.margins[name] = margin
        if not margin > 0:
            report.failures.append(f"{name}: ess_inf = {margin:.6g} <= 0, field not positive definite")
    return report


def evaluate(f: ParameterField, xi):
    return f(xi)


def derivative(f: ParameterField) -> ParameterField:
    return f.derivative()


def ess_sup(f: ParameterField, n_grid: int = N_GRID) -> float:
    return f.ess_sup(n_grid)


def ess_inf(f: ParameterField, n_grid: int = N_GRID) -> float:
    return f.ess_inf(n_grid)


# -- example beam --------------------------------------------------------------

EXAMPLE_PHASES = {
    "rho": math.pi / 4,
    "i_rho": 3 * math.pi / 4,
    "k_shear": math.pi / 6,
    "ei": 2 * math.pi / 3,
    "gamma": 0.0,
    "delta": math.pi / 2,
}


def example_beam() -> BeamParameters:
    """All six fields ``0.4 + 0.01 sin(2 pi xi + phase)`` on a unit beam."""
    return BeamParameters(
        **{n: Sinusoid(0.4, 0.01, 2 * math.pi, p, 1.0) for n, p in EXAMPLE_PHASES.items()},
        length=1.0,
    )


def constant_beam(value: float = 1.0, length: float = 1.0, **overrides: float) -> BeamParameters:
    vals = {n: value for n in FIELD_NAMES}
    vals.update(overrides)
    return BeamParameters(**{n: Constant(v, length) for n, v in vals.items()}, length=length)
