"""Lyapunov decay certificate for the damped Timoshenko beam.

The Lyapunov functional is ``V = n0 E + n1 F1 + n2 F2`` with the energy ``E``
and the cross terms

    F1 = int z1(xi) int_0^xi K z3 ds dxi,   F2 = int z2(xi) int_0^xi EI z4 ds dxi.

For weights ``(n0, n1, n2, alpha1, alpha2, alpha3)`` the certificate collects

* ``k1 = (2L/pi)^2 sup K`` and ``k2 = (2L/pi)^2 sup EI``,
* ``kappa1``, the lower quadratic bound ``V >= kappa1 ||z||^2``,
* ``eta``, the upper bound ``V <= eta E``,
* the essential infima of the six dissipation coefficients ``c1 .. c6``,
* ``beta = min(inf c1 .. inf c4)`` and the decay rate ``kappa2 = beta / eta``,

so that ``||z(t)|| <= sqrt(V(z0) / kappa1) exp(-kappa2 t / 2)``.

Two gates are supported. ``"strict"`` requires every ``c_i`` positive.
``"relaxed"`` drops ``c1`` from both the feasibility test and the rate
(``beta_prime = min(inf c2, inf c3, inf c4)``); with the reference Example
weights ``inf c1`` is negative while ``c2 .. c4`` are positive, so only the
relaxed gate reproduces the reference rate. Both values are always reported.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson

from .params import N_GRID, BeamParameters, refined_min

GATES = ("relaxed", "strict")
N_QUAD = 2048


@dataclass(frozen=True)
class LyapunovWeights:
    """Combination weights ``n0, n1, n2`` and Young splitting parameters ``alpha1..3``.

    The ``n_i`` may be zero (the degenerate limits are useful for testing);
    the ``alpha_i`` divide, so they must be strictly positive.
    """

    n0: float
    n1: float
    n2: float
    alpha1: float
    alpha2: float
    alpha3: float

    def __post_init__(self):
        for name, v in asdict(self).items():
            if not math.isfinite(v):
                raise ValueError(f"weight {name} must be finite")
        if min(self.n0, self.n1, self.n2) < 0:
            raise ValueError("n0, n1, n2 must be non-negative")
        if min(self.alpha1, self.alpha2, self.alpha3) <= 0:
            raise ValueError("alpha1, alpha2, alpha3 must be positive")

    @property
    def strictly_positive(self) -> bool:
        return min(self.as_tuple()) > 0

    def as_tuple(self) -> tuple[float, ...]:
        return (self.n0, self.n1, self.n2, self.alpha1, self.alpha2, self.alpha3)

    @classmethod
    def from_sequence(cls, seq) -> "LyapunovWeights":
        return cls(*map(float, seq))

    def scaled(self, t: float) -> "LyapunovWeights":
        """Scale ``n0, n1, n2`` by ``t``; alphas are untouched."""
        return replace(self, n0=t * self.n0, n1=t * self.n1, n2=t * self.n2)

    def to_dict(self) -> dict:
        return asdict(self)


EXAMPLE_WEIGHTS = LyapunovWeights(37.0, 67.0, 39.0, 5.0, 1.0, 6.0)


@dataclass(frozen=True)
class Certificate:
    k1: float
    k2: float
    kappa1: float
    eta: float
    c_essinf: tuple[float, float, float, float, float, float]
    beta: float
    beta_prime: float
    kappa2: float
    feasible: bool
    gate: str
    feasible_strict: bool
    margins: dict = field(default_factory=dict)
    variant: str = "general"

    @property
    def kappa2_strict(self) -> float:
        return self.beta / self.eta

    @property
    def kappa2_relaxed(self) -> float:
        return self.beta_prime / self.eta

    @property
    def blocking(self) -> list[str]:
        """Names of the constraints (gated) that are not strictly positive."""
        keys = ["kappa1"] + [f"c{i}" for i in range(1, 7)]
        if self.gate == "relaxed":
            keys.remove("c1")
        return [k for k in keys if not self.margins[k] > 0]

    def to_dict(self) -> dict:
        return {
            "k1": self.k1,
            "k2": self.k2,
            "kappa1": self.kappa1,
            "eta": self.eta,
            "c_essinf": list(self.c_essinf),
            "beta": self.beta,
            "beta_prime": self.beta_prime,
            "kappa2": self.kappa2,
            "kappa2_strict": self.kappa2_strict,
            "feasible": self.feasible,
            "feasible_strict": self.feasible_strict,
            "gate": self.gate,
            "variant": self.variant,
            "margins": dict(self.margins),
        }


# -- inequality helpers ---------------------------------------------------------

def wirtinger_constant(length: float) -> float:
    """``(2L/pi)^2``: ``int f^2 <= (2L/pi)^2 int f'^2`` whenever ``f(0) = 0``."""
    return (2.0 * length / math.pi) ** 2


def young_bound(f, g, alpha: float):
    """Right-hand side of ``f g <= |f|^2 / (2 alpha) + alpha |g|^2 / 2``."""
    return np.abs(f) ** 2 / (2 * alpha) + alpha * np.abs(g) ** 2 / 2


def wirtinger_constants(params: BeamParameters, n_grid: int = N_GRID) -> tuple[float, float]:
    w = wirtinger_constant(params.length)
    return w * params.k_shear.ess_sup(n_grid), w * params.ei.ess_sup(n_grid)


def _bound_terms(weights: LyapunovWeights, length: float, sup: dict):
    """``(k1, k2, (a1..a4), (b1..b4))`` from the essential suprema ``sup``."""
    n0, n1, n2 = weights.n0, weights.n1, weights.n2
    wc = wirtinger_constant(length)
    k1, k2 = wc * sup["k_shear"], wc * sup["ei"]
    rs, irs = sup["rho"], sup["i_rho"]
    lower = (n0 / 2 - n1 * rs / 2, n0 / 2 - n2 * irs / 2, n0 / 2 - n1 * k1 / 2, n0 / 2 - n2 * k2 / 2)
    upper = (n0 + n1 * rs, n0 + n2 * irs, n0 + n1 * k1, n0 + n2 * k2)
    return k1, k2, lower, upper


def _sups(params: BeamParameters, n_grid: int) -> dict:
    return {n: f.ess_sup(n_grid) for n, f in params.fields()}


def kappa1(weights: LyapunovWeights, params: BeamParameters, n_grid: int = N_GRID) -> float:
    """Lower bound ``V(z) >= kappa1 ||z||_Z^2``; may come out non-positive."""
    return min(_bound_terms(weights, params.length, _sups(params, n_grid))[2])


def eta(weights: LyapunovWeights, params: BeamParameters, n_grid: int = N_GRID) -> float:
    """Upper bound ``V(z) <= eta E(z)``."""
    return max(_bound_terms(weights, params.length, _sups(params, n_grid))[3])


# -- dissipation coefficients --------------------------------------------------

def _field_values(params: BeamParameters, x: np.ndarray) -> dict[str, np.ndarray]:
    vals = {name: f._values(x) for name, f in params.fields()}
    vals["k_d"] = params.k_shear.derivative()._values(x)
    vals["ei_d"] = params.ei.derivative()._values(x)
    return vals


def _coefficients(w: LyapunovWeights, v: dict, length: float, constant: bool = False):
    """Interior coefficients ``c1 .. c4`` from field values ``v``.

    ``constant=True`` gives the closed forms for constant parameters, which
    differ in ``c2`` (``3/2 n2 EI`` replaces ``n2 EI + n2 I_rho / 2``),
    in ``c3`` (``n1 K / alpha1`` replaces ``n1 K / (2 alpha1)``), and drop the
    derivative terms.
    """
    n0, n1, n2, a1, a2, a3 = w.as_tuple()
    rho, irho, k, ei, g, d = v["rho"], v["i_rho"], v["k_shear"], v["ei"], v["gamma"], v["delta"]
    s = 2 * length / math.pi
    c1 = n0 * g / rho**2 - n1 * a1 * g**2 / (2 * rho) - n1 * k - n1 * rho
    c2 = (n0 * d / irho**2 - n1 / (2 * irho) * (s * k) ** 2 - n2 * a3 * d**2 / (2 * irho))
    if constant:
        c2 = c2 - 1.5 * n2 * ei
        c3 = n1 * k / 2 - n1 * k / a1 * s**2 - n2 * a2 * k / 2
    else:
        c1 = c1 - n1 / (2 * rho) * (s * v["k_d"]) ** 2
        c2 = c2 - n2 * ei - n2 * irho / 2 - n2 / (2 * irho) * (s * v["ei_d"]) ** 2
        c3 = n1 * k / 2 - n1 * k / (2 * a1) * s**2 - n2 * a2 * k / 2
    c4 = n2 * ei / 2 - n2 * ei * (2 * length) ** 2 / (2 * a2 * math.pi**2) \
        - n2 * ei * (2 * length) ** 2 / (2 * a3 * math.pi**2)
    return c1, c2, c3, c4


def _boundary_coefficients(w: LyapunovWeights, params: BeamParameters) -> tuple[float, float]:
    L = params.length
    gL, dL = params.gamma(L), params.delta(L)
    return (w.n0 * gL - L * w.n1 * gL**2 / 2,
            w.n0 * dL - L * w.n2 * dL**2 / 2)


@dataclass(frozen=True)
class CoefficientFields:
    """Pointwise-evaluable ``c1 .. c4`` plus the boundary scalars ``c5, c6``."""

    weights: LyapunovWeights
    params: BeamParameters
    constant: bool = False

    def __call__(self, xi) -> tuple[np.ndarray, ...]:
        x = np.atleast_1d(np.asarray(xi, dtype=float))
        return _coefficients(self.weights, _field_values(self.params, x),
                             self.params.length, self.constant)

    def c(self, i: int):
        """Profile ``xi -> c_i(xi)`` for ``i`` in 1..4, or the scalar for 5, 6."""
        if i in (5, 6):
            return _boundary_coefficients(self.weights, self.params)[i - 5]
        return lambda xi: self(xi)[i - 1]

    @property
    def c5(self) -> float:
        return self.c(5)

    @property
    def c6(self) -> float:
        return self.c(6)


def coefficient_fields(weights: LyapunovWeights, params: BeamParameters) -> CoefficientFields:
    return CoefficientFields(weights, params)


class Certifier:
    """Certificate evaluator for one beam.

    Field samples on the ``n_grid`` grid are cached, so repeated calls with
    different weights (the weight search) only redo a few vector operations.
    With ``refine=False`` the infima are plain grid minima.
    """

    def __init__(self, params: BeamParameters, n_grid: int = N_GRID, refine: bool = True,
                 constant: bool = False):
        if constant and not params.is_constant:
            raise ValueError("constant-coefficient certificate needs Constant fields")
        self.params = params
        self.n_grid = n_grid
        self.refine = refine
        self.constant = constant
        self.x = np.linspace(0.0, params.length, n_grid)
        self._vals = _field_values(params, self.x)
        self._sup = _sups(params, n_grid)

    def c_essinf(self, w: LyapunovWeights) -> tuple[float, ...]:
        grid = _coefficients(w, self._vals, self.params.length, self.constant)
        fields = CoefficientFields(w, self.params, self.constant)
        infs = []
        for i, y in enumerate(grid, start=1):
            y = np.broadcast_to(y, self.x.shape)
            if self.constant:
                infs.append(float(y[0]))
            else:
                infs.append(refined_min(fields.c(i), self.x, y, self.refine))
        return tuple(infs) + _boundary_coefficients(w, self.params)

    def __call__(self, weights: LyapunovWeights, gate: str = "relaxed") -> Certificate:
        if gate not in GATES:
            raise ValueError(f"gate must be one of {GATES}, got {gate!r}")
        k1, k2, lower, upper = _bound_terms(weights, self.params.length, self._sup)
        kap1, et = min(lower), max(upper)
        c = self.c_essinf(weights)
        beta = min(c[:4])
        beta_prime = min(c[1:4])
        margins = {"kappa1": kap1, **{f"c{i}": c[i - 1] for i in range(1, 7)}}
        feasible_strict = kap1 > 0 and all(ci > 0 for ci in c)
        feasible_relaxed = kap1 > 0 and all(ci > 0 for ci in c[1:])
        strict = gate == "strict"
        return Certificate(
            k1=k1, k2=k2, kappa1=kap1, eta=et, c_essinf=c,
            beta=beta, beta_prime=beta_prime,
            kappa2=(beta if strict else beta_prime) / et,
            feasible=feasible_strict if strict else feasible_relaxed,
            gate=gate, feasible_strict=feasible_strict, margins=margins,
            variant="constant" if self.constant else "general",
        )


def certify(weights: LyapunovWeights, params: BeamParameters, gate: str = "relaxed",
            n_grid: int = N_GRID) -> Certificate:
    """Assemble the full certificate. Infeasibility is reported, never raised."""
    return Certifier(params, n_grid)(weights, gate)


def certify_constant(weights: LyapunovWeights, params: BeamParameters,
                     gate: str = "relaxed") -> Certificate:
    """Certificate from the constant-parameter closed forms.

    Raises ``ValueError`` unless every field is :class:`~timocert.params.Constant`.
    """
    return Certifier(params, n_grid=2, constant=True)(weights, gate)


SHARED_COEFFICIENTS = ("c1", "c4", "c5", "c6")


def compare_variants(weights: LyapunovWeights, params: BeamParameters, gate: str = "relaxed"):
    """General vs constant-coefficient certificates on constant fields.

    Returns ``(general, constant, diffs)`` where ``diffs`` maps every margin to
    its absolute difference. Only ``c1, c4, c5, c6`` (and the bounds ``k1, k2,
    kappa1, eta``) are expected to agree; ``c2`` agrees only when
    ``I_rho == EI`` and ``c3`` never does for ``n1 > 0``.
    """
    general = certify(weights, params, gate)
    const = certify_constant(weights, params, gate)
    diffs = {k: abs(general.margins[k] - const.margins[k]) for k in general.margins}
    for k in ("k1", "k2", "eta"):
        diffs[k] = abs(getattr(general, k) - getattr(const, k))
    return general, const, diffs


# -- state functionals ---------------------------------------------------------

@dataclass(frozen=True)
class StateFunction:
    """Energy variables ``z1..z4`` sampled on a uniform grid over ``[0, L]``.

    ``z`` has shape ``(..., 4, n)``; leading axes are a batch of states.
    """

    xi: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        xi = np.asarray(self.xi, dtype=float)
        if z.ndim < 2 or z.shape[-2] != 4:
            raise ValueError(f"state must have shape (..., 4, n), got {z.shape}")
        if z.shape[-1] != xi.shape[-1]:
            raise ValueError(f"grid mismatch: {xi.shape[-1]} nodes vs {z.shape[-1]} samples")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def from_functions(cls, funcs, length: float, n: int = N_QUAD) -> "StateFunction":
        xi = np.linspace(0.0, length, n)
        return cls(xi, np.stack([np.broadcast_to(f(xi), xi.shape) for f in funcs]))


def _integrate(y, xi):
    return simpson(y, x=xi, axis=-1)


def _energy_density(state: StateFunction, params: BeamParameters):
    v = {name: f._values(state.xi) for name, f in params.fields()}
    z1, z2, z3, z4 = (state.z[..., i, :] for i in range(4))
    return z1**2 / v["rho"] + z2**2 / v["i_rho"] + v["k_shear"] * z3**2 + v["ei"] * z4**2


def energy(state: StateFunction, params: BeamParameters):
    """``E = 1/2 int (z1^2/rho + z2^2/I_rho + K z3^2 + EI z4^2)``."""
    return 0.5 * _integrate(_energy_density(state, params), state.xi)


def norm_squared(state: StateFunction, params: BeamParameters):
    return 2.0 * energy(state, params)


def cross_terms(state: StateFunction, params: BeamParameters):
    """``(F1, F2)``; inner integrals by cumulative trapezoid on the same grid."""
    xi = state.xi
    k = params.k_shear._values(xi)
    ei = params.ei._values(xi)
    inner1 = cumulative_trapezoid(k * state.z[..., 2, :], x=xi, axis=-1, initial=0.0)
    inner2 = cumulative_trapezoid(ei * state.z[..., 3, :], x=xi, axis=-1, initial=0.0)
    return (_integrate(state.z[..., 0, :] * inner1, xi),
            _integrate(state.z[..., 1, :] * inner2, xi))


def lyapunov_value(state: StateFunction, weights: LyapunovWeights, params: BeamParameters):
    f1, f2 = cross_terms(state, params)
    return weights.n0 * energy(state, params) + weights.n1 * f1 + weights.n2 * f2


def beam_inequality_sides(coef, z: np.ndarray, xi: np.ndarray) -> tuple[float, float]:
    """``(int (int_0^xi c z)^2, int c z^2)`` for a coefficient sample ``coef``.

    With ``coef = K`` the first value is bounded by ``k1`` times the second.
    """
    inner = cumulative_trapezoid(coef * z, x=xi, initial=0.0)
    return float(_integrate(inner**2, xi)), float(_integrate(coef * z**2, xi))
