"""Time integration of the discrete beam and the exponential-bound check."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .certificate import N_QUAD, Certificate, LyapunovWeights, StateFunction, lyapunov_value
from .discretize import DiscreteSystem, discrete_energy

log = logging.getLogger(__name__)

BOUND_RTOL = 1e-6
# state sign pattern in the reflected frame used for interchanged boundary conditions
_REFLECT_SIGNS = (1.0, -1.0, -1.0, 1.0)


@dataclass(frozen=True)
class Profile:
    """One component of an initial condition.

    ``zero``: identically 0. ``cosine``: ``scale * (1 - cos(2 pi xi / L))``.
    ``tabulated``: piecewise-linear through ``values`` on a uniform grid.
    """

    kind: str = "zero"
    scale: float = 1.0
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("zero", "cosine", "tabulated"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == "tabulated" and len(self.values) < 2:
            raise ValueError("tabulated profile needs at least 2 values")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __call__(self, xi, length: float):
        xi = np.asarray(xi, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(xi)
        if self.kind == "cosine":
            return self.scale * (1.0 - np.cos(2 * np.pi * xi / length))
        return np.interp(xi, np.linspace(0.0, length, len(self.values)), self.values)

    def to_dict(self) -> dict:
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "cosine":
            return {"kind": "cosine", "scale": self.scale}
        return {"kind": "tabulated", "values": list(self.values)}


@dataclass(frozen=True)
class InitialCondition:
    z1: Profile = Profile()
    z2: Profile = Profile()
    z3: Profile = Profile()
    z4: Profile = Profile()

    def components(self) -> tuple[Profile, ...]:
        return (self.z1, self.z2, self.z3, self.z4)


EXAMPLE_IC = InitialCondition(z3=Profile("cosine", 0.5), z4=Profile("cosine", 1.0))


def sample_initial_condition(ic: InitialCondition, system: DiscreteSystem) -> np.ndarray:
    """Evaluate ``ic`` at the staggered unknown locations of ``system``."""
    L = system.length
    locs = (system.cell_centers, system.cell_centers, system.nodes, system.nodes)
    parts = []
    for prof, x, sign in zip(ic.components(), locs, _REFLECT_SIGNS):
        if system.interchanged:
            parts.append(sign * prof(L - x, L))
        else:
            parts.append(prof(x, L))
    return np.concatenate(parts)


def reconstruction_matrices(system: DiscreteSystem, n_quad: int = N_QUAD):
    """Linear maps from discrete unknowns to samples on a uniform quadrature grid.

    Momenta are interpolated through the clamped value 0 at ``xi = 0`` and
    held constant beyond the last cell centre; strains are held constant
    beyond the last node.
    """
    L, N = system.length, system.n_elements
    xi = np.linspace(0.0, L, n_quad)
    eye = np.eye(N)

    def interp_matrix(x_data, pad_left_zero):
        cols = []
        for k in range(N):
            y = eye[k]
            xd = x_data
            if pad_left_zero:
                xd, y = np.concatenate([[0.0], xd]), np.concatenate([[0.0], y])
            cols.append(np.interp(xi, xd, y))
        return np.stack(cols)  # (N, n_quad)

    return xi, interp_matrix(system.cell_centers, True), interp_matrix(system.nodes, False)


def to_state_function(system: DiscreteSystem, z, n_quad: int = N_QUAD, _maps=None) -> StateFunction:
    """Grid functions for the discrete state(s) ``z`` of shape ``(..., 4N)``."""
    xi, pm, ps = _maps if _maps is not None else reconstruction_matrices(system, n_quad)
    z1, z2, z3, z4 = system.blocks(z)
    return StateFunction(xi, np.stack([z1 @ pm, z2 @ pm, z3 @ ps, z4 @ ps], axis=-2))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    norm: np.ndarray
    energy: np.ndarray
    lyapunov: np.ndarray | None = None
    bound: np.ndarray | None = None

    @property
    def ratio(self) -> np.ndarray | None:
        if self.bound is None:
            return None
        return _ratio(self.norm, self.bound)


def _ratio(norm, bound):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(norm == 0, 0.0, norm / bound)
    return r


def certified_bound(times, v0: float, kappa1: float, kappa2: float) -> np.ndarray:
    """``sqrt(V(z0) / kappa1) exp(-kappa2 t / 2)``."""
    return math.sqrt(max(v0, 0.0) / kappa1) * np.exp(-0.5 * kappa2 * np.asarray(times))


def lyapunov_along(system: DiscreteSystem, states, weights: LyapunovWeights,
                   n_quad: int = N_QUAD, chunk: int = 512) -> np.ndarray:
    """``V`` at every discrete state, via the grid-function quadrature."""
    maps = reconstruction_matrices(system, n_quad)
    states = np.atleast_2d(states)
    out = np.empty(len(states))
    for a in range(0, len(states), chunk):
        sf = to_state_function(system, states[a:a + chunk], _maps=maps)
        out[a:a + chunk] = lyapunov_value(sf, weights, system.params)
    return out


def integrate(system: DiscreteSystem, z0, dt: float, t_end: float,
              weights: LyapunovWeights | None = None,
              certificate: Certificate | None = None,
              n_quad: int = N_QUAD) -> Trajectory:
    """Implicit midpoint: ``(I - dt/2 A) z+ = (I + dt/2 A) z`` with ``A = (J - R) Q``.

    The left matrix is LU-factored once. If ``weights`` is given, ``V`` is
    evaluated at every sample; with a ``certificate`` as well, the certified
    bound is attached.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t_end >= dt:
        raise ValueError("t_end must be at least dt")
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (system.dim,):
        raise ValueError(f"initial state must have length {system.dim}")
    n_steps = int(round(t_end / dt))
    A = system.A
    eye = np.eye(system.dim)
    lhs = eye - 0.5 * dt * A
    rhs = eye + 0.5 * dt * A
    lu = lu_factor(lhs, check_finite=True)
    if np.min(np.abs(np.diag(lu[0]))) == 0.0:
        raise np.linalg.LinAlgError("implicit midpoint matrix is singular")

    states = np.empty((n_steps + 1, system.dim))
    states[0] = z0
    z = z0
    for k in range(n_steps):
        z = lu_solve(lu, rhs @ z, check_finite=False)
        states[k + 1] = z
    times = dt * np.arange(n_steps + 1)
    e = discrete_energy(system, states)
    traj = Trajectory(times, states, np.sqrt(2.0 * e), e)
    log.info("integrated %d steps of size %g", n_steps, dt)
    if weights is not None:
        traj.lyapunov = lyapunov_along(system, states, weights, n_quad)
        if certificate is not None:
            traj.bound = certified_bound(times, traj.lyapunov[0], certificate.kappa1,
                                         certificate.kappa2)
    return traj


@dataclass
class BoundReport:
    passed: bool
    max_ratio: float
    t_max_ratio: float
    empirical_rate: float
    certified_rate: float
    conservative: bool
    n_samples: int
    violations: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_ratio": self.max_ratio,
            "t_max_ratio": self.t_max_ratio,
            "empirical_rate": self.empirical_rate,
            "certified_rate": self.certified_rate,
            "conservative": self.conservative,
            "n_samples": self.n_samples,
            "violations": self.violations,
        }


def empirical_decay_rate(times, norm) -> float:
    """Least-squares rate ``r`` of ``||z|| ~ exp(-r t)`` over the second half of the run."""
    times, norm = np.asarray(times), np.asarray(norm)
    tail = times >= times[0] + 0.5 * (times[-1] - times[0])
    keep = tail & (norm > 0)
    if keep.sum() < 2:
        return float("nan")
    slope = np.polyfit(times[keep], np.log(norm[keep]), 1)[0]
    return float(-slope)


def check_bound(traj: Trajectory, cert: Certificate, rtol: float = BOUND_RTOL) -> BoundReport:
    """Check ``||z(t_k)|| <= bound(t_k) (1 + rtol)`` at every sample."""
    if traj.lyapunov is None:
        raise ValueError("trajectory has no Lyapunov values; integrate with weights")
    notes = []
    if not cert.kappa1 > 0:
        notes.append("kappa1 <= 0: no bound can be certified")
        bound = np.full_like(traj.norm, np.nan)
    else:
        bound = certified_bound(traj.times, traj.lyapunov[0], cert.kappa1, cert.kappa2)
    ratio = _ratio(traj.norm, bound)
    ok = np.nan_to_num(ratio, nan=np.inf) <= 1.0 + rtol
    k = int(np.nanargmax(ratio)) if np.any(np.isfinite(ratio)) else 0
    rate = empirical_decay_rate(traj.times, traj.norm)
    certified = 0.5 * cert.kappa2
    return BoundReport(
        passed=bool(ok.all()),
        max_ratio=float(ratio[k]) if np.isfinite(ratio[k]) else float("inf"),
        t_max_ratio=float(traj.times[k]),
        empirical_rate=rate,
        certified_rate=certified,
        conservative=bool(math.isnan(rate) or rate >= certified),
        n_samples=len(traj.times),
        violations=int((~ok).sum()),
        notes=notes,
    )


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Columns ``t, norm_Z, energy, lyapunov, bound, ratio``; 12 significant digits."""
    n = len(traj.times)
    nan = np.full(n, np.nan)
    cols = [traj.times, traj.norm, traj.energy,
            traj.lyapunov if traj.lyapunov is not None else nan,
            traj.bound if traj.bound is not None else nan,
            traj.ratio if traj.bound is not None else nan]
    with open(path, "w", newline="\n") as fh:
        fh.write("t,norm_Z,energy,lyapunov,bound,ratio\n")
        for row in zip(*cols):
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
