"""Structure-preserving finite-volume discretisation of the beam.

Staggered layout on ``N`` uniform cells of width ``h = L / N``:

* momenta ``z1, z2`` live at cell centres ``(k + 1/2) h``, ``k = 0..N-1``;
* strains ``z3, z4`` live at nodes ``j h``, ``j = 0..N-1``. Node 0 sits on the
  clamped end and owns a half cell; the free end ``xi = L`` carries no strain
  unknown, its force and torque come from the damper law.

Each unknown is integrated over its control volume (measure ``m``), giving
``M dz/dt = (Jd - Rd) e`` with co-energy ``e = H z`` and ``M = diag(m)``.
With ``Q = diag(H m)`` this is ``dz/dt = (J - R) Q z`` where ``J = M^-1 Jd M^-1``
and ``R = M^-1 Rd M^-1``. ``Jd`` holds the +/-1 difference stencils and the
``h/2`` averaging that couples ``z2`` and ``z3``; ``Rd`` holds ``gamma h`` and
``delta h`` on the momentum rows plus ``gamma(L)``, ``delta(L)`` on the last cell.
Coefficients are sampled at the unknown's own location (midpoint rule).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import BeamParameters


@dataclass(frozen=True, eq=False)
class DiscreteSystem:
    n_elements: int
    length: float
    J: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    measures: np.ndarray
    cell_centers: np.ndarray
    nodes: np.ndarray
    params: BeamParameters
    boundary_damper: bool = True
    interchanged: bool = False

    @property
    def dim(self) -> int:
        return 4 * self.n_elements

    @property
    def h(self) -> float:
        return self.length / self.n_elements

    @property
    def A(self) -> np.ndarray:
        """System matrix ``(J - R) Q``."""
        return (self.J - self.R) @ self.Q

    def positions(self) -> np.ndarray:
        """Location of every unknown, in the frame the matrices were built in."""
        c, n = self.cell_centers, self.nodes
        return np.concatenate([c, c, n, n])

    def blocks(self, z: np.ndarray) -> tuple[np.ndarray, ...]:
        z = np.asarray(z)
        N = self.n_elements
        return tuple(z[..., i * N:(i + 1) * N] for i in range(4))


def build_system(params: BeamParameters, n_elements: int, boundary_damper: bool = True,
                 interchanged: bool = False) -> DiscreteSystem:
    """Assemble ``J, R, Q`` for ``n_elements`` cells.

    ``interchanged=True`` clamps ``xi = L`` and puts the damper at ``xi = 0``.
    It is implemented by building the standard system for the reflected
    parameters ``xi -> L - xi``; in that frame the state is
    ``(z1, -z2, -z3, z4)`` (see :func:`timocert.simulate.sample_initial_condition`).
    """
    N = int(n_elements)
    if N < 2:
        raise ValueError(f"need at least 2 elements, got {n_elements}")
    p = params.reflected() if interchanged else params
    L = p.length
    h = L / N
    centers = (np.arange(N) + 0.5) * h
    nodes = np.arange(N) * h

    # G: strain rows (nodes) x momentum columns (cells); dz3/dt ~ (e1_right - e1_left)/h,
    # with the clamped velocity at node 0 dropped.
    G = np.eye(N) - np.eye(N, k=-1)
    # Avg: momentum rows x strain columns, int_cell e3 ~ h/2 (left node + right node).
    Avg = 0.5 * h * (np.eye(N) + np.eye(N, k=1))

    Jd = np.zeros((4 * N, 4 * N))
    s1, s2, s3, s4 = (slice(i * N, (i + 1) * N) for i in range(4))
    Jd[s1, s3] = -G.T
    Jd[s3, s1] = G
    Jd[s2, s4] = -G.T
    Jd[s4, s2] = G
    Jd[s2, s3] += Avg
    Jd[s3, s2] -= Avg.T

    Rd = np.zeros((4 * N, 4 * N))
    Rd[s1, s1] = np.diag(p.gamma._values(centers) * h)
    Rd[s2, s2] = np.diag(p.delta._values(centers) * h)
    if boundary_damper:
        Rd[N - 1, N - 1] += p.gamma(L)
        Rd[2 * N - 1, 2 * N - 1] += p.delta(L)

    m_strain = np.full(N, h)
    m_strain[0] = h / 2
    measures = np.concatenate([np.full(N, h), np.full(N, h), m_strain, m_strain])
    w = 1.0 / measures
    scale = np.outer(w, w)
    J = Jd * scale
    R = Rd * scale

    hdiag = np.concatenate([
        1.0 / p.rho._values(centers),
        1.0 / p.i_rho._values(centers),
        p.k_shear._values(nodes),
        p.ei._values(nodes),
    ])
    Q = np.diag(hdiag * measures)
    return DiscreteSystem(N, L, J, R, Q, measures, centers, nodes, p,
                          boundary_damper=boundary_damper, interchanged=interchanged)


def _check_state(system: DiscreteSystem, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != system.dim:
        raise ValueError(f"state length {z.shape[-1]} != system dimension {system.dim}")
    return z


def discrete_energy(system: DiscreteSystem, z) -> float:
    """``E_h = 1/2 z^T Q z``."""
    z = _check_state(system, z)
    return 0.5 * np.einsum("...i,i,...i->...", z, np.diag(system.Q), z)


def power_balance_residual(system: DiscreteSystem, z) -> float:
    """``|dE_h/dt + z^T Q R Q z| = |z^T Q J Q z|``; zero up to rounding."""
    z = _check_state(system, z)
    e = system.Q @ z
    return float(abs(e @ system.J @ e))


def dissipation_rate(system: DiscreteSystem, z) -> float:
    e = system.Q @ _check_state(system, z)
    return float(e @ system.R @ e)


def spectral_abscissa(system: DiscreteSystem) -> float:
    return float(np.linalg.eigvals(system.A).real.max())


def dump_system(system: DiscreteSystem, path) -> None:
    """Write ``J``, ``R``, ``Q`` as dense row-major text, 17 significant digits."""
    with open(path, "w", newline="\n") as fh:
        for name in ("J", "R", "Q"):
            mat = getattr(system, name)
            fh.write(f"# {name} {mat.shape[0]} {mat.shape[1]}\n")
            for row in mat:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_system_dump(path) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    name, rows = None, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                if name is not None:
                    out[name] = np.array(rows)
                name, rows = line.split()[1], []
            elif line.strip():
                rows.append([float(v) for v in line.split()])
    if name is not None:
        out[name] = np.array(rows)
    return out
