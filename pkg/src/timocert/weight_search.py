"""Choosing Lyapunov weights: a feasibility seed and a decay-rate maximiser."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .certificate import Certificate, Certifier, LyapunovWeights
from .params import N_GRID, BeamParameters

log = logging.getLogger(__name__)

WEIGHT_NAMES = ("n0", "n1", "n2", "alpha1", "alpha2", "alpha3")


class FeasibilityNotFound(RuntimeError):
    def __init__(self, message: str, blocking: list[str], last: LyapunovWeights | None = None):
        super().__init__(f"{message} (blocking: {', '.join(blocking) or 'none'})")
        self.blocking = blocking
        self.last = last


@dataclass(frozen=True)
class SearchConfig:
    initial: LyapunovWeights | None = None
    lower: float = 1e-3
    upper: float = 1e4
    max_iter: int = 2000
    tol: float = 1e-6
    seed: int = 0
    gate: str = "relaxed"
    initial_step: float = math.log(2.0)
    min_step: float = 1e-6
    random_directions: int = 24
    restarts: int = 3
    n_grid: int = N_GRID

    def __post_init__(self):
        if not (0 < self.lower < self.upper):
            raise ValueError("need 0 < lower < upper")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.gate not in ("relaxed", "strict"):
            raise ValueError(f"unknown gate {self.gate!r}")

    def to_dict(self) -> dict:
        return {
            "initial": self.initial.to_dict() if self.initial else None,
            "lower": self.lower, "upper": self.upper, "max_iter": self.max_iter,
            "tol": self.tol, "seed": self.seed, "gate": self.gate,
        }


def feasible_seed(params: BeamParameters, gate: str = "relaxed", max_doublings: int = 64,
                  n_grid: int = N_GRID, certifier: Certifier | None = None) -> LyapunovWeights:
    """Weights found by the constructive recipe.

    1. ``n2 = 1``;
    2. double ``alpha2, alpha3`` until ``inf c4 > 0``;
    3. double ``alpha1`` and ``n1`` together until ``inf c3 > 0``;
    4. double ``n0`` until ``kappa1``, ``c5``, ``c6``, ``c2`` (and ``c1`` under
       the strict gate) are positive.

    Each stage gives up after ``max_doublings`` and raises
    :class:`FeasibilityNotFound` naming the constraint(s) still violated.
    """
    cert_of = certifier or Certifier(params, n_grid)
    w = LyapunovWeights(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)

    def margins(w):
        return cert_of(w, gate).margins

    for _ in range(max_doublings):
        if margins(w)["c4"] > 0:
            break
        w = replace(w, alpha2=2 * w.alpha2, alpha3=2 * w.alpha3)
    else:
        raise FeasibilityNotFound("could not make c4 positive", ["c4"], w)

    for _ in range(max_doublings):
        if margins(w)["c3"] > 0:
            break
        w = replace(w, alpha1=2 * w.alpha1, n1=2 * w.n1)
    else:
        raise FeasibilityNotFound("could not make c3 positive", ["c3"], w)

    for _ in range(max_doublings):
        cert = cert_of(w, gate)
        if cert.feasible:
            log.debug("feasible seed %s, kappa2 = %g", w, cert.kappa2)
            return w
        w = replace(w, n0=2 * w.n0)
    cert = cert_of(w, gate)
    raise FeasibilityNotFound(f"n0 cap {w.n0:g} reached", cert.blocking, w)


class SearchResult(NamedTuple):
    weights: LyapunovWeights
    certificate: Certificate
    trace: list[tuple[int, tuple[float, ...], float]]


def _score(cert: Certificate) -> float:
    return cert.kappa2 if cert.feasible else -math.inf


def maximize_kappa2(params: BeamParameters, config: SearchConfig = SearchConfig()) -> SearchResult:
    """Cyclic coordinate search for the largest certified ``kappa2``.

    Works on ``log`` of the six weights. Each iteration visits the
    coordinates in an order drawn from ``config.seed`` and tries ``+step``
    then ``-step``, keeping any strict improvement; infeasible points score
    ``-inf``. If no coordinate move helps, up to ``random_directions`` random
    directions of the same length are polled. When an iteration improves by
    less than ``tol`` (relative), the step halves. Once it drops below
    ``min_step`` the step is reset to ``initial_step`` up to ``restarts``
    times, then the search ends; ``max_iter`` caps the iterations overall.

    The start is the better of ``config.initial`` (if feasible) and
    :func:`feasible_seed`. Bounds are ``[lower, upper]`` per weight, widened
    to contain the start if necessary. Candidates are scored on the grid
    minimum; the returned certificate is recomputed with refinement and, if
    that flips feasibility, the search falls back along its accepted points.
    """
    fast = Certifier(params, config.n_grid, refine=False)
    exact = Certifier(params, config.n_grid, refine=True)

    starts = []
    if config.initial is not None and fast(config.initial, config.gate).feasible:
        starts.append(config.initial)
    try:
        starts.append(feasible_seed(params, config.gate, certifier=fast))
    except FeasibilityNotFound:
        if not starts:
            raise
    start = max(starts, key=lambda w: _score(fast(w, config.gate)))

    x = np.log(np.array(start.as_tuple()))
    lo = np.minimum(np.full(6, math.log(config.lower)), x)
    hi = np.maximum(np.full(6, math.log(config.upper)), x)
    best = _score(fast(start, config.gate))
    accepted = [start]
    trace = [(0, start.as_tuple(), best)]
    rng = np.random.default_rng(config.seed)
    step = config.initial_step
    restarts_left = config.restarts

    def try_move(cand):
        nonlocal x, best
        cand = np.clip(cand, lo, hi)
        if np.array_equal(cand, x):
            return False
        w = LyapunovWeights(*np.exp(cand))
        s = _score(fast(w, config.gate))
        if s > best:
            x, best = cand, s
            accepted.append(w)
            return True
        return False

    for it in range(1, config.max_iter + 1):
        before = best
        for i in rng.permutation(6):
            for direction in (1.0, -1.0):
                cand = x.copy()
                cand[i] += direction * step
                if try_move(cand):
                    break
        if best == before:
            # the objective is a min of smooth terms, so coordinate moves stall
            # on ridges where several terms tie; poll random directions there
            for _ in range(config.random_directions):
                d = rng.standard_normal(6)
                d *= step / np.linalg.norm(d)
                if try_move(x + d) or try_move(x - d):
                    break
        trace.append((it, tuple(np.exp(x)), best))
        if best - before <= config.tol * abs(best):
            step *= 0.5
            if step < config.min_step:
                if restarts_left == 0:
                    break
                restarts_left -= 1
                step = config.initial_step

    for w in reversed(accepted):
        cert = exact(w, config.gate)
        if cert.feasible:
            log.info("best kappa2 = %.6g after %d iterations", cert.kappa2, trace[-1][0])
            return SearchResult(w, cert, trace)
    raise FeasibilityNotFound("no accepted point survived refinement", exact(start, config.gate).blocking)
