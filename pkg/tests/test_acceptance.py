"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Every test prints a ``label: detail`` line; the pytest summary lists one
``[PASS]``/``[FAIL]`` line per criterion.
"""

import json
import time

import numpy as np
import pytest
from scipy.integrate import simpson

from timocert.certificate import (EXAMPLE_WEIGHTS, Certifier, LyapunovWeights, StateFunction,
                                  beam_inequality_sides, certify, compare_variants, energy, eta,
                                  kappa1, lyapunov_value, norm_squared, wirtinger_constant,
                                  wirtinger_constants)
from timocert.cli import main
from timocert.discretize import build_system, spectral_abscissa
from timocert.params import constant_beam, example_beam
from timocert.simulate import EXAMPLE_IC, check_bound, integrate, sample_initial_condition

from conftest import ROOT
from test_discretize import _fmt, _hand_unit_n4

C1 = "1 example constants"
C2 = "2 inequality property suites"
C3 = "3 structure preservation"
C4 = "4 bound dominance"
C5 = "5 small-scale oracle equivalence"
C6 = "6 optimizer sanity"


def _kappa2_criterion1():
    return certify(EXAMPLE_WEIGHTS, example_beam()).kappa2


@pytest.mark.criterion(C1)
def test_criterion_1_example_constants(detail):
    beam = example_beam()
    t0 = time.perf_counter()
    cert = certify(EXAMPLE_WEIGHTS, beam)
    elapsed = time.perf_counter() - t0
    c = cert.c_essinf
    detail(f"kappa1={cert.kappa1:.6g} eta={cert.eta:.6g} inf c4={c[3]:.6g} "
           f"beta'={cert.beta_prime:.6g} kappa2={cert.kappa2:.6g} ({elapsed:.3f} s)")
    detail(f"essinf c1 = {c[0]:+.6g} ({'positive' if c[0] > 0 else 'negative'}; no tolerance claimed)")
    assert abs(cert.kappa1 - 4.77) <= 0.01
    assert abs(cert.eta - 64.47) <= 0.01
    assert abs(c[3] - 4.01) <= 0.02
    assert cert.beta_prime == min(c[1:4])
    assert abs(cert.beta_prime - 4.01) <= 0.02
    assert abs(cert.kappa2 - 0.0622) <= 0.0005
    assert cert.kappa2 == cert.beta_prime / cert.eta
    assert elapsed < 1.0


@pytest.mark.criterion(C2)
def test_criterion_2_inequality_suites(detail):
    rng = np.random.default_rng(7)
    beam = example_beam()
    t0 = time.perf_counter()

    # Wirtinger: random quarter-wave sine series plus a cubic, all vanishing at 0
    worst_w = 0.0
    for _ in range(200):
        length = rng.uniform(0.2, 5.0)
        xi = np.linspace(0, length, 4097)
        k = np.arange(1, 9)
        a = rng.standard_normal(8) / k
        om = (k - 0.5) * np.pi / length
        p = rng.standard_normal(3)
        f = (a[:, None] * np.sin(om[:, None] * xi)).sum(0) + p[0] * xi + p[1] * xi**2 + p[2] * xi**3
        df = (a[:, None] * om[:, None] * np.cos(om[:, None] * xi)).sum(0) \
            + p[0] + 2 * p[1] * xi + 3 * p[2] * xi**2
        ratio = simpson(f**2, x=xi) / (wirtinger_constant(length) * simpson(df**2, x=xi))
        worst_w = max(worst_w, ratio)
    assert worst_w <= 1 + 1e-8

    # beam inequality for K and EI with random Fourier z3, z4
    xi = np.linspace(0, 1, 2049)
    k1, k2 = wirtinger_constants(beam)
    worst_b = 0.0
    for coef, kk in ((beam.k_shear(xi), k1), (beam.ei(xi), k2)):
        for _ in range(200):
            n = rng.integers(1, 10)
            a, b = rng.standard_normal((2, n))
            m = np.arange(n)[:, None]
            z = (a[:, None] * np.cos(m * np.pi * xi) + b[:, None] * np.sin(m * np.pi * xi)).sum(0)
            lhs, rhs = beam_inequality_sides(coef, z, xi)
            worst_b = max(worst_b, lhs / (kk * rhs))
    assert worst_b <= 1 + 1e-8

    # sandwich kappa1 ||z||^2 <= V <= eta E on 1000 random states
    xq = np.linspace(0, 1, 1025)
    m = np.arange(6)
    arg = np.pi * m[:, None] * xq[None, :]
    a = rng.standard_normal((1000, 4, 6)) / (1 + m)
    b = rng.standard_normal((1000, 4, 6)) / (1 + m)
    states = StateFunction(xq, np.einsum("csm,mx->csx", a, np.cos(arg))
                           + np.einsum("csm,mx->csx", b, np.sin(arg)))
    v = lyapunov_value(states, EXAMPLE_WEIGHTS, beam)
    lo = kappa1(EXAMPLE_WEIGHTS, beam) * norm_squared(states, beam)
    hi = eta(EXAMPLE_WEIGHTS, beam) * energy(states, beam)
    assert np.all(lo <= v * (1 + 1e-8)) and np.all(v <= hi * (1 + 1e-8))
    elapsed = time.perf_counter() - t0
    detail(f"max Wirtinger ratio {worst_w:.6f}, max beam-inequality ratio {worst_b:.6f}, "
           f"min V/(kappa1|z|^2) {np.min(v / lo):.4f}, max V/(eta E) {np.max(v / hi):.4f} "
           f"({elapsed:.2f} s)")
    assert elapsed < 30.0


@pytest.mark.criterion(C3)
def test_criterion_3_structure(detail):
    t0 = time.perf_counter()
    kappa2 = _kappa2_criterion1()
    worst = {"skew": 0.0, "psd": np.inf, "re": -np.inf}
    for beam in (constant_beam(), example_beam()):
        for N in (4, 50):
            sys = build_system(beam, N)
            worst["skew"] = max(worst["skew"], np.abs(sys.J + sys.J.T).max())
            worst["psd"] = min(worst["psd"], np.linalg.eigvalsh(sys.R).min())
            worst["re"] = max(worst["re"], spectral_abscissa(sys))
    abscissa = spectral_abscissa(build_system(example_beam(), 50))
    elapsed = time.perf_counter() - t0
    detail(f"max |J+J^T| {worst['skew']:.2e}, min eig R {worst['psd']:.2e}, "
           f"max Re eig {worst['re']:.4f}, Example N=50 abscissa {abscissa:.5f} "
           f"vs -kappa2/2 = {-kappa2 / 2:.5f} ({elapsed:.2f} s)")
    assert worst["skew"] <= 1e-13
    assert worst["psd"] >= -1e-12
    assert worst["re"] <= 1e-10
    assert abscissa <= -kappa2 / 2
    assert elapsed < 5.0


@pytest.mark.criterion(C4)
def test_criterion_4_bound_dominance(detail):
    t0 = time.perf_counter()
    beam = example_beam()
    cert = certify(EXAMPLE_WEIGHTS, beam)
    sys = build_system(beam, 50)
    z0 = sample_initial_condition(EXAMPLE_IC, sys)
    traj = integrate(sys, z0, 1e-3, 50.0, EXAMPLE_WEIGHTS, cert)
    rep = check_bound(traj, cert)
    elapsed = time.perf_counter() - t0
    detail(f"{sys.dim} states, {rep.n_samples} samples, max norm/bound {rep.max_ratio:.4f} "
           f"at t={rep.t_max_ratio:g}, violations {rep.violations}; empirical rate "
           f"{rep.empirical_rate:.4f} vs kappa2/2 = {rep.certified_rate:.4f} ({elapsed:.1f} s)")
    assert sys.dim == 200
    assert np.all(traj.norm <= traj.bound * (1 + 1e-6))
    assert rep.passed
    assert rep.empirical_rate > cert.kappa2 / 2
    assert elapsed < 60.0


@pytest.mark.criterion(C5)
def test_criterion_5_oracles(detail):
    sys = build_system(constant_beam(), 4)
    J, R, Q = _hand_unit_n4()
    mism = sum(int((_fmt(getattr(sys, n)) != _fmt(m)).sum()) for n, m in (("J", J), ("R", R), ("Q", Q)))
    beams = [constant_beam(), constant_beam(0.4, gamma=0.9, delta=1.1, ei=0.6),
             constant_beam(2.0, length=3.0, i_rho=1.5)]
    weights = [LyapunovWeights(4, 2, 1, 2, 1, 1), EXAMPLE_WEIGHTS, LyapunovWeights(50, 1, 2, 3, 7, 40)]
    worst = 0.0
    for beam in beams:
        for w in weights:
            _, _, diffs = compare_variants(w, beam)
            worst = max(worst, max(diffs[k] for k in ("c1", "c4", "c5", "c6", "kappa1",
                                                      "k1", "k2", "eta")))
    detail(f"N=4 entries differing at 15 significant digits: {mism}; "
           f"max general-vs-constant difference on shared terms {worst:.2e}")
    assert mism == 0
    assert worst <= 1e-12


@pytest.mark.criterion(C6)
def test_criterion_6_optimizer(detail, tmp_path, capsys):
    t0 = time.perf_counter()
    code = main(["optimize", "--config", str(ROOT / "configs" / "example_optimize.json"),
                 "--out", str(tmp_path)])
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    out = json.loads((tmp_path / "certificate.json").read_text())
    w = LyapunovWeights(**out["weights"])
    beam = example_beam()
    cert = Certifier(beam)(w)
    rescaled = Certifier(beam)(w.scaled(7.0))
    detail(f"kappa2_opt = {out['kappa2']:.6g} (kappa1 {out['kappa1']:.3g}), feasible "
           f"{out['feasible']}, rescaled x7 difference {abs(rescaled.kappa2 - cert.kappa2):.1e} "
           f"({elapsed:.2f} s)")
    assert code == 0
    assert out["feasible"] and cert.feasible
    assert out["kappa2"] >= 0.0622
    assert abs(rescaled.kappa2 - cert.kappa2) <= 1e-9
    assert elapsed < 120.0
