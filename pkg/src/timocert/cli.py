"""Command line entry point.

Subcommands ``certify``, ``optimize``, ``simulate`` and ``verify`` read one JSON
config. Exit codes: 0 success, 1 usage/config error, 2 infeasible certificate
(or, for ``verify``, a violated bound). Set ``TIMO_LOG=INFO`` (or ``DEBUG``) for
progress logging.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from .certificate import Certificate, Certifier, LyapunovWeights
from .config import ConfigError, RunConfig, load_config
from .discretize import build_system, dump_system, spectral_abscissa
from .params import validate
from .simulate import check_bound, integrate, sample_initial_condition, write_trajectory_csv
from .weight_search import WEIGHT_NAMES, FeasibilityNotFound, SearchConfig, maximize_kappa2

log = logging.getLogger("timocert")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2


class UsageError(Exception):
    pass


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _frame_params(cfg: RunConfig):
    return cfg.beam.reflected() if cfg.interchanged else cfg.beam


def _certificate_payload(weights: LyapunovWeights, cert: Certificate) -> dict:
    return {"weights": weights.to_dict(), **cert.to_dict()}


def _summary(cert: Certificate) -> str:
    c1 = cert.c_essinf[0]
    return (f"kappa1 = {cert.kappa1:.6g}  eta = {cert.eta:.6g}  beta = {cert.beta:.6g}  "
            f"beta' = {cert.beta_prime:.6g}  kappa2 = {cert.kappa2:.6g}  "
            f"feasible[{cert.gate}] = {cert.feasible}\n"
            f"essinf c1 = {c1:+.6g} ({'positive' if c1 > 0 else 'NOT positive'})")


def _search_config(cfg: RunConfig, seed: int | None) -> SearchConfig:
    sc = cfg.search or SearchConfig(gate=cfg.gate, n_grid=cfg.n_grid)
    if sc.initial is None and cfg.weights is not None:
        sc = dataclasses.replace(sc, initial=cfg.weights)
    if seed is not None:
        sc = dataclasses.replace(sc, seed=seed)
    return sc


def _write_trace(path: Path, trace) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("iteration," + ",".join(WEIGHT_NAMES) + ",kappa2\n")
        for it, w, k2 in trace:
            fh.write(f"{it}," + ",".join(f"{v:.15g}" for v in w) + f",{k2:.15g}\n")


def cmd_certify(cfg: RunConfig, out: Path, args) -> int:
    if cfg.weights is None:
        raise UsageError("certify needs 'weights' in the config (missing key 'weights')")
    cert = Certifier(_frame_params(cfg), cfg.n_grid)(cfg.weights, cfg.gate)
    payload = _certificate_payload(cfg.weights, cert)
    _write_json(out / "certificate.json", payload)
    print(json.dumps(payload, indent=2))
    print(_summary(cert), file=sys.stderr)
    return EXIT_OK if cert.feasible else EXIT_INFEASIBLE


def cmd_optimize(cfg: RunConfig, out: Path, args) -> int:
    sc = _search_config(cfg, args.seed)
    try:
        res = maximize_kappa2(_frame_params(cfg), sc)
    except FeasibilityNotFound as exc:
        print(f"no feasible weights: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    payload = _certificate_payload(res.weights, res.certificate)
    _write_json(out / "certificate.json", payload)
    _write_trace(out / "trace.csv", res.trace)
    print(json.dumps(payload, indent=2))
    print(_summary(res.certificate), file=sys.stderr)
    return EXIT_OK


def _weights_for_run(cfg: RunConfig, args) -> tuple[LyapunovWeights, Certificate]:
    if (cfg.weights is None) == (cfg.search is None):
        raise UsageError("exactly one of 'weights' or 'search' must be given for bound checking")
    params = _frame_params(cfg)
    if cfg.weights is not None:
        return cfg.weights, Certifier(params, cfg.n_grid)(cfg.weights, cfg.gate)
    res = maximize_kappa2(params, _search_config(cfg, args.seed))
    return res.weights, res.certificate


def _run(cfg: RunConfig, out: Path, args):
    weights, cert = _weights_for_run(cfg, args)
    d = cfg.discretization
    system = build_system(cfg.beam, d.n_elements, boundary_damper=d.boundary_damper,
                          interchanged=cfg.interchanged)
    dump_path = args.dump_system or (out / "system.txt" if cfg.output.dump_system else None)
    if dump_path:
        Path(dump_path).parent.mkdir(parents=True, exist_ok=True)
        dump_system(system, dump_path)
    z0 = sample_initial_condition(cfg.initial_condition, system)
    traj = integrate(system, z0, d.dt, d.t_end, weights,
                     cert if cert.kappa1 > 0 else None)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, out / "trajectory.csv")
    _write_json(out / "certificate.json", _certificate_payload(weights, cert))
    return system, weights, cert, traj


def cmd_simulate(cfg: RunConfig, out: Path, args) -> int:
    system, weights, cert, traj = _run(cfg, out, args)
    print(f"{len(traj.times)} samples, E(0) = {traj.energy[0]:.6g}, E(end) = {traj.energy[-1]:.6g}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path, args) -> int:
    system, weights, cert, traj = _run(cfg, out, args)
    report = check_bound(traj, cert)
    payload = {
        "certificate": _certificate_payload(weights, cert),
        "bound": report.to_dict(),
        "spectral_abscissa": spectral_abscissa(system),
        "state_dimension": system.dim,
        "verified": bool(cert.feasible and report.passed),
    }
    _write_json(out / "report.json", payload)
    print(json.dumps(payload, indent=2))
    print(_summary(cert), file=sys.stderr)
    print(f"max norm/bound = {report.max_ratio:.6g} at t = {report.t_max_ratio:g}; "
          f"empirical rate {report.empirical_rate:.4g} vs certified {report.certified_rate:.4g}",
          file=sys.stderr)
    return EXIT_OK if payload["verified"] else EXIT_INFEASIBLE


COMMANDS = {"certify": cmd_certify, "optimize": cmd_optimize,
            "simulate": cmd_simulate, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration")
    common.add_argument("--out", help="output directory (overrides output.directory)")
    common.add_argument("--seed", type=int, help="search seed (overrides search.seed)")
    common.add_argument("--dump-system", help="write J, R, Q as dense text to this path")
    common.add_argument("--grid", type=int, help="grid size for essential sup/inf")
    parser = argparse.ArgumentParser(prog="timocert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("TIMO_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = load_config(args.config)
        if args.grid is not None:
            if args.grid < 3:
                raise ConfigError("--grid must be at least 3")
            cfg = dataclasses.replace(cfg, n_grid=args.grid)
            if cfg.search is not None:
                cfg = dataclasses.replace(cfg, search=dataclasses.replace(cfg.search, n_grid=args.grid))
        report = validate(cfg.beam, cfg.n_grid)
        if not report.valid:
            raise ConfigError("invalid beam parameters: " + "; ".join(report.failures))
        out = Path(args.out or cfg.output.directory)
        return COMMANDS[args.command](cfg, out, args)
    except (ConfigError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
