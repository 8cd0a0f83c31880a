"""JSON run configuration: strict parsing and normalised re-serialisation."""

from __future__ import annotations

import ast
import json
import math
import operator
import re
from dataclasses import dataclass, field

from .certificate import GATES, LyapunovWeights
from .params import FIELD_NAMES, N_GRID, BeamParameters, Constant, ParameterField, Sinusoid, Tabulated
from .simulate import InitialCondition, Profile
from .weight_search import SearchConfig


class ConfigError(ValueError):
    pass


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow,
        ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_pi_expr(value, where: str = "value") -> float:
    """Number, or an arithmetic string over numbers and ``pi`` (``"2pi"``, ``"3*pi/4"``)."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{where}: expected a number or pi-expression, got {value!r}")
    text = re.sub(r"(\d|\))\s*(pi|\()", r"\1*\2", value.strip())

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"{where}: unsupported expression {value!r}")

    try:
        out = ev(ast.parse(text, mode="eval"))
    except (SyntaxError, ZeroDivisionError, OverflowError) as exc:
        raise ConfigError(f"{where}: cannot parse {value!r}: {exc}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{where}: {value!r} is not finite")
    return out


def _number(d: dict, key: str, where: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise ConfigError(f"{where}: missing key '{key}'")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {v!r}")
    return float(v)


def _obj(value, where: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")
    return value


def parse_field(spec, length: float, where: str) -> ParameterField:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"{where}: expected an object with 'kind'")
    kind = spec["kind"]
    try:
        if kind == "constant":
            _obj(spec, where, {"kind", "value"})
            return Constant(_number(spec, "value", where), length)
        if kind == "sinusoid":
            _obj(spec, where, {"kind", "base", "amplitude", "frequency", "phase"})
            if "frequency" not in spec:
                raise ConfigError(f"{where}: missing key 'frequency'")
            return Sinusoid(_number(spec, "base", where), _number(spec, "amplitude", where),
                            parse_pi_expr(spec["frequency"], f"{where}.frequency"),
                            parse_pi_expr(spec.get("phase", 0.0), f"{where}.phase"), length)
        if kind == "tabulated":
            _obj(spec, where, {"kind", "values"})
            vals = spec.get("values")
            if not isinstance(vals, list) or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
                raise ConfigError(f"{where}.values: expected a list of numbers")
            return Tabulated(tuple(vals), length)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}: unknown field kind {kind!r}")


def parse_profile(spec, where: str) -> Profile:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"{where}: expected an object with 'kind'")
    kind = spec["kind"]
    if kind == "zero":
        _obj(spec, where, {"kind"})
        return Profile("zero")
    if kind == "cosine":
        _obj(spec, where, {"kind", "scale"})
        return Profile("cosine", _number(spec, "scale", where, 1.0))
    if kind == "tabulated":
        _obj(spec, where, {"kind", "values"})
        try:
            return Profile("tabulated", values=tuple(spec.get("values") or ()))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}: unknown profile kind {kind!r}")


def parse_weights(spec, where: str = "weights") -> LyapunovWeights:
    names = ("n0", "n1", "n2", "alpha1", "alpha2", "alpha3")
    _obj(spec, where, set(names))
    try:
        return LyapunovWeights(*(_number(spec, n, where) for n in names))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


BOUNDARIES = ("clamped-left", "clamped-right")


@dataclass(frozen=True)
class Discretization:
    n_elements: int = 50
    dt: float = 1e-3
    t_end: float = 50.0
    boundary_damper: bool = True


@dataclass(frozen=True)
class Output:
    directory: str = "out"
    dump_system: bool = False


@dataclass(frozen=True)
class RunConfig:
    beam: BeamParameters
    boundary: str = "clamped-left"
    weights: LyapunovWeights | None = None
    search: SearchConfig | None = None
    gate: str = "relaxed"
    n_grid: int = N_GRID
    discretization: Discretization = Discretization()
    initial_condition: InitialCondition = InitialCondition()
    output: Output = field(default_factory=Output)

    @property
    def interchanged(self) -> bool:
        return self.boundary == "clamped-right"

    @classmethod
    def from_dict(cls, raw) -> "RunConfig":
        top = _obj(raw, "config", {"beam", "weights", "search", "certificate",
                                    "discretization", "initial_condition", "output"})
        if "beam" not in top:
            raise ConfigError("config: missing key 'beam'")
        beam = _obj(top["beam"], "beam", {"length", "boundary", *FIELD_NAMES})
        length = _number(beam, "length", "beam")
        if not length > 0:
            raise ConfigError("beam.length: must be positive")
        for n in FIELD_NAMES:
            if n not in beam:
                raise ConfigError(f"beam: missing key '{n}'")
        params = BeamParameters(**{n: parse_field(beam[n], length, f"beam.{n}") for n in FIELD_NAMES},
                                length=length)
        boundary = beam.get("boundary", "clamped-left")
        if boundary not in BOUNDARIES:
            raise ConfigError(f"beam.boundary: expected one of {BOUNDARIES}")

        weights = parse_weights(top["weights"]) if "weights" in top else None

        cert = _obj(top.get("certificate", {}), "certificate", {"gate", "n_grid"})
        gate = cert.get("gate", "relaxed")
        if gate not in GATES:
            raise ConfigError(f"certificate.gate: expected one of {GATES}")
        n_grid = _int(cert, "n_grid", "certificate", N_GRID, minimum=3)

        search = None
        if "search" in top:
            s = _obj(top["search"], "search", {"initial", "lower", "upper", "max_iter", "tol",
                                                "seed", "restarts", "random_directions"})
            d = SearchConfig()
            initial = s.get("initial")
            try:
                search = SearchConfig(
                    initial=parse_weights(initial, "search.initial") if initial is not None else None,
                    lower=_number(s, "lower", "search", d.lower),
                    upper=_number(s, "upper", "search", d.upper),
                    max_iter=_int(s, "max_iter", "search", d.max_iter, minimum=1),
                    tol=_number(s, "tol", "search", d.tol),
                    seed=_int(s, "seed", "search", d.seed, minimum=0),
                    restarts=_int(s, "restarts", "search", d.restarts, minimum=0),
                    random_directions=_int(s, "random_directions", "search", d.random_directions, minimum=0),
                    gate=gate, n_grid=n_grid,
                )
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"search: {exc}") from None

        dd = Discretization()
        disc = _obj(top.get("discretization", {}), "discretization",
                    {"n_elements", "dt", "t_end", "boundary_damper"})
        damper = disc.get("boundary_damper", True)
        if not isinstance(damper, bool):
            raise ConfigError("discretization.boundary_damper: expected true/false")
        discretization = Discretization(
            n_elements=_int(disc, "n_elements", "discretization", dd.n_elements, minimum=2),
            dt=_number(disc, "dt", "discretization", dd.dt),
            t_end=_number(disc, "t_end", "discretization", dd.t_end),
            boundary_damper=damper,
        )
        if not discretization.dt > 0 or not discretization.t_end >= discretization.dt:
            raise ConfigError("discretization: need dt > 0 and t_end >= dt")

        ic_raw = _obj(top.get("initial_condition", {}), "initial_condition", {"z1", "z2", "z3", "z4"})
        ic = InitialCondition(**{k: parse_profile(ic_raw[k], f"initial_condition.{k}")
                                 for k in ("z1", "z2", "z3", "z4") if k in ic_raw})

        out_raw = _obj(top.get("output", {}), "output", {"directory", "dump_system"})
        directory = out_raw.get("directory", "out")
        dump = out_raw.get("dump_system", False)
        if not isinstance(directory, str) or not isinstance(dump, bool):
            raise ConfigError("output: directory must be a string and dump_system a boolean")

        return cls(beam=params, boundary=boundary, weights=weights, search=search, gate=gate,
                   n_grid=n_grid, discretization=discretization, initial_condition=ic,
                   output=Output(directory, dump))

    def to_dict(self) -> dict:
        beam = {"length": self.beam.length, "boundary": self.boundary}
        beam.update({n: f.to_dict() for n, f in self.beam.fields()})
        out = {"beam": beam}
        if self.weights is not None:
            out["weights"] = self.weights.to_dict()
        if self.search is not None:
            s = self.search
            search = {"lower": s.lower, "upper": s.upper, "max_iter": s.max_iter, "tol": s.tol,
                      "seed": s.seed, "restarts": s.restarts,
                      "random_directions": s.random_directions}
            if s.initial is not None:
                search["initial"] = s.initial.to_dict()
            out["search"] = search
        out["certificate"] = {"gate": self.gate, "n_grid": self.n_grid}
        d = self.discretization
        out["discretization"] = {"n_elements": d.n_elements, "dt": d.dt, "t_end": d.t_end,
                                 "boundary_damper": d.boundary_damper}
        out["initial_condition"] = {k: p.to_dict() for k, p in
                                    zip(("z1", "z2", "z3", "z4"), self.initial_condition.components())}
        out["output"] = {"directory": self.output.directory, "dump_system": self.output.dump_system}
        return out


def _int(d: dict, key: str, where: str, default: int, minimum: int | None = None) -> int:
    v = d.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        else:
            raise ConfigError(f"{where}.{key}: expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}.{key}: must be >= {minimum}")
    return v


def load_config(path) -> RunConfig:
    """Read and parse a config file; JSON syntax errors carry line and column."""
    with open(path) as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return RunConfig.from_dict(raw)
