"""Experiment configuration: a single versioned YAML file, strictly validated.

Unknown keys are hard errors anywhere in the document (a silent typo in a
physics constant is the worst failure mode).  ``--override key=value`` edits
use dotted paths into the same schema and are validated identically.
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass

import yaml

from .errors import ConfigError
from .grid import PeriodicGrid
from .integrators import StepConfig
from .model import ModelParams

SCHEMA_VERSION = 1

GENERATOR_OPTIONS = {
    "equilibrium": {"n_const": 1.0, "rho_const": 1.0, "u_const": 0.0},
    "sine-perturbation": {"amplitude": 0.1, "mode": 1},
    "two-bump": {"vacuum": False, "width": 0.18, "height": 1.0, "floor": 0.5},
    "random-smooth": {"cutoff_mode": 3, "amplitude": 0.1},
    "snapshot": {"path": None},
}

_DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "seed": 0,
    "grid": {"dim": 1, "n": 128},
    "params": {"kappa": 1.0, "eta": 0.1, "mu": 0.1, "lambda": 0.0, "A": 1.0,
               "gamma": 2.0, "gamma0": 7.0, "eps": 0.0, "delta": 0.0},
    "step": {"scheme": "explicit-rk2", "cfl": 0.4, "dt_max": 1.0,
             "density_floor": 1e-10, "t_end": 1.0, "sample_every": 0.05,
             "checkpoint_every": None, "freeze": []},
    "initial": {"kind": "sine-perturbation", "mollify": "auto"},
    "sweep": None,
    "output": {"directory": "out"},
}


@dataclass
class InitialSpec:
    kind: str
    options: dict
    mollify: str  # auto | always | never


@dataclass
class SweepSpec:
    axis: str     # eps | delta
    values: list[float]


@dataclass
class ExperimentConfig:
    grid: PeriodicGrid
    params: ModelParams
    step: StepConfig
    initial: InitialSpec
    sweep: SweepSpec | None
    output_dir: str
    seed: int
    resolved: dict  # full config echo including defaulted fields


def _require_keys(section: dict, allowed, where: str):
    for k in section:
        if k not in allowed:
            raise ConfigError(f"unknown key '{k}' in {where} (allowed: {sorted(allowed)})")


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{where} must be a number, got {x!r}")
    return float(x)


def _integer(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{where} must be an integer, got {x!r}")
    return x


def _merge(defaults: dict, given: dict, where: str) -> dict:
    _require_keys(given, defaults.keys(), where)
    out = copy.deepcopy(defaults)
    out.update(given)
    return out


def load_config_dict(doc: dict, base_dir: str = ".") -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping at top level")
    _require_keys(doc, _DEFAULTS.keys(), "the top level")

    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version} (this build reads {SCHEMA_VERSION})")

    grid_sec = _merge(_DEFAULTS["grid"], doc.get("grid") or {}, "section 'grid'")
    par_sec = _merge(_DEFAULTS["params"], doc.get("params") or {}, "section 'params'")
    step_sec = _merge(_DEFAULTS["step"], doc.get("step") or {}, "section 'step'")
    out_sec = _merge(_DEFAULTS["output"], doc.get("output") or {}, "section 'output'")
    seed = _integer(doc.get("seed", _DEFAULTS["seed"]), "seed")

    try:
        grid = PeriodicGrid(_integer(grid_sec["dim"], "grid.dim"),
                            _integer(grid_sec["n"], "grid.n"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    kappa = _number(par_sec["kappa"], "params.kappa")
    if not kappa > 0:
        raise ConfigError(f"params.kappa violates the constraint kappa > 0 (got {kappa})")
    try:
        params = ModelParams(
            kappa=kappa,
            eta=_number(par_sec["eta"], "params.eta"),
            mu=_number(par_sec["mu"], "params.mu"),
            lam=_number(par_sec["lambda"], "params.lambda"),
            A=_number(par_sec["A"], "params.A"),
            gamma=_number(par_sec["gamma"], "params.gamma"),
            gamma0=_number(par_sec["gamma0"], "params.gamma0"),
            eps=_number(par_sec["eps"], "params.eps"),
            delta=_number(par_sec["delta"], "params.delta"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    freeze = step_sec["freeze"]
    if not isinstance(freeze, list) or not all(isinstance(f, str) for f in freeze):
        raise ConfigError("step.freeze must be a list of field names")
    ckpt = step_sec["checkpoint_every"]
    try:
        step = StepConfig(
            scheme=str(step_sec["scheme"]),
            cfl=_number(step_sec["cfl"], "step.cfl"),
            dt_max=_number(step_sec["dt_max"], "step.dt_max"),
            density_floor=_number(step_sec["density_floor"], "step.density_floor"),
            t_end=_number(step_sec["t_end"], "step.t_end"),
            sample_every=_number(step_sec["sample_every"], "step.sample_every"),
            freeze=tuple(freeze),
            checkpoint_every=None if ckpt is None else _number(ckpt, "step.checkpoint_every"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    init_raw = doc.get("initial") or {}
    if not isinstance(init_raw, dict):
        raise ConfigError("section 'initial' must be a mapping")
    kind = init_raw.get("kind", _DEFAULTS["initial"]["kind"])
    if kind not in GENERATOR_OPTIONS:
        raise ConfigError(f"initial.kind {kind!r} unknown (choose from {sorted(GENERATOR_OPTIONS)})")
    allowed = {"kind", "mollify", *GENERATOR_OPTIONS[kind]}
    _require_keys(init_raw, allowed, f"section 'initial' for kind '{kind}'")
    mollify = init_raw.get("mollify", "auto")
    if mollify not in ("auto", "always", "never"):
        raise ConfigError(f"initial.mollify must be auto|always|never, got {mollify!r}")
    options = {k: copy.deepcopy(v) for k, v in GENERATOR_OPTIONS[kind].items()}
    for k in GENERATOR_OPTIONS[kind]:
        if k in init_raw:
            options[k] = init_raw[k]
    if kind == "snapshot":
        if not options["path"]:
            raise ConfigError("initial.kind=snapshot requires initial.path")
        options["path"] = os.path.normpath(os.path.join(base_dir, str(options["path"])))
        if not os.path.exists(options["path"]):
            raise ConfigError(f"initial.path does not exist: {options['path']}")
    if mollify == "always" and params.delta <= 0:
        raise ConfigError("initial.mollify=always needs params.delta > 0 (the kernel is delta-indexed)")
    initial = InitialSpec(kind, options, mollify)

    sweep = None
    sweep_raw = doc.get("sweep")
    if sweep_raw is not None:
        if not isinstance(sweep_raw, dict):
            raise ConfigError("section 'sweep' must be a mapping")
        _require_keys(sweep_raw, {"axis", "values"}, "section 'sweep'")
        axis = sweep_raw.get("axis")
        if axis not in ("eps", "delta"):
            raise ConfigError(f"sweep.axis must be 'eps' or 'delta', got {axis!r}")
        values = sweep_raw.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values must be a nonempty list")
        vals = [_number(v, "sweep.values") for v in values]
        if any(v <= 0 for v in vals):
            raise ConfigError("sweep.values must be positive (the sweep approaches 0 from above)")
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise ConfigError("sweep.values must be strictly decreasing toward 0")
        sweep = SweepSpec(axis, vals)

    resolved = {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "grid": grid_sec,
        "params": par_sec,
        "step": {**step_sec, "freeze": list(freeze)},
        "initial": {"kind": kind, "mollify": mollify, **options},
        "sweep": None if sweep is None else {"axis": sweep.axis, "values": sweep.values},
        "output": out_sec,
    }
    return ExperimentConfig(grid, params, step, initial, sweep,
                            str(out_sec["directory"]), seed, resolved)


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    """Apply repeatable ``section.key=value`` edits (values parsed as YAML)."""
    doc = copy.deepcopy(doc)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        path, _, raw_val = item.partition("=")
        try:
            value = yaml.safe_load(raw_val)
        except yaml.YAMLError as exc:
            raise ConfigError(f"override value {raw_val!r} is not valid YAML: {exc}") from None
        keys = path.strip().split(".")
        if not all(keys):
            raise ConfigError(f"override path {path!r} is malformed")
        node = doc
        for k in keys[:-1]:
            nxt = node.get(k)
            if nxt is None:
                nxt = node[k] = {}
            if not isinstance(nxt, dict):
                raise ConfigError(f"override path {path!r} descends into a non-mapping")
            node = nxt
        node[keys[-1]] = value
    return doc


def load_config(path: str, overrides: list[str] | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from None
    if doc is None:
        doc = {}
    if overrides:
        doc = apply_overrides(doc, overrides)
    return load_config_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))
