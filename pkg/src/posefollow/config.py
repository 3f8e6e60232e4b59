"""Run configuration: strict schema validation, semantic checks, hashing.

Configs are JSON objects with an explicit schema_version. Unknown fields
are rejected everywhere, so a typo fails loudly instead of silently using
a default. The config hash is the sha256 of the canonical serialization
of the raw object and is carried into every exported summary, tying
artifacts back to the exact inputs that produced them.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import jsonschema
import numpy as np

from .controller import ControlGains, DistanceMap, VelocityProfile, distance_map_preset
from .errors import ConfigInvalid, SchemaMismatch
from .reference import (
    GeometricReference,
    build_helix3d,
    build_sinusoid2d,
    build_spline_reference,
    load_spline_samples,
)
from .rigid_body import BodyParams, make_state
from .tolerances import CONVERGENCE_SUSTAIN_S, CONVERGENCE_TOL

SCHEMA_VERSION = 1

_NUM = {"type": "number"}
_VEC3 = {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3}
_VEC4 = {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4}
_GAIN = {"oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 6, "maxItems": 6}]}
_SPAN = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "reference", "gains", "mode", "initial_state", "sim"],
    "properties": {
        "schema_version": {"type": "integer"},
        "label": {"type": "string"},
        "reference": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["helix3d", "sinusoid2d", "spline"]},
                "radius": _NUM,
                "climb": _NUM,
                "wave_amplitude": _NUM,
                "wave_frequency": _NUM,
                "stretch": _NUM,
                "amplitude": _NUM,
                "frequency": _NUM,
                "theta_span": _SPAN,
                "samples_file": {"type": "string"},
            },
        },
        "gains": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kp", "kv"],
            "properties": {"kp": _GAIN, "kv": _GAIN, "k_theta": _NUM},
        },
        "mode": {"enum": ["velocity", "distance", "tracking"]},
        "profile": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "base"],
            "properties": {
                "kind": {"enum": ["constant", "sinusoidal"]},
                "base": _NUM,
                "amplitude": _NUM,
                "frequency": _NUM,
            },
        },
        "distance_map": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["preset"],
                    "properties": {"preset": {"type": "string"}, "v_nom": _NUM, "v_min": _NUM},
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["v_nom", "v_min", "d_scale"],
                    "properties": {"v_nom": _NUM, "v_min": _NUM, "d_scale": _NUM},
                },
            ]
        },
        "lambda_switch": {"type": "boolean"},
        "body": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mass": _NUM,
                "inertia": {
                    "oneOf": [
                        _VEC3,
                        {"type": "array", "items": _VEC3, "minItems": 3, "maxItems": 3},
                    ]
                },
            },
        },
        "initial_state": {
            "type": "object",
            "additionalProperties": False,
            "required": ["p", "v", "q", "w"],
            "properties": {"p": _VEC3, "v": _VEC3, "q": _VEC4, "w": _VEC3},
        },
        "initial_theta": _NUM,
        "initial_theta_dot": _NUM,
        "sim": {
            "type": "object",
            "additionalProperties": False,
            "required": ["duration"],
            "properties": {"duration": _NUM, "dt": _NUM, "export_rate": _NUM},
        },
        "disturbance": {
            "type": ["object", "null"],
            "additionalProperties": False,
            "properties": {
                "theta_trigger": _NUM,
                "time_trigger": _NUM,
                "dv": _VEC3,
                "dw": _VEC3,
            },
        },
        "convergence": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"tol": _NUM, "sustain": _NUM},
        },
    },
}

_REFERENCE_FIELDS = {
    "helix3d": {"radius", "climb", "wave_amplitude", "wave_frequency", "theta_span"},
    "sinusoid2d": {"stretch", "amplitude", "frequency", "theta_span"},
    "spline": {"samples_file"},
}


@dataclass(frozen=True)
class Disturbance:
    """One-shot velocity impulse, triggered on theta or on time."""

    dv: np.ndarray
    dw: np.ndarray
    theta_trigger: Optional[float] = None
    time_trigger: Optional[float] = None

    def __post_init__(self):
        dv = np.asarray(self.dv, dtype=float).reshape(3).copy()
        dw = np.asarray(self.dw, dtype=float).reshape(3).copy()
        if not (np.all(np.isfinite(dv)) and np.all(np.isfinite(dw))):
            raise ConfigInvalid("disturbance impulses must be finite")
        dv.flags.writeable = False
        dw.flags.writeable = False
        object.__setattr__(self, "dv", dv)
        object.__setattr__(self, "dw", dw)
        has_theta = self.theta_trigger is not None
        has_time = self.time_trigger is not None
        if has_theta == has_time:
            raise ConfigInvalid("disturbance needs exactly one of theta_trigger, time_trigger")
        trig = self.theta_trigger if has_theta else self.time_trigger
        if not math.isfinite(float(trig)):
            raise ConfigInvalid("disturbance trigger must be finite")


@dataclass
class RunConfig:
    """Fully resolved, validated inputs for one closed-loop run."""

    label: str
    raw: dict
    config_hash: str
    reference: GeometricReference
    gains: ControlGains
    params: BodyParams
    mode: str
    profile: Union[VelocityProfile, DistanceMap, None]
    lambda_enabled: bool
    x0: np.ndarray
    theta0: float
    theta_dot0: float
    duration: float
    dt: float
    export_stride: int
    disturbance: Optional[Disturbance]
    convergence_tol: float = CONVERGENCE_TOL
    convergence_sustain: float = CONVERGENCE_SUSTAIN_S


def config_hash(obj: dict) -> str:
    canon = json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _build_reference(spec: dict, base_dir: Path) -> GeometricReference:
    kind = spec["kind"]
    extra = set(spec) - {"kind"} - _REFERENCE_FIELDS[kind]
    if extra:
        raise ConfigInvalid(f"fields {sorted(extra)} do not apply to reference kind {kind!r}")
    span = spec.get("theta_span")
    if span is not None:
        span = (float(span[0]), float(span[1]))
        if not span[0] < span[1]:
            raise ConfigInvalid("theta_span must be strictly increasing")
    if kind == "helix3d":
        kwargs = {}
        for k in ("radius", "climb", "wave_amplitude", "wave_frequency"):
            if k in spec:
                kwargs[k] = float(spec[k])
        if span is not None:
            kwargs["theta_span"] = span
        return build_helix3d(**kwargs)
    if kind == "sinusoid2d":
        kwargs = {}
        for k in ("stretch", "amplitude", "frequency"):
            if k in spec:
                kwargs[k] = float(spec[k])
        if span is not None:
            kwargs["theta_span"] = span
        return build_sinusoid2d(**kwargs)
    if "samples_file" not in spec:
        raise ConfigInvalid("spline reference requires samples_file")
    path = Path(spec["samples_file"])
    if not path.is_absolute():
        path = base_dir / path
    return build_spline_reference(load_spline_samples(path))


def _build_profile(obj: dict, mode: str):
    if mode == "velocity":
        if "profile" not in obj:
            raise ConfigInvalid("velocity mode requires a profile section")
        if "distance_map" in obj:
            raise ConfigInvalid("velocity mode does not take a distance_map")
        return VelocityProfile(**obj["profile"])
    if mode == "distance":
        if "distance_map" not in obj:
            raise ConfigInvalid("distance mode requires a distance_map section")
        if "profile" in obj:
            raise ConfigInvalid("distance mode does not take a profile")
        dm = obj["distance_map"]
        if "preset" in dm:
            kwargs = {k: float(dm[k]) for k in ("v_nom", "v_min") if k in dm}
            return distance_map_preset(dm["preset"], **kwargs)
        return DistanceMap(**dm)
    if "profile" in obj or "distance_map" in obj:
        raise ConfigInvalid("tracking mode takes neither a profile nor a distance_map")
    return None


def _build_disturbance(obj, reference: GeometricReference) -> Optional[Disturbance]:
    if obj is None:
        return None
    d = Disturbance(
        dv=np.asarray(obj.get("dv", (0.0, 0.0, 0.0)), dtype=float),
        dw=np.asarray(obj.get("dw", (0.0, 0.0, 0.0)), dtype=float),
        theta_trigger=obj.get("theta_trigger"),
        time_trigger=obj.get("time_trigger"),
    )
    if d.theta_trigger is not None and not (
        reference.theta0 <= d.theta_trigger <= reference.theta_f
    ):
        raise ConfigInvalid("theta_trigger lies outside the reference span")
    if d.time_trigger is not None and d.time_trigger < 0.0:
        raise ConfigInvalid("time_trigger must be non-negative")
    return d


def parse_config(obj: dict, base_dir: Union[str, Path] = ".") -> RunConfig:
    if not isinstance(obj, dict):
        raise ConfigInvalid("config root must be an object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(f"expected schema_version {SCHEMA_VERSION}, got {version!r}")
    try:
        jsonschema.validate(obj, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        loc = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigInvalid(f"config field {loc}: {e.message}") from None

    base_dir = Path(base_dir)
    reference = _build_reference(obj["reference"], base_dir)
    gains = ControlGains(
        kp=obj["gains"]["kp"],
        kv=obj["gains"]["kv"],
        k_theta=obj["gains"].get("k_theta", 1.0),
    )
    mode = obj["mode"]
    profile = _build_profile(obj, mode)

    body = obj.get("body", {})
    mass = float(body.get("mass", 1.0))
    inertia = np.asarray(body.get("inertia", (0.01, 0.01, 0.01)), dtype=float)
    if inertia.shape == (3,):
        inertia = np.diag(inertia)
    params = BodyParams(mass=mass, inertia=inertia)

    init = obj["initial_state"]
    q = np.asarray(init["q"], dtype=float)
    qn = np.linalg.norm(q)
    if abs(qn - 1.0) > 1e-6:
        raise ConfigInvalid("initial attitude quaternion is not unit length")
    x0 = make_state(init["p"], init["v"], q / qn, init["w"])
    if not np.all(np.isfinite(x0)):
        raise ConfigInvalid("initial state has non-finite components")

    theta0 = float(obj.get("initial_theta", reference.theta0))
    if not (reference.theta0 <= theta0 <= reference.theta_f):
        raise ConfigInvalid("initial_theta lies outside the reference span")
    theta_dot0 = float(obj.get("initial_theta_dot", 0.0))
    if not math.isfinite(theta_dot0):
        raise ConfigInvalid("initial_theta_dot must be finite")
    if mode == "tracking" and theta_dot0 <= 0.0:
        raise ConfigInvalid("tracking mode needs a positive initial_theta_dot clock rate")

    sim = obj["sim"]
    duration = float(sim["duration"])
    dt = float(sim.get("dt", 1e-3))
    export_rate = float(sim.get("export_rate", 100.0))
    if not (duration > 0.0 and math.isfinite(duration)):
        raise ConfigInvalid("duration must be positive and finite")
    if not (0.0 < dt <= duration):
        raise ConfigInvalid("dt must be positive and no larger than duration")
    if not (export_rate > 0.0 and math.isfinite(export_rate)):
        raise ConfigInvalid("export_rate must be positive")
    stride = max(1, round(1.0 / (export_rate * dt)))

    conv = obj.get("convergence", {})
    tol = float(conv.get("tol", CONVERGENCE_TOL))
    sustain = float(conv.get("sustain", CONVERGENCE_SUSTAIN_S))
    if tol <= 0.0 or sustain < 0.0:
        raise ConfigInvalid("convergence tol must be > 0 and sustain >= 0")

    return RunConfig(
        label=obj.get("label", "run"),
        raw=obj,
        config_hash=config_hash(obj),
        reference=reference,
        gains=gains,
        params=params,
        mode=mode,
        profile=profile,
        lambda_enabled=bool(obj.get("lambda_switch", True)),
        x0=x0,
        theta0=theta0,
        theta_dot0=theta_dot0,
        duration=duration,
        dt=dt,
        export_stride=stride,
        disturbance=_build_disturbance(obj.get("disturbance"), reference),
        convergence_tol=tol,
        convergence_sustain=sustain,
    )


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigInvalid(f"cannot read config file {path}: {e}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigInvalid(f"config file {path} is not valid JSON: {e}") from None
    return parse_config(obj, base_dir=path.parent)
