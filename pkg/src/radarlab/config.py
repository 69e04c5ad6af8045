"""JSON run configuration: schema, loading, and conversion to PipelineConfig.

Unknown fields are rejected.  ``--config`` accepts either a file path or the
name of a bundled configuration (see ``bundled_configs()``).
"""
from importlib import resources
import json
from pathlib import Path

import jsonschema

from .dc_estimation import GdConfig
from .digital_if import IfParams
from .errors import ConfigError, DomainError
from .io import read_truth_csv
from .motion import PendulumSpec, SinusoidSpec
from .pipeline import AnalysisConfig, PipelineConfig
from .radar_model import RadarParams

SCHEMA_VERSION = 1

_num = {"type": "number"}
_band = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


SCHEMA = _obj(
    {
        "schema_version": {"const": SCHEMA_VERSION},
        "description": {"type": "string"},
        "radar": _obj({
            "carrier_freq": _num, "theta0": _num, "amp_i": _num, "amp_q": _num,
            "dc_i": _num, "dc_q": _num, "noise_std": _num, "phase_noise_std": _num,
            "rng_seed": {"type": "integer", "minimum": 0},
        }, required=["carrier_freq"]),
        "motion": {"oneOf": [
            _obj({"type": {"const": "pendulum"}, "arm_length": _num, "initial_amplitude": _num,
                  "decay_time": _num, "initial_phase": _num, "gravity": _num},
                 required=["type", "arm_length", "initial_amplitude", "decay_time"]),
            _obj({"type": {"const": "sinusoid"}, "amplitude": _num, "freq": _num, "phase": _num},
                 required=["type", "amplitude", "freq"]),
            _obj({"type": {"const": "trace"}, "path": {"type": "string"}}, required=["type", "path"]),
        ]},
        "path": {"enum": ["direct_baseband", "digital_if"]},
        "if_params": _obj({
            "if_freq": _num, "if_sample_rate": _num, "decimation": {"type": "integer"},
            "signal_amp": _num, "clutter_amp": _num, "clutter_phase": _num,
            "lpf_taps": {"type": "integer"}, "lpf_cutoff": _num,
        }),
        "gd": _obj({"learning_rate": _num, "max_iterations": {"type": "integer"},
                    "grad_tolerance": _num, "parameter_tolerance": _num}),
        "duration": _num,
        "baseband_rate": _num,
        "n_segments": {"type": "integer"},
        "demod_method": {"enum": ["arctangent", "dacm", "both"]},
        "analysis": _obj({"search_band": _band, "noise_band": _band, "harmonic_count": {"type": "integer"}}),
    },
    required=["schema_version", "radar", "motion"],
)


def bundled_configs():
    """Names of the configurations shipped with the package."""
    root = resources.files("radarlab") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _field_name(err):
    if err.validator == "required":
        return err.message.split("'")[1]
    if err.validator == "additionalProperties":
        return err.message.split("'")[1]
    path = [str(p) for p in err.absolute_path]
    return ".".join(path) if path else None


def _describe(err):
    where = "/".join(str(p) for p in err.absolute_path) or "<root>"
    if err.validator == "required":
        return f"missing required field '{_field_name(err)}' in {where}"
    if err.validator == "additionalProperties":
        return f"unknown field in {where}: {err.message}"
    if err.validator == "oneOf" and list(err.absolute_path) == ["motion"]:
        best = jsonschema.exceptions.best_match(err.context) if err.context else None
        return f"invalid motion description: {best.message if best else err.message}"
    return f"invalid value at {where}: {err.message}"


def validate(raw):
    """Validate a parsed JSON document against the schema; raise ConfigError on failure."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: (len(e.absolute_path), e.path))
    if errors:
        err = errors[0]
        raise ConfigError(_describe(err), field=_field_name(err))


def load_raw(spec):
    """Read a config by path or bundled name; returns (dict, source label, base directory)."""
    path = Path(spec)
    if path.is_file():
        text, base = path.read_text(encoding="utf-8"), path.parent
    elif spec in bundled_configs():
        text = (resources.files("radarlab") / "configs" / f"{spec}.json").read_text(encoding="utf-8")
        base = Path(".")
    else:
        raise ConfigError(f"config '{spec}' is neither a file nor a bundled config "
                          f"({', '.join(bundled_configs())})")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{spec}: JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}")
    validate(raw)
    return raw, base


def _motion(raw, base, rate):
    kind = raw["type"]
    body = {k: v for k, v in raw.items() if k != "type"}
    if kind == "pendulum":
        return PendulumSpec(**body)
    if kind == "sinusoid":
        return SinusoidSpec(**body)
    p = Path(body["path"])
    return read_truth_csv(p if p.is_absolute() else base / p, rate)


def to_pipeline_config(raw, base=Path("."), seed=None):
    """Build a PipelineConfig from a validated dict; ``seed`` overrides radar.rng_seed."""
    try:
        radar_raw = dict(raw["radar"])
        if seed is not None:
            radar_raw["rng_seed"] = int(seed)
        rate = float(raw.get("baseband_rate", 100.0))
        an = raw.get("analysis", {})
        return PipelineConfig(
            radar=RadarParams(**radar_raw),
            motion=_motion(raw["motion"], base, rate),
            path=raw.get("path", "direct_baseband"),
            if_params=IfParams(**raw["if_params"]) if "if_params" in raw else None,
            gd=GdConfig(**raw.get("gd", {})),
            duration=float(raw.get("duration", 120.0)),
            baseband_rate=rate,
            n_segments=int(raw.get("n_segments", 5)),
            demod_method=raw.get("demod_method", "dacm"),
            analysis=AnalysisConfig(
                search_band=tuple(an.get("search_band", (0.5, 10.0))),
                noise_band=tuple(an["noise_band"]) if "noise_band" in an else None,
                harmonic_count=int(an.get("harmonic_count", 3)),
            ),
        )
    except DomainError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_config(spec, seed=None):
    raw, base = load_raw(spec)
    return to_pipeline_config(raw, base, seed)
