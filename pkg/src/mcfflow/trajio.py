"""Persistence and report emission.

Trajectory files are line-delimited JSON: a header record first (schema
version "mcfflow/1"), then one snapshot per line.  Floats are serialized
with 17 significant digits, which round-trips every double bit-exactly, so
read(write(x)) == x on all numeric fields.  Geometry payloads reject
NaN/Inf on both write and read.  Outputs carry no timestamps; provenance is
a config hash plus the seed, so reruns are byte-identical.
"""

from __future__ import annotations

import hashlib
import io
import json
import math

import jsonschema
import numpy as np

from .bodies import CapState, MODE_AXISYM, MODE_CURVE, SupportProfile
from .engine import FlowControls, TimeSlice, Trajectory

SCHEMA_VERSION = "mcfflow/1"

REPR_CURVE = "support_curve"
REPR_AXISYM = "axisym_profile"
REPR_CAP = "cap"


class SchemaMismatchError(ValueError):
    """File schema version differs from mcfflow/1."""


class CorruptRecordError(ValueError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _fmt_float(x):
    if not math.isfinite(x):
        raise ValueError("non-finite value in numeric payload")
    return float(f"{float(x):.17g}")


def _clean(obj):
    """Normalize a payload tree: numpy -> python, floats to 17 digits."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return _fmt_float(float(obj))
    if isinstance(obj, (np.integer, int)) or obj is None or isinstance(obj, (str, bool)):
        return int(obj) if isinstance(obj, np.integer) else obj
    raise TypeError(f"unserializable value of type {type(obj)!r}")


def _dumps(payload):
    return json.dumps(_clean(payload), allow_nan=False, separators=(",", ":"))


def _controls_payload(controls):
    if controls is None:
        return None
    return {"cfl": controls.cfl, "max_dt": controls.max_dt,
            "stop_rho_plus": controls.stop_rho_plus,
            "snapshot_stride": controls.snapshot_stride,
            "refinement": controls.refinement}


def _slice_payload(sl, n, gauge):
    body = sl.body
    if isinstance(body, CapState):
        rec = {"t": sl.t, "repr": REPR_CAP, "n": body.n, "N": 1,
               "data": [body.rho], "R": body.R}
    elif body.mode == MODE_CURVE:
        rec = {"t": sl.t, "repr": REPR_CURVE, "n": 1, "N": body.N,
               "data": list(body.h)}
    else:
        rec = {"t": sl.t, "repr": REPR_AXISYM, "n": body.n, "N": body.N,
               "data": list(body.h)}
    if sl.shift is not None:
        shift = sl.shift
        rec["shift"] = list(np.atleast_1d(np.asarray(shift, dtype=float)))
    rec["gauge"] = gauge
    return rec


def write_trajectory(traj, path):
    """Write a trajectory as header + one snapshot record per line."""
    meta = traj.meta or {}
    gauge = {
        "t_ext_estimate": meta.get("s_ext"),
        "recentered": any(s.shift is not None for s in traj.slices),
    }
    header = {
        "schema": SCHEMA_VERSION,
        "kind": "trajectory",
        "engine": meta.get("engine", traj.engine),
        "n": traj.n,
        "N": traj.N,
        "count": len(traj.slices),
        "controls": _controls_payload(meta.get("controls")),
        "gauge": gauge,
        "provenance": {
            "seed": meta.get("seed"),
            "config_hash": meta.get("config_hash"),
            "user_t0": meta.get("user_t0"),
        },
        "ambient_R": meta.get("R"),
    }
    with open(path, "w") as f:
        f.write(_dumps(header) + "\n")
        for sl in traj.slices:
            f.write(_dumps(_slice_payload(sl, traj.n, gauge)) + "\n")


def _parse_line(line, line_no):
    try:
        return json.loads(line, parse_constant=_reject_constant)
    except ValueError as err:
        raise CorruptRecordError(line_no, f"invalid JSON ({err})") from None


def _reject_constant(name):
    raise ValueError(f"non-finite constant {name!r} in payload")


def _check_finite(values, line_no):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise CorruptRecordError(line_no, "non-finite geometry payload")
    return arr


def read_trajectory(path):
    """Read a trajectory file; bit-exact inverse of write_trajectory."""
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines:
        raise SchemaMismatchError("empty file")
    header = _parse_line(lines[0], 1)
    if header.get("schema") != SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"schema {header.get('schema')!r} is not {SCHEMA_VERSION!r}")
    engine_kind = header.get("engine", "curve")
    slices = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise CorruptRecordError(i, "blank record")
        rec = _parse_line(line, i)
        for key in ("t", "repr", "n", "N", "data"):
            if key not in rec:
                raise CorruptRecordError(i, f"missing field {key!r}")
        data = _check_finite(rec["data"], i)
        repr_kind = rec["repr"]
        if repr_kind == REPR_CAP:
            if len(data) != 1:
                raise CorruptRecordError(i, "cap record needs one value")
            body = CapState(float(rec["R"]), int(rec["n"]), float(data[0]))
        elif repr_kind == REPR_CURVE:
            if len(data) != int(rec["N"]):
                raise CorruptRecordError(i, "data length does not match N")
            body = SupportProfile(MODE_CURVE, 1, data)
        elif repr_kind == REPR_AXISYM:
            if len(data) != int(rec["N"]) + 1:
                raise CorruptRecordError(i, "data length does not match N+1")
            body = SupportProfile(MODE_AXISYM, int(rec["n"]), data)
        else:
            raise CorruptRecordError(i, f"unknown repr {repr_kind!r}")
        shift = rec.get("shift")
        if shift is not None:
            shift = _check_finite(shift, i)
            shift = shift if repr_kind == REPR_CURVE else float(shift[0])
        slices.append(TimeSlice(float(rec["t"]), body, shift))
    count = header.get("count")
    if count is not None and count != len(slices):
        raise CorruptRecordError(len(lines), f"expected {count} records, "
                                 f"found {len(slices)}")
    controls = header.get("controls")
    meta = {
        "engine": engine_kind,
        "s_ext": (header.get("gauge") or {}).get("t_ext_estimate"),
        "seed": (header.get("provenance") or {}).get("seed"),
        "config_hash": (header.get("provenance") or {}).get("config_hash"),
        "user_t0": (header.get("provenance") or {}).get("user_t0"),
        "R": header.get("ambient_R"),
    }
    if controls:
        meta["controls"] = FlowControls(**controls)
    n = int(header.get("n", slices[0].body.n if slices else 1))
    return Trajectory(slices, engine_kind if engine_kind in (MODE_CURVE, MODE_AXISYM, "cap")
                      else slices_mode(slices), n, header.get("N"), meta)


def slices_mode(slices):
    body = slices[0].body
    if isinstance(body, CapState):
        return "cap"
    return body.mode


def write_slice(sl, path, engine_kind=None, n=None):
    """Write a single snapshot as a one-record trajectory file."""
    body = sl.body
    if isinstance(body, CapState):
        kind, nn, N = "cap", body.n, None
    else:
        kind, nn, N = body.mode, body.n, body.N
    traj = Trajectory([sl], engine_kind or kind, n or nn, N, {"engine": engine_kind or kind})
    write_trajectory(traj, path)


def read_slice(path):
    traj = read_trajectory(path)
    if len(traj.slices) != 1:
        raise ValueError(f"{path} holds {len(traj.slices)} snapshots, expected 1")
    return traj.slices[0]


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def emit_report(report, path, format="json"):
    """Write a report object (anything with .payload() or a dict) stably.

    JSON keeps insertion order; CSV expects a payload of the form
    {"columns": [...], "rows": [[...], ...]} and writes one line per row.
    """
    payload = report.payload() if hasattr(report, "payload") else report
    if format == "json":
        with open(path, "w") as f:
            f.write(_dumps(payload) + "\n")
        return
    if format == "csv":
        if not (isinstance(payload, dict) and "columns" in payload and "rows" in payload):
            raise ValueError("CSV reports need 'columns' and 'rows'")
        buf = io.StringIO()
        buf.write(",".join(payload["columns"]) + "\n")
        for row in payload["rows"]:
            cells = []
            for v in row:
                if v is None:
                    cells.append("")
                elif isinstance(v, str):
                    cells.append(v)
                else:
                    cells.append(f"{_fmt_float(float(v)):.17g}")
            buf.write(",".join(cells) + "\n")
        with open(path, "w") as f:
            f.write(buf.getvalue())
        return
    raise ValueError(f"unknown report format {format!r}")


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["engine", "n", "t0"],
    "properties": {
        "engine": {"enum": ["curve", "axisym", "cap"]},
        "n": {"type": "integer", "minimum": 1},
        "N": {"type": "integer", "minimum": 16},
        "t0": {"type": "number", "exclusiveMaximum": 0},
        "t_stop": {"type": "number"},
        "controls": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
                "max_dt": {"type": "number", "exclusiveMinimum": 0},
                "stop_rho_plus": {"type": "number", "exclusiveMinimum": 0},
                "snapshot_stride": {"type": "integer", "minimum": 1},
                "refinement": {"type": "integer", "minimum": 16},
            },
        },
        "cap": {
            "type": "object",
            "additionalProperties": False,
            "required": ["R", "rho0"],
            "properties": {
                "R": {"type": "number", "exclusiveMinimum": 0},
                "rho0": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "initial": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "family": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["sphere", "oval"]},
                        "t": {"type": "number", "exclusiveMaximum": 0},
                        "scale": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "file": {"type": "string"},
                "random": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "seed": {"type": "integer", "minimum": 0},
                        "modes": {"type": "integer", "minimum": 2},
                        "amplitude": {"type": "number",
                                      "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                        "radius": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            },
        },
        "diagnostics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sigma": {"type": "number", "minimum": 0},
                "p": {"type": "number", "exclusiveMinimum": 0},
                "k": {"type": "integer", "minimum": 1},
                "eta": {"type": "number", "minimum": 0},
            },
        },
        "verdicts": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "growth_ratio": {"type": "number", "exclusiveMinimum": 1},
                "slope_threshold": {"type": "number", "exclusiveMinimum": 0},
                "hard_caps": {"type": "object",
                              "additionalProperties": {"type": "number"}},
            },
        },
    },
}


def load_config(path):
    """Load and validate a run configuration; returns (config, hash)."""
    with open(path) as f:
        try:
            cfg = json.load(f, parse_constant=_reject_constant)
        except ValueError as err:
            raise ValueError(f"{path}: invalid JSON ({err})") from None
    validate_config(cfg)
    return cfg, config_hash(cfg)


def validate_config(cfg):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as err:
        raise ValueError(f"invalid config: {err.message}") from None


def config_hash(cfg):
    """Cryptographic digest of the canonicalized config (provenance tag)."""
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"),
                           allow_nan=False)
    return hashlib.sha256(canonical.encode()).hexdigest()
