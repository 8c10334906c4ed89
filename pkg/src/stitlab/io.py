"""File formats: tessellations, event logs, trajectories, reports, configs.

Coordinates are stored as ``"p/q"`` strings, so a write-then-read round
trip reproduces the geometry exactly.  Configs are JSON documents.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .geometry import ConvexPolytope, Direction, Hyperplane, Q, format_scalar
from .measure import DrivingMeasure, measure_from_spec
from .stit import JumpEvent
from .tessellation import Tessellation

CONFIG_ENV = "STITLAB_CONFIG"


class ConfigError(ValueError):
    """Malformed config; the message starts with the offending field path."""


# ---------------------------------------------------------------- tessellations


def _points(P: ConvexPolytope) -> list:
    return [[format_scalar(c) for c in v] for v in P.vertices]


def _polytope(points, path: str) -> ConvexPolytope:
    try:
        pts = [tuple(Q(c) for c in p) for p in points]
        if pts and len(pts[0]) == 1:
            if len(pts) != 2:
                raise ValueError("an interval needs exactly two endpoints")
            lo, hi = sorted(p[0] for p in pts)
            return ConvexPolytope.interval(lo, hi)
        return ConvexPolytope.from_vertices(pts)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def tessellation_to_dict(T: Tessellation, meta: Optional[dict] = None) -> dict:
    return {
        "dim": T.dim,
        "window": {"vertices": _points(T.window)},
        "cells": [{"vertices": _points(C), "key": C.key.decode("ascii")} for C in T.cells],
        "meta": dict(meta or {}),
    }


def tessellation_from_dict(d: dict) -> Tessellation:
    W = _polytope(d["window"]["vertices"], "window.vertices")
    cells = []
    for i, c in enumerate(d["cells"]):
        C = _polytope(c["vertices"], f"cells[{i}].vertices")
        if "key" in c and c["key"] != C.key.decode("ascii"):
            raise ConfigError(f"cells[{i}].key: does not match the cell geometry")
        cells.append(C)
    if W.dim != d.get("dim", W.dim):
        raise ConfigError("dim: disagrees with the cell coordinates")
    return Tessellation(W, cells)


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def write_tessellation(path, T: Tessellation, meta: Optional[dict] = None) -> None:
    write_json(path, tessellation_to_dict(T, meta))


def read_tessellation(path) -> tuple:
    """``(tessellation, meta)`` from a tessellation file."""
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    return tessellation_from_dict(d), d.get("meta", {})


# ---------------------------------------------------------------- event logs


def event_to_dict(e: JumpEvent) -> dict:
    return {
        "time": e.time,
        "parent_key": e.parent_key.decode("ascii"),
        "normal": list(e.hyperplane.normal.components),
        "offset": format_scalar(e.hyperplane.offset),
        "child_keys": [k.decode("ascii") for k in e.child_keys],
    }


def event_from_dict(d: dict) -> JumpEvent:
    normal = tuple(int(c) for c in d["normal"])
    u = Direction.of(*normal)
    if u.components != normal:
        raise ConfigError("normal: not a reduced integer direction")
    H = Hyperplane(u, Q(d["offset"]))
    return JumpEvent(float(d["time"]), d["parent_key"].encode("ascii"), H,
                     tuple(k.encode("ascii") for k in d["child_keys"]))


def write_events(path, events) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in events:
            fh.write(json.dumps(event_to_dict(e), sort_keys=True) + "\n")


def read_events(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [event_from_dict(json.loads(line)) for line in fh if line.strip()]


# ---------------------------------------------------------------- sequences and reports


def trajectory_to_dict(values: dict, provenance=(), meta: Optional[dict] = None) -> dict:
    return {
        "meta": dict(meta or {}),
        "provenance": list(provenance),
        "states": [{"index": n, "tessellation": tessellation_to_dict(values[n])} for n in sorted(values)],
    }


def trajectory_from_dict(d: dict) -> dict:
    return {s["index"]: tessellation_from_dict(s["tessellation"]) for s in d["states"]}


# ---------------------------------------------------------------- configs


@dataclass(frozen=True)
class Config:
    dimension: int
    window: ConvexPolytope
    measure: DrivingMeasure
    a: object
    time: float
    steps: int
    seed: int
    budget: int
    horizon: int
    max_depth: int
    certify: bool
    certificate_range: int
    suite: str
    scale: str
    raw: dict

    @property
    def hash(self) -> str:
        return config_hash(self.raw)


DEFAULTS = {
    "dimension": 2,
    "window": {"vertices": [["-1/2", "-1/2"], ["1/2", "-1/2"], ["1/2", "1/2"], ["-1/2", "1/2"]]},
    "measure": {"kind": "axis"},
    "a": "2",
    "time": 1.0,
    "steps": 3,
    "seed": 0,
    "budget": 1_000_000,
    "horizon": 0,
    "max_depth": 64,
    "certify": True,
    "certificate_range": 40,
    "suite": "all",
    "scale": "full",
}


def config_hash(raw: dict) -> str:
    return hashlib.sha256(json.dumps(raw, sort_keys=True).encode("utf-8")).hexdigest()


def _want(raw, key, kinds, check=None, why=""):
    v = raw[key]
    if isinstance(v, bool) and bool not in kinds:
        raise ConfigError(f"{key}: expected {', '.join(k.__name__ for k in kinds)}, got a boolean")
    if not isinstance(v, kinds):
        raise ConfigError(f"{key}: expected {', '.join(k.__name__ for k in kinds)}, got {type(v).__name__}")
    if check is not None and not check(v):
        raise ConfigError(f"{key}: {why}")
    return v


def parse_config(doc: dict) -> Config:
    """Validate a config mapping (defaults filled in) and build a :class:`Config`."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>: config must be a JSON object")
    unknown = set(doc) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown config field")
    raw = {**DEFAULTS, **doc}
    dim = _want(raw, "dimension", (int,), lambda v: v in (1, 2), "must be 1 or 2")
    if dim == 1 and "window" not in doc:
        raw["window"] = {"vertices": [["-1/2"], ["1/2"]]}
    if dim == 1 and "measure" not in doc:
        raw["measure"] = {"kind": "lebesgue1d"}
    win = raw["window"]
    if not isinstance(win, dict) or "vertices" not in win:
        raise ConfigError("window.vertices: required list of points")
    W = _polytope(win["vertices"], "window.vertices")
    if W.dim != dim:
        raise ConfigError(f"window.vertices: points are {W.dim}-dimensional, dimension is {dim}")
    if not W.contains_origin(strict=True):
        raise ConfigError("window.vertices: the origin must lie in the interior of the window")
    if not isinstance(raw["measure"], dict):
        raise ConfigError("measure: expected an object with a 'kind' field")
    try:
        measure = measure_from_spec(raw["measure"], dim)
    except (TypeError, ValueError) as exc:
        msg = str(exc)
        raise ConfigError(msg if msg.startswith("measure") else f"measure: {msg}") from exc
    if not measure.mass(W) > 0:
        raise ConfigError("measure: no hyperplane of the measure hits the window")
    try:
        a = Q(raw["a"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"a: {exc}") from exc
    if not a > 1:
        raise ConfigError("a: must be strictly greater than 1")
    t = _want(raw, "time", (int, float), lambda v: v > 0, "must be positive")
    steps = _want(raw, "steps", (int,), lambda v: v >= 0, "must be nonnegative")
    seed = _want(raw, "seed", (int,), lambda v: v >= 0, "must be a nonnegative integer")
    budget = _want(raw, "budget", (int,), lambda v: v > 0, "must be positive")
    horizon = _want(raw, "horizon", (int,), lambda v: v >= 0, "must be nonnegative")
    max_depth = _want(raw, "max_depth", (int,), lambda v: v >= 1, "must be at least 1")
    certify = _want(raw, "certify", (bool,))
    K = _want(raw, "certificate_range", (int,), lambda v: v >= 1, "must be at least 1")
    suite = _want(raw, "suite", (str,))
    scale = _want(raw, "scale", (str,))
    return Config(dim, W, measure, a, float(t), steps, seed, budget, horizon, max_depth, certify, K,
                  suite, scale, raw)


def load_config(path=None, overrides: Optional[dict] = None) -> Config:
    """Read a JSON config (``path``, else ``$STITLAB_CONFIG``, else defaults) and apply overrides."""
    path = path or os.environ.get(CONFIG_ENV)
    doc = {}
    if path:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"<file>: cannot read config {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"<file>: {path} is not valid JSON (line {exc.lineno}: {exc.msg})") from exc
        if not isinstance(doc, dict):
            raise ConfigError("<root>: config must be a JSON object")
    doc = {**doc, **{k: v for k, v in (overrides or {}).items() if v is not None}}
    return parse_config(doc)
