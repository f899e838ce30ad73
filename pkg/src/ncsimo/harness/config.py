"""Simulation configuration: JSON files, validation, defaults."""
import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from ..channel import FixedDistance, RadioParams, UniformDisk, dbm_to_watts
from ..errors import ConfigError

SCHEMES = ("proposed", "med", "zf-train")

# bits carried per user per slot, for reporting only
BITS_PER_SLOT_PER_USER = {"proposed": 1.0, "med": 1.0, "zf-train": 1.5}


@dataclass(frozen=True)
class SimConfig:
    scheme: str = "proposed"
    K: int = 2
    M_list: tuple = (16, 32, 64, 128)
    radius_m: float = 1000.0
    distance_m: float = None  # when set, overrides radius_m
    P_dBm: object = 25.0  # scalar or one value per user
    radio: RadioParams = field(default_factory=RadioParams)
    trials: int = 100_000  # cap on coherence blocks per M
    error_target: int = 200  # None runs to the cap
    seed: int = 0
    batch_size: int = 2000
    out: str = None

    def __post_init__(self):
        if self.distance_m is not None:
            object.__setattr__(self, "radius_m", None)
        validate(self)

    @property
    def placement(self):
        if self.distance_m is not None:
            return FixedDistance(float(self.distance_m))
        return UniformDisk(float(self.radius_m))

    @property
    def powers(self):
        """Per-user power budgets in watts."""
        P = np.atleast_1d(np.asarray(self.P_dBm, dtype=float))
        if P.size == 1:
            P = np.repeat(P, self.K)
        return dbm_to_watts(P)

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["M_list"] = list(self.M_list)
        if isinstance(self.P_dBm, (list, tuple)):
            d["P_dBm"] = list(self.P_dBm)
        return d

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _fail(key, msg):
    raise ConfigError(f"config key '{key}': {msg}")


def _is_int(x):
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def validate(cfg):
    if cfg.scheme not in SCHEMES:
        _fail("scheme", f"must be one of {', '.join(SCHEMES)}, got {cfg.scheme!r}")
    if not _is_int(cfg.K) or cfg.K < 1:
        _fail("K", f"must be a positive integer, got {cfg.K!r}")
    if len(cfg.M_list) == 0:
        _fail("M_list", "needs at least one antenna count")
    for M in cfg.M_list:
        if not _is_int(M) or M < 1:
            _fail("M_list", f"antenna counts must be positive integers, got {M!r}")
    if cfg.radius_m is None and cfg.distance_m is None:
        _fail("radius_m", "set radius_m (uniform in cell) or distance_m (fixed)")
    for key in ("radius_m", "distance_m"):
        v = getattr(cfg, key)
        if v is not None and not (isinstance(v, (int, float)) and v >= cfg.radio.d0):
            _fail(key, f"must be a number >= d0={cfg.radio.d0} m, got {v!r}")
    P = np.atleast_1d(np.asarray(cfg.P_dBm, dtype=float))
    if P.size not in (1, cfg.K):
        _fail("P_dBm", f"needs 1 or K={cfg.K} values, got {P.size}")
    if not np.all(np.isfinite(P)):
        _fail("P_dBm", "values must be finite")
    if not _is_int(cfg.trials) or cfg.trials < 1:
        _fail("trials", f"trial cap must be >= 1, got {cfg.trials!r}")
    if cfg.error_target is not None and (not _is_int(cfg.error_target) or cfg.error_target < 1):
        _fail("error_target", f"must be a positive integer or null, got {cfg.error_target!r}")
    if not _is_int(cfg.seed) or cfg.seed < 0:
        _fail("seed", f"must be a nonnegative integer, got {cfg.seed!r}")
    if not _is_int(cfg.batch_size) or cfg.batch_size < 1:
        _fail("batch_size", f"must be a positive integer, got {cfg.batch_size!r}")


_FIELDS = {f.name for f in dataclasses.fields(SimConfig)}
_RADIO_FIELDS = {f.name for f in dataclasses.fields(RadioParams)}


def config_from_dict(data):
    """Build a SimConfig from a plain mapping (e.g. parsed JSON)."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    data = dict(data)
    unknown = set(data) - _FIELDS
    if unknown:
        _fail(sorted(unknown)[0], "unknown key")
    radio = data.pop("radio", None) or {}
    if not isinstance(radio, dict):
        _fail("radio", "must be an object of RadioParams overrides")
    bad = set(radio) - _RADIO_FIELDS
    if bad:
        _fail(f"radio.{sorted(bad)[0]}", "unknown key")
    try:
        data["radio"] = RadioParams(**radio)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key 'radio': {exc}") from None
    if "M_list" in data:
        if not isinstance(data["M_list"], (list, tuple)):
            _fail("M_list", "must be a list of integers")
        data["M_list"] = tuple(data["M_list"])
    if isinstance(data.get("P_dBm"), list):
        data["P_dBm"] = tuple(data["P_dBm"])
    return SimConfig(**data)


def load_config(path):
    """Read a JSON config; syntax errors are reported with line and column."""
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)
