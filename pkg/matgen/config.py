# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
Configuration defaults for matgen.

This module defines the numeric defaults shared by every layer and the
VerifySettings dataclass that drives the verification suites. Suite knobs can
be read from a JSONC file; command-line flags override file values.
"""

import logging
from dataclasses import dataclass, fields, replace
from typing import Optional

import commentjson  # type: ignore

from .errors import ConfigError

log = logging.getLogger("matgen")

# Tolerances
DEFAULT_TOL = 1e-9
RECONCILE_FACTOR = 1e3
LOW_CONFIDENCE_BAND = 1e3
UNIT_TOL = 1e-12
Y_QUADRIC_TOL = 1e-12

# Jacobian rank estimation
JACOBIAN_STEP = 1e-5
MARGIN_FACTOR = 10
RANK_KEEP_RATIO = 1e-6
RANK_DROP_RATIO = 1e-9

# Sampling
RATIONAL_NUM_BOUND = 100
RATIONAL_DEN_BOUND = 100
MAX_CONJUGATOR_COND = 100.0
BLOCK_SIZE = 2048
KERNEL_SEARCH_LIMIT = 10

SUITE_NAMES = ("ranks", "maps", "equivalences", "b2", "montecarlo")


@dataclass
class VerifySettings:
    seed: int = 0
    r_min: int = 2
    r_max: int = 6
    burnside_r_max: int = 5
    threads: int = 1
    tol: float = DEFAULT_TOL
    jacobian_step: float = JACOBIAN_STEP
    rank_samples: int = 100
    burnside_samples: int = 100_000
    edge_samples: int = 1_000
    friedland_samples: int = 10_000
    conjugation_samples: int = 10_000
    semisimplify_samples: int = 10_000
    orbit_samples: int = 1_000
    freeness_samples: int = 1_000
    retraction_samples: int = 1_000
    maps_samples: int = 10_000
    b2_samples: int = 10_000
    montecarlo_samples: int = 1_000_000
    montecarlo_chart_samples: int = 1_000

    def with_samples(self, n: int) -> "VerifySettings":
        """Override every sampled-check count (Jacobian sample counts excluded)."""
        if n < 1:
            raise ConfigError(f"samples must be positive, got {n}")
        counts = {
            f.name: n
            for f in fields(self)
            if f.name.endswith("_samples") and f.name != "rank_samples"
        }
        return replace(self, **counts)

    def validate(self) -> "VerifySettings":
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.r_min < 2 or self.r_max < self.r_min:
            raise ConfigError(
                f"invalid r range [{self.r_min}, {self.r_max}]; need 2 <= r-min <= r-max"
            )
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if not 0 < self.tol < 1:
            raise ConfigError(f"tol must lie in (0, 1), got {self.tol}")
        for f in fields(self):
            if f.name.endswith("_samples") and getattr(self, f.name) < 0:
                raise ConfigError(f"{f.name} must be non-negative")
        return self


def parse_settings_mapping(data: dict, base: Optional[VerifySettings] = None) -> VerifySettings:
    """Build VerifySettings from a mapping, rejecting unknown keys and wrong types."""
    if not isinstance(data, dict):
        raise ConfigError("Invalid config structure: top level must be an object")
    settings = base or VerifySettings()
    known = {f.name: f for f in fields(VerifySettings)}
    updates = {}
    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigError(f"Invalid config entry: unknown key {key!r}")
        default = getattr(settings, name)
        if isinstance(default, float):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"Invalid config entry: {key!r} must be a number")
            value = float(value)
        elif isinstance(default, int):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"Invalid config entry: {key!r} must be an integer")
        updates[name] = value
    return replace(settings, **updates).validate()


def load_settings_file(path: str, base: Optional[VerifySettings] = None) -> VerifySettings:
    """Load suite knobs from a JSONC file (comments allowed)."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = commentjson.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except Exception as e:
        raise ConfigError(f"invalid config file {path}: {e}") from e
    settings = parse_settings_mapping(data, base)
    log.info("[CONFIG] Loaded %d setting(s) from %s", len(data), path)
    return settings
