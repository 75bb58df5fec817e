"""Engine configuration: defaults, key-value config files, flag overrides.

Config files are plain `key = value` lines with `#` comments; every key has a
hardcoded default matching the constants used throughout, so an empty (or
absent) file is a valid configuration.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .distancing import DistancingConfig
from .errors import CrowdguardError
from .evaluation import MatchingConfig, MatchMode
from .faces import (DEFAULT_HAND_ORDER, DEFAULT_MASK_ORDER, CropConfig)
from .model import HandLabel, MaskLabel

ENV_CONFIG_PATH = "CROWDGUARD_CONFIG"


class ConfigError(CrowdguardError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    lambda_coefficient: float = 3.0
    min_shoulder_width: float = 1.0
    margin_fraction: float = 0.20
    clamp_to_image: bool = True
    backend: str = "recorded"  # "recorded" | "interchange_model"
    input_edge: int = 224
    mask_class_order: tuple[MaskLabel, ...] = DEFAULT_MASK_ORDER
    hand_class_order: tuple[HandLabel, ...] = DEFAULT_HAND_ORDER
    iou_threshold: float = 0.5
    match_mode: str = "by_id"

    def distancing(self) -> DistancingConfig:
        return DistancingConfig(lambda_coefficient=self.lambda_coefficient,
                                min_shoulder_width=self.min_shoulder_width)

    def crop(self) -> CropConfig:
        return CropConfig(margin_fraction=self.margin_fraction,
                          clamp_to_image=self.clamp_to_image)

    def matching(self) -> MatchingConfig:
        return MatchingConfig(iou_threshold=self.iou_threshold,
                              mode=MatchMode(self.match_mode))


def _parse_bool(value: str, key: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ConfigError(f"config key {key!r}: cannot parse boolean {value!r}")


def _parse_order(value: str, enum_type, key: str) -> tuple:
    names = [part.strip() for part in value.split(",")]
    try:
        order = tuple(enum_type(name) for name in names)
    except ValueError:
        raise ConfigError(f"config key {key!r}: unknown label in {value!r}")
    if set(order) != set(enum_type) or len(order) != len(set(order)):
        raise ConfigError(f"config key {key!r}: {value!r} is not a permutation "
                          f"of the task's labels")
    return order


def load_config(path: str | None = None) -> EngineConfig:
    """Read a config file; `path=None` falls back to $CROWDGUARD_CONFIG, and
    to pure defaults when that is unset."""
    if path is None:
        path = os.environ.get(ENV_CONFIG_PATH)
        if path is None:
            return EngineConfig()
    config = EngineConfig()
    try:
        lines = open(path, "r", encoding="utf-8").read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}")
    for line_no, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key in ("lambda_coefficient", "min_shoulder_width",
                       "margin_fraction", "iou_threshold"):
                config = replace(config, **{key: float(value)})
            elif key == "clamp_to_image":
                config = replace(config, clamp_to_image=_parse_bool(value, key))
            elif key == "backend":
                if value not in ("recorded", "interchange_model"):
                    raise ConfigError(f"{path}:{line_no}: unknown backend {value!r}")
                config = replace(config, backend=value)
            elif key == "input_edge":
                config = replace(config, input_edge=int(value))
            elif key == "mask_class_order":
                config = replace(config, mask_class_order=_parse_order(value, MaskLabel, key))
            elif key == "hand_class_order":
                config = replace(config, hand_class_order=_parse_order(value, HandLabel, key))
            elif key == "match_mode":
                if value not in ("by_id", "by_iou"):
                    raise ConfigError(f"{path}:{line_no}: unknown match_mode {value!r}")
                config = replace(config, match_mode=value)
            else:
                raise ConfigError(f"{path}:{line_no}: unknown config key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"{path}:{line_no}: bad value for {key!r}: {exc}")
    return config
