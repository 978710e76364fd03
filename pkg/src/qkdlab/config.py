"""Experiment configuration: schema, defaults, YAML parsing.

Config documents are YAML mappings with five sections (channel, noise,
sim, protocol, output).  Keys may be written nested or as flat dotted
names; anything outside the schema is a hard error, and every validation
message names the offending dotted key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigurationError
from .qcore import ChannelParams, NoiseParams
from .simkit import FULL_MENU_MODES, MenuMode, SimMode

DEFAULT_SWEEP_STOP = 2.0 * math.pi


@dataclass(frozen=True)
class SweepSpec:
    """Half-open beta_b grid [start, stop) with ``points`` samples."""

    start: float = 0.0
    stop: float = DEFAULT_SWEEP_STOP
    points: int = 61

    def __post_init__(self):
        if self.points < 2:
            raise ConfigurationError(
                f"channel.sweep_points must be at least 2, got {self.points!r}"
            )
        if not self.start < self.stop:
            raise ConfigurationError(
                "channel.sweep_start must be smaller than channel.sweep_stop, "
                f"got {self.start!r} >= {self.stop!r}"
            )

    def values(self) -> list[float]:
        step = (self.stop - self.start) / self.points
        return [self.start + i * step for i in range(self.points)]


@dataclass
class ExperimentConfig:
    """Everything one protocol run or sweep needs."""

    beta_a: float = 0.0
    beta_b: float = 0.0
    sweep: Optional[SweepSpec] = None
    bsm_phase_offset: float = 0.0
    noise: NoiseParams = field(default_factory=NoiseParams)
    mode: SimMode = SimMode.ANALYTIC
    shots: int = 100_000
    seed: int = 0
    alice_menu: MenuMode = MenuMode.SIX
    bob_menu: MenuMode = MenuMode.SIX
    phase_variant: bool = False
    phase_theta: float = 0.0
    out_dir: Path = Path(".")
    emit_svg: bool = True

    def channel(self, beta_b: Optional[float] = None) -> ChannelParams:
        return ChannelParams(
            beta_a=self.beta_a,
            beta_b=self.beta_b if beta_b is None else beta_b,
            bsm_phase_offset=self.bsm_phase_offset,
        )


# section -> key -> (expected type tag, validator description)
_SCHEMA = {
    "channel": {
        "beta_a": "float",
        "beta_b": "float",
        "sweep_start": "float",
        "sweep_stop": "float",
        "sweep_points": "int",
        "bsm_phase_offset": "float",
    },
    "noise": {
        "depol_a": "unit",
        "depol_b": "unit",
        "background_click": "unit",
    },
    "sim": {
        "mode": "str",
        "shots": "int",
        "seed": "int",
    },
    "protocol": {
        "alice_menu": "str",
        "bob_menu": "str",
        "phase_variant": "bool",
        "phase_theta": "float",
    },
    "output": {
        "directory": "str",
        "emit_svg": "bool",
    },
}


def _coerce(dotted: str, kind: str, value):
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"{dotted} must be a number, got {value!r}")
        return float(value)
    if kind == "unit":
        number = _coerce(dotted, "float", value)
        if not 0.0 <= number <= 1.0:
            raise ConfigurationError(f"{dotted} must lie in [0, 1], got {value!r}")
        return number
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{dotted} must be an integer, got {value!r}")
        return int(value)
    if kind == "bool":
        if not isinstance(value, bool):
            raise ConfigurationError(f"{dotted} must be true or false, got {value!r}")
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigurationError(f"{dotted} must be a string, got {value!r}")
        return value
    raise AssertionError(kind)


def _flatten(document) -> dict[str, object]:
    """Flatten a parsed YAML mapping into dotted keys, validating shape."""
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ConfigurationError("config document must be a key-value mapping")
    flat = {}

    def visit(prefix: str, node):
        if isinstance(node, dict):
            for key, child in node.items():
                if not isinstance(key, str):
                    raise ConfigurationError(f"non-string configuration key {key!r}")
                visit(f"{prefix}.{key}" if prefix else key, child)
        else:
            if prefix in flat:
                raise ConfigurationError(f"duplicate configuration key: {prefix}")
            flat[prefix] = node

    visit("", document)
    return flat


def parse_config(text: str) -> ExperimentConfig:
    """Parse a config document, applying defaults and strict validation."""
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed config document: {exc}") from None

    values = {}
    for dotted, raw in _flatten(document).items():
        parts = dotted.split(".")
        if len(parts) != 2 or parts[0] not in _SCHEMA or parts[1] not in _SCHEMA[parts[0]]:
            raise ConfigurationError(f"unknown configuration key: {dotted}")
        values[dotted] = _coerce(dotted, _SCHEMA[parts[0]][parts[1]], raw)

    sweep = None
    sweep_keys = [k for k in values if k.startswith("channel.sweep_")]
    if sweep_keys:
        sweep = SweepSpec(
            start=values.get("channel.sweep_start", 0.0),
            stop=values.get("channel.sweep_stop", DEFAULT_SWEEP_STOP),
            points=values.get("channel.sweep_points", 61),
        )

    mode = SimMode.parse(values.get("sim.mode", "analytic"))
    shots = values.get("sim.shots", 100_000)
    if shots < 1:
        raise ConfigurationError(f"sim.shots must be at least 1, got {shots!r}")

    alice_menu = MenuMode.parse(values.get("protocol.alice_menu", "six"))
    bob_menu = MenuMode.parse(values.get("protocol.bob_menu", "six"))
    if bob_menu not in FULL_MENU_MODES:
        raise ConfigurationError(
            f"protocol.bob_menu must be the full menu (six/four), got {bob_menu.value!r}"
        )

    try:
        noise = NoiseParams(
            depol_a=values.get("noise.depol_a", 0.0),
            depol_b=values.get("noise.depol_b", 0.0),
            background_click=values.get("noise.background_click", 0.0),
        )
    except ValueError as exc:
        raise ConfigurationError(f"noise: {exc}") from None

    return ExperimentConfig(
        beta_a=values.get("channel.beta_a", 0.0),
        beta_b=values.get("channel.beta_b", 0.0),
        sweep=sweep,
        bsm_phase_offset=values.get("channel.bsm_phase_offset", 0.0),
        noise=noise,
        mode=mode,
        shots=shots,
        seed=values.get("sim.seed", 0),
        alice_menu=alice_menu,
        bob_menu=bob_menu,
        phase_variant=values.get("protocol.phase_variant", False),
        phase_theta=values.get("protocol.phase_theta", 0.0) % (2.0 * math.pi),
        out_dir=Path(values.get("output.directory", ".")),
        emit_svg=values.get("output.emit_svg", True),
    )


def load_config(path) -> ExperimentConfig:
    """Read and parse a config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    return parse_config(text)
