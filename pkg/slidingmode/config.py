"""Experiment configuration files.

A configuration is a flat mapping of keys to scalars. Files are YAML
(``key: value``); the ``key = value`` line format is accepted too. Missing
keys fall back to the defaults below; unknown keys are an error.
"""

import math
import re
from pathlib import Path

import yaml

from .artifacts import read_trace
from .bloch import PureState, SlidingModeConfig
from .dynamics import IntegratorConfig
from .lyapunov import ControlTrace, LyapunovConfig
from .protocol import ProtocolConfig
from .uncertainty import HOLD_FAMILIES, UncertaintyClass


class ConfigError(ValueError):
    """Configuration file could not be parsed or validated."""


REQUIRED_KEYS = ("p0", "eps")

DEFAULTS = {
    "uncertainty_class": "x",
    "hold_waveform": "constant",
    "n_cycles": 100,
    "n_trials": 100,
    "seed": 0,
    "dt": 1e-4,
    "gain_x": 0.0,
    "gain_y": 100.0,
    "gain_z": 0.0,
    "shaping": "identity",
    "terminal_p": None,
    "max_time": 1.0,
    "initial_theta": math.pi,
    "initial_phi": 0.0,
    "noise_during_drive": False,
    "hold_step": 0.01,
    "period": None,
    "batch_size": 25,
    "drive_trace": None,
    "recovery_trace": None,
}

KNOWN_KEYS = frozenset(REQUIRED_KEYS) | frozenset(DEFAULTS)

_ASSIGNMENT = re.compile(r"^(\s*[A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


def _normalise(text: str) -> str:
    """Rewrite ``key = value`` lines as YAML ``key: value``."""
    return "\n".join(_ASSIGNMENT.sub(r"\1: \2", line) for line in text.splitlines())


def parse_config(text: str) -> dict:
    try:
        data = yaml.safe_load(_normalise(text))
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse configuration: {e}") from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping of key/value pairs")

    unknown = sorted(set(data) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(map(str, unknown))}")
    missing = [key for key in REQUIRED_KEYS if key not in data]
    if missing:
        raise ConfigError(f"missing required configuration keys: {', '.join(missing)}")
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            raise ConfigError(f"configuration key {key!r} must be a scalar, got {value!r}")
    return data


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read configuration {path}: {e}") from e
    return parse_config(text)


def get_sliding_mode_config(config: dict) -> SlidingModeConfig:
    return SlidingModeConfig(p0=float(config["p0"]), eps=float(config["eps"]))


def get_integrator_config(config: dict) -> IntegratorConfig:
    return IntegratorConfig(dt=float(config.get("dt", DEFAULTS["dt"])))


def get_lyapunov_config(config: dict) -> LyapunovConfig:
    terminal_p = config.get("terminal_p", DEFAULTS["terminal_p"])
    return LyapunovConfig(
        gains=(
            float(config.get("gain_x", DEFAULTS["gain_x"])),
            float(config.get("gain_y", DEFAULTS["gain_y"])),
            float(config.get("gain_z", DEFAULTS["gain_z"])),
        ),
        shaping=str(config.get("shaping", DEFAULTS["shaping"])),
        terminal_p=None if terminal_p is None else float(terminal_p),
        max_time=float(config.get("max_time", DEFAULTS["max_time"])),
    )


def get_initial_state(config: dict) -> PureState:
    theta = float(config.get("initial_theta", DEFAULTS["initial_theta"]))
    phi = float(config.get("initial_phi", DEFAULTS["initial_phi"]))
    if theta == math.pi and phi == 0.0:
        return PureState(0.0, 1.0)
    return PureState.from_angles(theta, phi)


def get_control_trace(config: dict, key: str, base_dir=None) -> ControlTrace | None:
    """Load the trace file named by ``config[key]``; relative paths start at ``base_dir``."""
    value = config.get(key, DEFAULTS[key])
    if value is None:
        return None
    path = Path(str(value)).expanduser()
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    try:
        return read_trace(path)
    except OSError as e:
        raise ConfigError(f"cannot read {key} {path}: {e}") from e
    except ValueError as e:
        raise ConfigError(f"invalid {key}: {e}") from e


def get_protocol_config(config: dict, seed: int | None = None, base_dir=None) -> ProtocolConfig:
    """Build a :class:`ProtocolConfig`; ``seed`` overrides the file's value.

    ``base_dir`` anchors relative ``drive_trace`` / ``recovery_trace`` paths,
    normally the directory holding the configuration file.
    """
    family = str(config.get("hold_waveform", DEFAULTS["hold_waveform"]))
    if family not in HOLD_FAMILIES:
        choices = ", ".join(HOLD_FAMILIES)
        raise ConfigError(f"hold_waveform must be one of {choices}, got {family!r}")
    period = config.get("period", DEFAULTS["period"])
    try:
        return ProtocolConfig(
            smc=get_sliding_mode_config(config),
            uncertainty_class=UncertaintyClass.parse(
                config.get("uncertainty_class", DEFAULTS["uncertainty_class"])
            ),
            hold_waveform=family,
            lyapunov=get_lyapunov_config(config),
            integrator=get_integrator_config(config),
            n_cycles=int(config.get("n_cycles", DEFAULTS["n_cycles"])),
            n_trials=int(config.get("n_trials", DEFAULTS["n_trials"])),
            seed=int(seed if seed is not None else config.get("seed", DEFAULTS["seed"])),
            initial=get_initial_state(config),
            noise_during_drive=bool(config.get("noise_during_drive", False)),
            hold_step=float(config.get("hold_step", DEFAULTS["hold_step"])),
            period=None if period is None else float(period),
            drive_trace=get_control_trace(config, "drive_trace", base_dir),
            recovery_trace=get_control_trace(config, "recovery_trace", base_dir),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"invalid configuration value: {e}") from e


def get_batch_size(config: dict) -> int:
    size = int(config.get("batch_size", DEFAULTS["batch_size"]))
    if size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {size}")
    return size
