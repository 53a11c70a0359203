"""Configuration for the QFI toolkit.

All numerical tolerances and dimension caps live in one frozen record,
`QfiConfig`. Library functions take it as a keyword-only `config` argument
and fall back to `DEFAULT_CONFIG`. Overrides can be loaded from a JSON file.
"""

import dataclasses
import json
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict

from errors import ConfigError


VERSION = "1.0.0"


@dataclass(frozen=True)
class QfiConfig:
    """Tolerances, caps and search defaults."""

    max_pure_qubits: int = 14
    max_mixed_qubits: int = 10
    max_singlet_qubits: int = 12

    norm_tol: float = 1e-12
    hermitian_tol: float = 1e-12
    trace_tol: float = 1e-12
    psd_tol: float = 1e-10
    imag_tol: float = 1e-10
    rotation_tol: float = 1e-10
    direction_tol: float = 1e-12
    symmetry_tol: float = 1e-10
    entanglement_tol: float = 1e-9
    variance_tol: float = 1e-10

    eigen_pair_tol: float = 1e-12
    probability_floor: float = 1e-12
    derivative_floor: float = 1e-9

    degeneracy_rtol: float = 1e-9
    certify_tol: float = 1e-7
    family_tol: float = 1e-9
    bloch_zero_tol: float = 1e-9
    condition_margin: float = 1e-10
    useful_margin: float = 1e-9
    ghz_margin: float = 1e-12
    amplitude_renorm_tol: float = 1e-6

    default_restarts: int = 16
    default_seed: int = 0
    max_sweeps: int = 2000
    sweep_tol: float = 1e-13

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if field.type in (int, "int"):
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ConfigError(f"'{field.name}' must be an integer, got {value!r}")
                minimum = 0 if field.name == "default_seed" else 1
                if value < minimum:
                    raise ConfigError(f"'{field.name}' must be >= {minimum}, got {value}")
            else:
                if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
                    raise ConfigError(f"'{field.name}' must be a positive number, got {value!r}")


DEFAULT_CONFIG = QfiConfig()

# Validated at construction of states, directions and rotations, always against DEFAULT_CONFIG.
CONSTRUCTION_FIELDS = ("norm_tol", "direction_tol", "hermitian_tol", "trace_tol", "psd_tol", "rotation_tol")


def config_overrides(config: QfiConfig) -> Dict[str, Any]:
    """Return the fields of `config` that differ from the defaults."""
    return {
        field.name: getattr(config, field.name)
        for field in dataclasses.fields(config)
        if getattr(config, field.name) != getattr(DEFAULT_CONFIG, field.name)
    }


def load_config(path: str) -> QfiConfig:
    """Load a JSON object of overrides on top of `DEFAULT_CONFIG`."""
    if not os.path.exists(path):
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        logging.exception("Failed to read config file %s", path)
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc

    if not isinstance(data, dict):
        raise ConfigError("Config file must contain a JSON object")

    known = {field.name for field in dataclasses.fields(QfiConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")

    config = dataclasses.replace(DEFAULT_CONFIG, **data)
    fixed = sorted(set(data) & set(CONSTRUCTION_FIELDS))
    if fixed:
        logging.warning("Config %s overrides %s; state, direction and rotation construction "
                        "still checks against the defaults", path, ", ".join(fixed))
    logging.debug("Loaded config overrides from %s: %s", path, config_overrides(config))
    return config
