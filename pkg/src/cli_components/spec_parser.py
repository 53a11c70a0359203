"""State specifications for the command line.

A spec is a JSON object such as {"kind": "ghz_q", "n": 6, "q": 0.02}, given
inline or as a path to a file holding the object.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from config import DEFAULT_CONFIG, QfiConfig
from errors import SpecError
from qstate import PureState, check_qubit_cap, dicke_state
from statelib import (
    Graph,
    cabello_singlet,
    ghz_q,
    graph_state,
    grid_cluster,
    linear_cluster,
    noon,
    ps_state,
    ring_cluster,
    star_graph,
    twin_fock,
)


# kind -> (required keys, optional keys)
KINDS = {
    "noon": (("n",), ()),
    "ghz_q": (("n", "q"), ("phi",)),
    "twin_fock": (("n",), ()),
    "ps": (("n",), ()),
    "dicke": (("n", "m"), ()),
    "singlet": (("n",), ()),
    "graph": (("n", "edges"), ()),
    "linear_cluster": (("n",), ()),
    "ring_cluster": (("n",), ()),
    "grid_cluster": (("rows", "cols"), ()),
    "star": (("n",), ()),
    "amplitudes": (("amplitudes",), ()),
}
GRAPH_KINDS = ("graph", "linear_cluster", "ring_cluster", "grid_cluster", "star")
INTEGER_KEYS = ("n", "rows", "cols")
REAL_KEYS = ("q", "phi", "m")


@dataclass(frozen=True)
class StateSpec:
    kind: str
    parameters: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        data = {"kind": self.kind}
        data.update(self.parameters)
        return data


def _check_integer(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise SpecError(f"'{key}' must be a positive integer, got {value!r}")
    return value


def _check_real(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise SpecError(f"'{key}' must be a finite number, got {value!r}")
    return float(value)


def _parse_amplitudes(value: Any, config: QfiConfig) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise SpecError("'amplitudes' must be a nonempty list of [re, im] pairs")
    amps = []
    for pair in value:
        if not isinstance(pair, list) or len(pair) != 2:
            raise SpecError(f"Amplitude entry {pair!r} must be a [re, im] pair")
        amps.append(complex(_check_real("amplitude", pair[0]), _check_real("amplitude", pair[1])))
    amps = np.array(amps, dtype=complex)
    n_qubits = int(round(np.log2(amps.size)))
    if 2 ** n_qubits != amps.size or n_qubits < 1:
        raise SpecError(f"Amplitude count {amps.size} is not a power of two >= 2")
    check_qubit_cap(n_qubits, config=config)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > config.amplitude_renorm_tol:
        raise SpecError(f"Amplitudes have norm {norm!r}; expected 1 within {config.amplitude_renorm_tol}")
    return amps / norm


def spec_from_dict(data: Any, *, config: QfiConfig = DEFAULT_CONFIG) -> StateSpec:
    """Validate a decoded JSON object against the kind's parameter rules."""
    if not isinstance(data, dict):
        raise SpecError("A state spec must be a JSON object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise SpecError(f"Unknown state kind {kind!r}. Choose from: {', '.join(KINDS)}")
    required, optional = KINDS[kind]
    params = {k: v for k, v in data.items() if k != "kind"}
    missing = [k for k in required if k not in params]
    if missing:
        raise SpecError(f"Spec of kind '{kind}' is missing: {', '.join(missing)}")
    unknown = sorted(set(params) - set(required) - set(optional))
    if unknown:
        raise SpecError(f"Spec of kind '{kind}' has unknown keys: {', '.join(unknown)}")

    for key in INTEGER_KEYS:
        if key in params:
            _check_integer(key, params[key])
    for key in REAL_KEYS:
        if key in params:
            _check_real(key, params[key])
    if "q" in params and not 0.0 <= params["q"] <= 1.0:
        raise SpecError(f"'q' must lie in [0, 1], got {params['q']!r}")
    if kind in ("twin_fock", "ps", "singlet") and params["n"] % 2:
        raise SpecError(f"Kind '{kind}' needs an even n, got {params['n']}")
    if kind == "amplitudes":
        _parse_amplitudes(params["amplitudes"], config)
    return StateSpec(kind, params)


def parse_state_spec(text: str, *, config: QfiConfig = DEFAULT_CONFIG) -> StateSpec:
    """Parse an inline JSON spec or the path of a file containing one."""
    source = text
    if os.path.isfile(text):
        try:
            with open(text, "r", encoding="utf-8") as f:
                source = f.read()
        except OSError as exc:
            logging.exception("Failed to read spec file %s", text)
            raise SpecError(f"Cannot read spec file {text}: {exc}") from exc
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise SpecError(f"Spec is neither a readable file nor valid JSON: {exc}") from exc
    return spec_from_dict(data, config=config)


def graph_of(spec: StateSpec) -> Optional[Graph]:
    """Graph behind a graph-state spec, None for other kinds."""
    p = spec.parameters
    if spec.kind == "graph":
        return Graph.from_json({"n": p["n"], "edges": p["edges"]})
    if spec.kind == "linear_cluster":
        return linear_cluster(p["n"])
    if spec.kind == "ring_cluster":
        return ring_cluster(p["n"])
    if spec.kind == "grid_cluster":
        return grid_cluster(p["rows"], p["cols"])
    if spec.kind == "star":
        return star_graph(p["n"])
    return None


def build_state(spec: StateSpec, *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    p = spec.parameters
    if spec.kind in GRAPH_KINDS:
        return graph_state(graph_of(spec), config=config)
    if spec.kind == "noon":
        return noon(p["n"], config=config)
    if spec.kind == "ghz_q":
        return ghz_q(p["n"], float(p["q"]), float(p.get("phi", 0.0)), config=config)
    if spec.kind == "twin_fock":
        return twin_fock(p["n"], config=config)
    if spec.kind == "ps":
        return ps_state(p["n"], config=config)
    if spec.kind == "dicke":
        return dicke_state(p["n"], float(p["m"]), config=config)
    if spec.kind == "singlet":
        return cabello_singlet(p["n"], config=config)
    return PureState.from_amplitudes(_parse_amplitudes(p["amplitudes"], config), normalize=True, config=config)
