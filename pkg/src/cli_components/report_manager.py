"""AnalysisReport construction, JSON serialization and schema validation."""

import json
import logging
import numbers
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import jsonschema
import numpy as np

from classify import classify_state
from config import DEFAULT_CONFIG, VERSION, QfiConfig
from covariance import best_clu, gamma_c
from errors import QfiError
from fisher import cramer_rao, heisenberg_limit, heisenberg_limit_total, shot_noise_limit
from qstate import PureState, is_pure_entangled, is_symmetric
from cli_components.spec_parser import StateSpec


SCHEMA_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                           "schemas", "analysis_report.schema.json")
REPORT_KEYS = ("tool_version", "seed", "restarts", "spec", "n_qubits", "symmetric", "entangled",
               "gamma_c", "clu", "lu", "verdict", "reference")

_schema_cache: Dict[str, Any] = {}


@dataclass(frozen=True)
class AnalysisReport:
    tool_version: str
    seed: int
    restarts: int
    spec: Dict[str, Any]
    n_qubits: int
    symmetric: bool
    entangled: bool
    gamma_c: List[List[float]]
    clu: Dict[str, Any]
    lu: Dict[str, Any]
    verdict: Dict[str, Any]
    reference: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in REPORT_KEYS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AnalysisReport":
        missing = [key for key in REPORT_KEYS if key not in data]
        if missing:
            raise QfiError(f"Report is missing keys: {', '.join(missing)}")
        return cls(**{key: data[key] for key in REPORT_KEYS})

    def to_json(self) -> str:
        return format_json(self.to_dict()) + "\n"


def format_json(value: Any, indent: int = 2, level: int = 0) -> str:
    """JSON text with every real written to 17 significant digits; inf and nan become null."""
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        value = float(value)
        return "%.17g" % value if np.isfinite(value) else "null"
    if isinstance(value, str):
        return json.dumps(value)
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {format_json(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        value = list(value)
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in value):
            return "[" + ", ".join(format_json(v, indent, level + 1) for v in value) + "]"
        items = [pad + format_json(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def load_schema() -> Dict[str, Any]:
    if "report" not in _schema_cache:
        with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
            _schema_cache["report"] = json.load(f)
    return _schema_cache["report"]


def validate_report(data: Dict[str, Any]) -> None:
    try:
        jsonschema.validate(instance=data, schema=load_schema())
    except jsonschema.ValidationError as exc:
        logging.exception("Report failed schema validation")
        raise QfiError(f"Report does not match the published schema: {exc.message}") from exc


def _floats(vector) -> List[float]:
    return [float(v) for v in vector]


def _sensitivity(fisher: float, config: QfiConfig) -> Optional[float]:
    fisher = 0.0 if fisher < config.variance_tol else fisher
    bound = cramer_rao(fisher, 1)
    return None if bound.infinite else bound.delta_theta


def build_report(spec: StateSpec, state: PureState, restarts: int, seed: int,
                 *, config: QfiConfig = DEFAULT_CONFIG) -> AnalysisReport:
    """Run the collective and local analyses of one state."""
    n = state.n_qubits
    logging.info("Analyzing %s state on %d qubits", spec.kind, n)
    cov = gamma_c(state, config=config)
    clu = best_clu(cov, config=config)
    verdict = classify_state(state, restarts, seed, config=config)
    lu = verdict.lu_optimum

    family = None
    if verdict.family_detected is not None:
        family = {"family": "ghz_q", "q": verdict.family_detected.q, "phi": verdict.family_detected.phi}
    witness = verdict.witness_direction.as_list() if verdict.witness_direction is not None else None

    report = AnalysisReport(
        tool_version=VERSION,
        seed=int(seed),
        restarts=int(restarts),
        spec=spec.to_json(),
        n_qubits=n,
        symmetric=is_symmetric(state, config=config),
        entangled=is_pure_entangled(state, config=config),
        gamma_c=[_floats(row) for row in cov.matrix],
        clu={"direction": clu.direction.as_list(), "fq": clu.fq, "degenerate": clu.degenerate},
        lu={
            "upper": lu.upper_bound,
            "lower": lu.best_value,
            "certified": lu.certified,
            "assignment": lu.best_assignment.as_lists(),
        },
        verdict={
            "useful_clu": verdict.useful_clu,
            "useful_lu": verdict.useful_lu,
            "fq_clu": verdict.fq_clu,
            "fq_lu": verdict.fq_lu,
            "optimal_direction": verdict.optimal_direction.as_list(),
            "degenerate": verdict.degenerate,
            "witness_direction": witness,
            "family_detected": family,
            "boundary": verdict.boundary,
        },
        reference={
            "shot_noise": shot_noise_limit(n),
            "heisenberg": heisenberg_limit(1, n),
            "heisenberg_total": heisenberg_limit_total(n),
            "delta_theta_clu": _sensitivity(clu.fq, config),
            "delta_theta_lu": _sensitivity(lu.best_value, config),
        },
    )
    validate_report(json.loads(report.to_json()))
    return report


def write_report(report: AnalysisReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(report.to_json())
