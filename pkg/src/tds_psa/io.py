"""JSON system documents and result documents.

A system document looks like::

    {
      "n": 1,
      "delays": [0, 1],
      "matrices": [[[0]], [[-1]]],
      "weights": [1, 1],
      "epsilon": 0.1
    }

Matrices are row-major; each entry is a real number or an ``[re, im]`` pair.
``weights`` defaults to all ones and ``epsilon`` may be supplied on the
command line instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional

import jsonschema
import numpy as np

from ._jsonfmt import dumps
from .corrector import PsaResult
from .errors import DocumentError, SystemValidationError
from .roots import RootSet
from .system import PerturbationSpec, TimeDelaySystem

_ENTRY = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

SYSTEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["n", "delays", "matrices"],
    "additionalProperties": False,
    "properties": {
        "description": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "delays": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "matrices": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": {"type": "array", "items": _ENTRY}},
        },
        "weights": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
    },
}


def _jpath(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


@dataclass
class SystemDocument:
    n: int
    delays: List[float]
    matrices: List[np.ndarray]
    weights: Optional[List[float]] = None
    epsilon: Optional[float] = None
    description: Optional[str] = None

    def system(self) -> TimeDelaySystem:
        return TimeDelaySystem(self.matrices, self.delays)

    def spec(self, epsilon: Optional[float] = None) -> PerturbationSpec:
        eps = epsilon if epsilon is not None else self.epsilon
        if eps is None:
            raise DocumentError("epsilon missing: give it in the document or with --epsilon",
                                "$.epsilon")
        weights = self.weights if self.weights is not None else [1.0] * len(self.delays)
        return PerturbationSpec(weights, eps)

    def to_dict(self) -> dict:
        def entry(z):
            z = complex(z)
            return z.real if z.imag == 0 else [z.real, z.imag]

        doc = {}
        if self.description is not None:
            doc["description"] = self.description
        doc["n"] = self.n
        doc["delays"] = [float(t) for t in self.delays]
        doc["matrices"] = [[[entry(z) for z in row] for row in a] for a in self.matrices]
        if self.weights is not None:
            doc["weights"] = [float(w) for w in self.weights]
        if self.epsilon is not None:
            doc["epsilon"] = float(self.epsilon)
        return doc

    @classmethod
    def from_system(cls, sys: TimeDelaySystem, spec: Optional[PerturbationSpec] = None,
                    description: Optional[str] = None) -> "SystemDocument":
        return cls(sys.n, list(sys.delays), [np.array(a) for a in sys.matrices],
                   list(spec.weights) if spec else None,
                   spec.epsilon if spec else None, description)


def parse_system(text: str) -> SystemDocument:
    """Parse and validate a system document; raises :class:`DocumentError`."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}",
                            "$") from exc
    return system_from_dict(raw)


def system_from_dict(raw) -> SystemDocument:
    validator = jsonschema.Draft202012Validator(SYSTEM_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise DocumentError(e.message, _jpath(e.absolute_path))

    n = raw["n"]
    delays = raw["delays"]
    mats_raw = raw["matrices"]
    if len(mats_raw) != len(delays):
        raise DocumentError(f"{len(mats_raw)} matrices for {len(delays)} delays", "$.matrices")
    mats = []
    for i, a in enumerate(mats_raw):
        if len(a) != n:
            raise DocumentError(f"expected {n} rows, got {len(a)}", f"$.matrices[{i}]")
        m = np.zeros((n, n), dtype=complex)
        for r, row in enumerate(a):
            if len(row) != n:
                raise DocumentError(f"expected {n} columns, got {len(row)}",
                                    f"$.matrices[{i}][{r}]")
            for c, z in enumerate(row):
                m[r, c] = complex(z[0], z[1]) if isinstance(z, list) else z
        mats.append(m)
    weights = raw.get("weights")
    if weights is not None and len(weights) != len(delays):
        raise DocumentError(f"{len(weights)} weights for {len(delays)} delays", "$.weights")
    doc = SystemDocument(n, [float(t) for t in delays], mats,
                         None if weights is None else [float(w) for w in weights],
                         raw.get("epsilon"), raw.get("description"))
    try:
        doc.system()
    except SystemValidationError as exc:
        raise DocumentError(str(exc), "$.delays") from exc
    return doc


def dump_system(doc: SystemDocument) -> str:
    return dumps(doc.to_dict())


# ---------------------------------------------------------------------------
# results


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def result_document(res: PsaResult, settings: dict) -> dict:
    pred = res.predictor
    doc = {
        "alpha0": res.alpha0,
        "alpha_epsilon": res.alpha_epsilon,
        "omega_epsilon": res.omega_epsilon,
        "predictor": {
            "sigma_tilde": pred.sigma_tilde,
            "bracket": [pred.bracket[0], pred.bracket[1]],
            "iterations": pred.iterations,
            "frequencies": list(pred.frequencies),
            "trace": [[s, bool(ok)] for s, ok in pred.trace],
            "tol": pred.tol,
        },
        "corrector": {
            "candidates": [
                {
                    "seed_omega": c.seed_omega,
                    "sigma": c.sigma,
                    "omega": c.omega,
                    "residual": c.residual_norm,
                    "iterations": c.iterations,
                    "converged": c.converged,
                    "reason": c.reason,
                }
                for c in res.candidates
            ],
            "u": [_c(z) for z in res.u],
            "v": [_c(z) for z in res.v],
        },
        "settings": dict(settings),
    }
    rounds = res.diagnostics.get("predictor_rounds")
    if rounds:
        doc["predictor"]["rounds"] = [{"tol": t, "sigma_tilde": s, "seeded": bool(ok)}
                                      for t, s, ok in rounds]
    return doc


def roots_document(rs: RootSet, cutoff: Optional[float] = None) -> dict:
    return {
        "alpha0": rs.alpha0,
        "Na": rs.Na,
        "cutoff": cutoff,
        "roots": [_c(z) for z in rs.roots],
        "residuals": [float(r) for r in rs.residuals],
        "dropped": rs.dropped,
    }


def dump_document(doc: dict) -> str:
    return dumps(doc)


def load_document(text: str) -> dict:
    return json.loads(text)
