"""JSON schemas for models, metric descriptors and campaign configs.

Complex numbers are [re, im] pairs and matrices are row-major flat lists,
so every file is diff-friendly and exactly specifiable.  The schema is
versioned; only version 1 exists.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import ConfigError
from .monotone import (
    MonotoneFunction,
    anti_gns,
    bkm,
    from_measure,
    gns,
    kms,
    power,
)
from .qms import DensityMatrix, GKSLModel, density_matrix

SCHEMA_VERSION = 1


def matrix_to_pairs(m: np.ndarray) -> list[list[float]]:
    flat = np.asarray(m, dtype=complex).reshape(-1)  # row-major
    return [[float(z.real), float(z.imag)] for z in flat]


def pairs_to_matrix(pairs, dim: int, where: str) -> np.ndarray:
    if not isinstance(pairs, list) or len(pairs) != dim * dim:
        raise ConfigError(
            f"{where}: expected {dim * dim} [re, im] pairs, got "
            f"{len(pairs) if isinstance(pairs, list) else type(pairs).__name__}"
        )
    out = np.empty(dim * dim, dtype=complex)
    for k, pair in enumerate(pairs):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) for v in pair)
        ):
            raise ConfigError(f"{where}: entry {k} is not a [re, im] pair")
        out[k] = pair[0] + 1j * pair[1]
    return out.reshape((dim, dim))  # row-major


def model_to_dict(model: GKSLModel, rho: Optional[DensityMatrix] = None) -> dict:
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "dim": model.dim,
        "hamiltonian": matrix_to_pairs(model.hamiltonian),
        "jumps": [matrix_to_pairs(v) for v in model.jumps],
    }
    if rho is not None:
        doc["rho"] = matrix_to_pairs(rho.rho)
    return doc


def model_from_dict(doc) -> tuple[GKSLModel, Optional[DensityMatrix]]:
    if not isinstance(doc, dict):
        raise ConfigError("model config must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {doc.get('schema_version')!r}"
        )
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim < 2:
        raise ConfigError(f"dim must be an integer >= 2, got {dim!r}")
    h = pairs_to_matrix(doc.get("hamiltonian"), dim, "hamiltonian")
    jumps_doc = doc.get("jumps", [])
    if not isinstance(jumps_doc, list):
        raise ConfigError("jumps must be a list of matrices")
    jumps = tuple(
        pairs_to_matrix(j, dim, f"jumps[{k}]") for k, j in enumerate(jumps_doc)
    )
    try:
        model = GKSLModel(hamiltonian=h, jumps=jumps)
    except Exception as exc:
        raise ConfigError(f"invalid model: {exc}") from exc

    rho = None
    if "rho" in doc:
        try:
            rho = density_matrix(pairs_to_matrix(doc["rho"], dim, "rho"))
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"invalid rho: {exc}") from exc
    return model, rho


# ---------------------------------------------------------------------------
# Metric descriptors
# ---------------------------------------------------------------------------

_SIMPLE_KINDS = {"gns": gns, "anti-gns": anti_gns, "kms": kms, "bkm": bkm}


def function_to_descriptor(f: MonotoneFunction) -> dict:
    if f.kind in _SIMPLE_KINDS:
        return {"kind": f.kind}
    if f.kind == "power":
        return {"kind": "power", "alpha": f.alpha}
    if f.kind == "measure":
        atoms = [
            ["inf" if math.isinf(lam) else lam, w] for lam, w in f.atoms
        ]
        return {"kind": "measure", "atoms": atoms}
    raise ConfigError(f"function kind {f.kind!r} is not serializable")


def function_from_descriptor(doc) -> MonotoneFunction:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError(f"metric descriptor must have a 'kind': {doc!r}")
    kind = doc["kind"]
    if kind in _SIMPLE_KINDS:
        return _SIMPLE_KINDS[kind]()
    if kind == "power":
        try:
            return power(float(doc["alpha"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad power descriptor {doc!r}") from exc
    if kind == "measure":
        try:
            atoms = [
                (math.inf if lam == "inf" else float(lam), float(w))
                for lam, w in doc["atoms"]
            ]
            return from_measure(atoms)
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"bad measure descriptor {doc!r}") from exc
    raise ConfigError(f"unknown metric kind {kind!r}")


def parse_f_spec(spec: str) -> MonotoneFunction:
    """Parse command-line metric specs:
    gns | anti-gns | kms | bkm | power:ALPHA | measure:PATH."""
    if spec in _SIMPLE_KINDS:
        return _SIMPLE_KINDS[spec]()
    if spec.startswith("power:"):
        try:
            return power(float(spec.split(":", 1)[1]))
        except Exception as exc:
            raise ConfigError(f"bad power spec {spec!r}: {exc}") from exc
    if spec.startswith("measure:"):
        path = spec.split(":", 1)[1]
        doc = load_json(path)
        if isinstance(doc, list):
            doc = {"kind": "measure", "atoms": doc}
        return function_from_descriptor(doc)
    raise ConfigError(f"unknown metric spec {spec!r}")


def load_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}")
