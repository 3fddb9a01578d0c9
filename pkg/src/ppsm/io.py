"""Model file format (ppsm-v1).

A model is a JSON object with a "format" tag and exactly one of:

    {"format": "ppsm-v1", "coefficients": [c1, ..., c7]}
    {"format": "ppsm-v1", "table": [p0, ..., p7]}

using the flat table index 4*b(psi) + 2*b(s) + b(phi), b(+1)=0, b(-1)=1.
"""

from __future__ import annotations

import json
from typing import Union

from .model import (
    CoefficientVector,
    ProbabilityTable,
    coefficients_from_table,
    table_from_coefficients,
)

FORMAT_TAG = "ppsm-v1"

Model = Union[CoefficientVector, ProbabilityTable]


def model_to_dict(model: Model) -> dict:
    if isinstance(model, CoefficientVector):
        return {"format": FORMAT_TAG, "coefficients": list(model.c)}
    if isinstance(model, ProbabilityTable):
        return {"format": FORMAT_TAG, "table": list(model.p)}
    raise TypeError(f"not a model: {model!r}")


def model_from_dict(obj: dict) -> Model:
    """Parse a model object; returns whichever representation was stored."""
    if not isinstance(obj, dict):
        raise ValueError("model document must be a JSON object")
    if obj.get("format") != FORMAT_TAG:
        raise ValueError(f'model document must declare "format": "{FORMAT_TAG}"')
    has_c = "coefficients" in obj
    has_t = "table" in obj
    if has_c == has_t:
        raise ValueError('exactly one of "coefficients" or "table" must be present')
    if has_c:
        return CoefficientVector(tuple(obj["coefficients"]))
    return ProbabilityTable(tuple(obj["table"]))


def as_table(model: Model) -> ProbabilityTable:
    if isinstance(model, ProbabilityTable):
        return model
    return table_from_coefficients(model)


def as_coefficients(model: Model) -> CoefficientVector:
    if isinstance(model, CoefficientVector):
        return model
    return coefficients_from_table(model)


def load_model(path: str) -> Model:
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def save_model(model: Model, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh)
        fh.write("\n")
