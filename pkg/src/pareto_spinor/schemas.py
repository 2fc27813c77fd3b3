"""JSON schemas of the CLI reports (schema id ``pareto-spinor/1``)."""

from __future__ import annotations

import jsonschema

SCHEMA_ID = "pareto-spinor/1"

_poly = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["exponents", "coeff"],
        "properties": {
            "exponents": {"type": "array", "items": {"type": "integer", "minimum": 0},
                          "minItems": 3, "maxItems": 3},
            "coeff": {"type": "string"},
        },
    },
}
_matrix = {"type": "array", "minItems": 2, "maxItems": 2,
           "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _poly}}


def _report(command: str, props: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "required": ["schema", "command", "ok", *required],
        "properties": {
            "schema": {"const": SCHEMA_ID},
            "command": {"const": command},
            "ok": {"type": "boolean"},
            **props,
        },
    }


_strata = {
    "type": "object",
    "required": ["n_components", "components", "rank0_nodes", "terminal_nodes"],
    "properties": {
        "n_components": {"type": "integer"},
        "components": {"type": "array", "items": {
            "type": "object", "required": ["size", "rank1", "rank0", "terminal"]}},
        "rank0_nodes": {"type": "array"},
        "terminal_nodes": {"type": "array"},
        "terminal_points": {"type": "array"},
    },
}

SCHEMAS = {
    "factorize-check": _report("factorize-check", {
        "factorization_residual_zero": {"type": "boolean"},
        "conformal_identity": {"type": "boolean"},
        "det_is_half_r4": {"type": "boolean"},
        "residual": _matrix,
    }, ["factorization_residual_zero", "conformal_identity", "det_is_half_r4"]),
    "skew-check": _report("skew-check", {
        "printed_residual_is_zero": {"type": "boolean"},
        "corrected_residual_is_zero": {"type": "boolean"},
        "residuals": {"type": "array", "items": {
            "type": "object", "required": ["form", "residual"],
            "properties": {"form": {"type": "string"}, "residual": _matrix}}},
    }, ["printed_residual_is_zero", "corrected_residual_is_zero", "residuals"]),
    "pareto-quadratic": _report("pareto-quadratic", {
        "A1": {"type": "array", "items": {"type": "string"}},
        "A2": {"type": "array", "items": {"type": "string"}},
        "theta": {"enum": ["origin", "lines", "plane"]},
        "strata": {"type": "object", "required": ["origin_critical", "pencil_roots", "lines"]},
    }, ["A1", "A2", "theta", "strata"]),
    "pareto-scan": _report("pareto-scan", {
        "res": {"type": "array", "items": {"type": "integer"}},
        "bounds": {"type": "array", "items": {"type": "number"}},
        "n_critical": {"type": "integer"},
        "oracle_agreement": {"type": "number"},
        "strata": _strata,
    }, ["res", "bounds", "n_critical", "oracle_agreement", "strata"]),
    "klein": _report("klein", {
        "r": {"type": "number"},
        "res": {"type": "array", "items": {"type": "integer"}},
        "n_critical": {"type": "integer"},
        "n_rank1": {"type": "integer"},
        "n_rank0": {"type": "integer"},
        "n_terminal_points": {"type": "integer"},
        "strata": _strata,
    }, ["r", "res", "n_critical", "n_rank1", "n_rank0", "n_terminal_points", "strata"]),
    "normal-form": _report("normal-form", {
        "order": {"type": "integer"},
        "seed": {"type": "integer"},
        "family": {"enum": ["generic", "realizable"]},
        "hamiltonian": _matrix,
        "correction": {"type": ["object", "null"]},
        "reconstruction_residual_zero": {"type": ["boolean", "null"]},
        "obstruction": {"type": ["object", "null"]},
    }, ["order", "seed", "family", "correction", "reconstruction_residual_zero", "obstruction"]),
    "helmholtz": _report("helmholtz", {
        "tau": {"type": "number"},
        "h": {"type": "number"},
        "bounds": {"type": "array", "items": {"type": "number"}},
        "res": {"type": "array", "items": {"type": "integer"}},
        "residuals": {"type": "object"},
    }, ["tau", "h", "bounds", "res", "residuals"]),
    "graphene": _report("graphene", {
        "t": {"type": "number"},
        "a": {"type": "number"},
        "variant": {"enum": ["as-printed", "standard"]},
        "lambda_at_origin": {"type": "number"},
        "dirac_points": {"type": "array", "items": {
            "type": "object", "required": ["p", "lambda"],
            "properties": {"p": {"type": "array", "items": {"type": "number"},
                                 "minItems": 2, "maxItems": 2},
                           "lambda": {"type": "number"}}}},
    }, ["t", "a", "variant", "lambda_at_origin", "dirac_points"]),
}


def validate(report: dict) -> None:
    jsonschema.validate(report, SCHEMAS[report["command"]])
