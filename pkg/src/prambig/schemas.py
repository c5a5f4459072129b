"""JSON schemas for the on-disk spec files."""
import json

import jsonschema

from .errors import PrambigError

_complex = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_vector = {"type": "array", "items": {"type": "number"}, "minItems": 1}

GRID = {
    "type": "object",
    "required": ["dim", "box_half_width", "samples_per_axis"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "box_half_width": {"type": "number", "exclusiveMinimum": 0},
        "samples_per_axis": {"type": "integer", "minimum": 2},
    },
}

SEQUENCE = {
    "type": "object",
    "required": ["epsilon", "coeffs"],
    "properties": {
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "atom_count": {"type": "integer", "minimum": 2},
        "spacing": {"type": "number"},
        "coeffs": {"type": "array", "items": _complex, "minItems": 2},
        "smoothing_order": {"type": "integer", "minimum": 0},
        "bump_width": {"type": ["number", "null"]},
    },
}

PAIR_SPEC = {
    "type": "object",
    "required": ["dim", "grid", "factors"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "grid": GRID,
        "factors": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["f", "g", "selection", "omega"],
                "properties": {
                    "f": SEQUENCE,
                    "g": SEQUENCE,
                    "selection": {
                        "type": "object",
                        "required": ["selected"],
                        "properties": {"selected": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
                    },
                    "omega": _vector,
                },
            },
        },
    },
}

COMPONENT = {
    "type": "object",
    "required": ["center", "weight"],
    "properties": {
        "center": _vector,
        "weight": _complex,
        "profile": {"enum": ["delta", "ball_bump"]},
        "radius": {"type": "number", "minimum": 0},
        "order": {"type": "integer", "minimum": 0},
        "domain_radius": {"type": ["number", "null"], "minimum": 0},
    },
}

SCENE_SPEC = {
    "type": "object",
    "required": ["dim", "components", "separation", "kernel_radius", "grid"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "components": {"type": "array", "items": COMPONENT, "minItems": 1},
        "separation": {"type": "number", "exclusiveMinimum": 0},
        "kernel_radius": {"type": "number", "exclusiveMinimum": 0},
        "grid": GRID,
    },
}

SCENE_FILE = {
    "type": "object",
    "required": ["scene", "pair"],
    "properties": {"scene": SCENE_SPEC, "pair": PAIR_SPEC},
}

COMPONENTS_FILE = {
    "type": "object",
    "required": ["components", "separation"],
    "properties": {
        "components": {"type": "array", "items": COMPONENT, "minItems": 1},
        "separation": {"type": "number", "exclusiveMinimum": 0},
        "kernel_radius": {"type": "number", "exclusiveMinimum": 0},
        "grid": GRID,
    },
}


class SchemaError(PrambigError):
    pass


def load_json(path, schema):
    """Parse ``path`` and validate it, reporting line numbers or JSON paths on failure."""
    text = open(path).read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    validate(obj, schema, str(path))
    return obj


def validate(obj, schema, where="<input>"):
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{where}: at {loc}: {exc.message}") from None
