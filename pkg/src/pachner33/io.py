"""JSON documents for complexes and deterministic report serialization.

Document schema (format_version "1"):

    {
      "format_version": "1",
      "simplices": [[v0, v1, v2, v3, v4], ...],   # orientation = array order
      "coords": {"0": [x, y, z, w], ...},          # optional, all vertices
      "metadata": {"name": "..."}                  # optional, string map
    }

Floats are written with 17 significant digits so parsing returns the exact
double.  Serialization is deterministic: keys keep a fixed order and vertex
keys are sorted numerically.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .complexes import build_complex
from .errors import SchemaError

FORMAT_VERSION = "1"


def format_float(x):
    return format(float(x), ".17g")


def _dump(obj, pieces):
    if isinstance(obj, dict):
        pieces.append("{")
        first = True
        for key, val in obj.items():
            if not first:
                pieces.append(", ")
            first = False
            pieces.append(json.dumps(str(key)))
            pieces.append(": ")
            _dump(val, pieces)
        pieces.append("}")
    elif isinstance(obj, (list, tuple)):
        pieces.append("[")
        for n, val in enumerate(obj):
            if n:
                pieces.append(", ")
            _dump(val, pieces)
        pieces.append("]")
    elif isinstance(obj, (bool, np.bool_)):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(format_float(obj))
    elif obj is None:
        pieces.append("null")
    else:
        pieces.append(json.dumps(obj))


def dumps(obj):
    """JSON text with 17-significant-digit floats and stable ordering."""
    pieces = []
    _dump(obj, pieces)
    return "".join(pieces)


@dataclass
class ComplexDocument:
    simplices: list
    coords: dict = None  # vertex id -> np.ndarray(4), or None
    metadata: dict = field(default_factory=dict)
    format_version: str = FORMAT_VERSION

    def to_complex(self, allow_boundary=False):
        return build_complex(self.simplices, allow_boundary=allow_boundary)

    def realization(self):
        if self.coords is None:
            return None
        return {v: np.asarray(p, dtype=float) for v, p in self.coords.items()}

    def with_coords(self, coords):
        return ComplexDocument(
            simplices=[list(s) for s in self.simplices],
            coords={int(v): [float(x) for x in p] for v, p in coords.items()},
            metadata=dict(self.metadata),
            format_version=self.format_version,
        )


def parse_complex(text, allow_boundary=False):
    """Parse and validate a document; errors name the offending field.

    The simplex list is additionally run through complex construction so a
    schema-valid but structurally broken document is rejected here.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("document root must be an object")

    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise SchemaError(f"format_version must be {FORMAT_VERSION!r}, got {version!r}")

    simplices = raw.get("simplices")
    if not isinstance(simplices, list) or not simplices:
        raise SchemaError("simplices must be a non-empty array")
    clean = []
    for n, s in enumerate(simplices):
        if not isinstance(s, list) or len(s) != 5:
            raise SchemaError(f"simplices[{n}] must be an array of 5 vertex ids")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in s):
            raise SchemaError(f"simplices[{n}] must contain integers")
        clean.append(list(s))

    vertices = sorted({v for s in clean for v in s})

    coords = None
    if raw.get("coords") is not None:
        rc = raw["coords"]
        if not isinstance(rc, dict):
            raise SchemaError("coords must be an object mapping vertex id to 4 reals")
        coords = {}
        for key, val in rc.items():
            try:
                vid = int(key)
            except ValueError:
                raise SchemaError(f"coords key {key!r} is not a vertex id")
            if not isinstance(val, list) or len(val) != 4:
                raise SchemaError(f"coords[{key}] must be an array of 4 reals")
            try:
                coords[vid] = [float(x) for x in val]
            except (TypeError, ValueError):
                raise SchemaError(f"coords[{key}] must contain numbers")
        for v in vertices:
            if v not in coords:
                raise SchemaError(f"coords is missing vertex {v}")

    metadata = raw.get("metadata", {})
    if metadata is None:
        metadata = {}
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise SchemaError("metadata must be a string-to-string map")

    doc = ComplexDocument(
        simplices=clean, coords=coords, metadata=metadata, format_version=version
    )
    doc.to_complex(allow_boundary=allow_boundary)  # structural validation
    return doc


def serialize_complex(doc):
    payload = {
        "format_version": doc.format_version,
        "simplices": [[int(v) for v in s] for s in doc.simplices],
    }
    if doc.coords is not None:
        payload["coords"] = {
            str(v): [float(x) for x in doc.coords[v]] for v in sorted(doc.coords)
        }
    if doc.metadata:
        payload["metadata"] = {k: doc.metadata[k] for k in sorted(doc.metadata)}
    return dumps(payload) + "\n"


def load_document(path, allow_boundary=False):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_complex(fh.read(), allow_boundary=allow_boundary)


def save_document(doc, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_complex(doc))


def fixture_text(name):
    return resources.files("pachner33.fixtures").joinpath(name).read_text("utf-8")


def load_fixture(name):
    return parse_complex(fixture_text(name))
