"""Plain-text domain descriptions.

Grammar (one ``key = value`` per line, ``#`` starts a comment, blank lines ignored)::

    type = rectangle | ellipse | polygon
    w = <real>          # rectangle width  (x extent)
    h = <real>          # rectangle height (y extent)
    a = <real>          # ellipse semi-axis along x
    b = <real>          # ellipse semi-axis along y
    vertices = x1 y1; x2 y2; x3 y3; ...   # polygon, at least three vertices

Keys are case-insensitive. Every key required by the type must be present and
no other key is allowed. All domains are centred at the origin as written.
"""

from __future__ import annotations

from pathlib import Path

from .domain2d import ConvexPolygon, Ellipse, Rectangle
from .errors import DomainError, OugapError

REQUIRED = {"rectangle": ("w", "h"), "ellipse": ("a", "b"), "polygon": ("vertices",)}


class DomainFileError(OugapError, ValueError):
    def __init__(self, message, key=None, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.key = key
        self.line = line


def _real(text, key, line):
    try:
        value = float(text)
    except ValueError:
        raise DomainFileError(f"key '{key}': {text!r} is not a decimal number", key, line) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise DomainFileError(f"key '{key}': value must be finite", key, line)
    return value


def parse_domain(text: str):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise DomainFileError(f"expected 'key = value', got {body!r}", None, lineno)
        key, value = (part.strip() for part in body.split("=", 1))
        key = key.lower()
        if not key:
            raise DomainFileError("missing key before '='", None, lineno)
        if key in entries:
            raise DomainFileError(f"key '{key}' given twice", key, lineno)
        entries[key] = (value, lineno)

    if "type" not in entries:
        raise DomainFileError("missing required key 'type'", "type")
    kind, type_line = entries.pop("type")
    kind = kind.lower()
    if kind not in REQUIRED:
        raise DomainFileError(f"key 'type': unknown domain type {kind!r}", "type", type_line)
    for key in REQUIRED[kind]:
        if key not in entries:
            raise DomainFileError(f"missing required key '{key}' for type {kind}", key)
    for key, (_, lineno) in entries.items():
        if key not in REQUIRED[kind]:
            raise DomainFileError(f"unexpected key '{key}' for type {kind}", key, lineno)

    try:
        if kind == "rectangle":
            return Rectangle(*(_real(entries[k][0], k, entries[k][1]) for k in ("w", "h")))
        if kind == "ellipse":
            return Ellipse(*(_real(entries[k][0], k, entries[k][1]) for k in ("a", "b")))
        value, lineno = entries["vertices"]
        vertices = []
        for chunk in value.split(";"):
            if not chunk.strip():
                continue
            parts = chunk.split()
            if len(parts) != 2:
                raise DomainFileError(f"key 'vertices': {chunk.strip()!r} is not an 'x y' pair",
                                      "vertices", lineno)
            vertices.append([_real(p, "vertices", lineno) for p in parts])
        return ConvexPolygon(vertices)
    except DomainError as exc:
        keys = "/".join(REQUIRED[kind])
        raise DomainFileError(f"key '{keys}': {exc}", REQUIRED[kind][0]) from exc


def load_domain(path) -> object:
    return parse_domain(Path(path).read_text())
