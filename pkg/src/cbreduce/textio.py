"""Matrix documents and value formatting.

A matrix document is JSON::

    {"rows": 2, "cols": 4, "d": 1, "vars": ["r"],
     "discriminant": "r^2 + 1",
     "entries": ["1", "0", "r + sqrtD", "-1", ...],
     "transposed": false}

``entries`` is row-major over the stored shape.  With ``"transposed": true``
the stored array is read as the transpose of the intended matrix, which lets
a right factor be written in the printed k x n layout.  ``sqrtD`` denotes the
square root of the discriminant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .exactmat import ExactMatrix
from .laurent import LaurentPoly, default_names, parse_expression, parse_poly
from .quadext import QuadExt, fmt_value, simplify


class InputError(ValueError):
    """Malformed input document; the message names the source."""


@dataclass(frozen=True)
class Context:
    """Shared variable names and optional discriminant of a computation."""

    nvars: int = 0
    names: tuple[str, ...] = ()
    disc: LaurentPoly | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def fmt(self, x) -> str:
        return fmt_value(x, self.names or None)


def parse_value(text: str, ctx: Context):
    symbols = {}
    if ctx.disc is not None:
        symbols["sqrtD"] = QuadExt.sqrt(ctx.disc)
    return simplify(parse_expression(str(text), ctx.nvars, ctx.names or None, symbols))


def matrix_from_document(doc: dict, source: str = "<document>") -> tuple[ExactMatrix, Context]:
    try:
        rows, cols = int(doc["rows"]), int(doc["cols"])
        d = int(doc.get("d", 0))
        names = tuple(doc.get("vars") or default_names(d))
        if len(names) != d:
            raise InputError(f"{source}: {len(names)} variable names for d = {d}")
        disc = None
        ctx = Context(d, names)
        if doc.get("discriminant"):
            disc = parse_poly(doc["discriminant"], d, names)
            ctx = Context(d, names, disc)
        entries = doc["entries"]
    except KeyError as exc:
        raise InputError(f"{source}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{source}: {exc}") from None
    if len(entries) != rows * cols:
        raise InputError(f"{source}: expected {rows * cols} entries, found {len(entries)}")
    values = []
    for idx, text in enumerate(entries):
        try:
            values.append(parse_value(text, ctx))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{source}: entry {idx} (row {idx // cols + 1}, col {idx % cols + 1}) {text!r}: {exc}") from None
    m = ExactMatrix([values[r * cols:(r + 1) * cols] for r in range(rows)])
    if doc.get("transposed"):
        m = m.transpose()
    return m, ctx


def load_matrix(path: str | Path) -> tuple[ExactMatrix, Context]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return matrix_from_document(doc, str(path))


def matrix_document(m: ExactMatrix, ctx: Context | None = None) -> dict:
    ctx = ctx or Context()
    doc = {"rows": m.nrows, "cols": m.ncols, "d": ctx.nvars}
    if ctx.names:
        doc["vars"] = list(ctx.names)
    if ctx.disc is not None:
        doc["discriminant"] = ctx.disc.format(ctx.names or None)
    doc["entries"] = [format_entry(x, ctx) for r in m.rows() for x in r]
    return doc


def format_entry(x, ctx: Context) -> str:
    """Entry syntax accepted back by parse_value."""
    names = ctx.names or None
    if isinstance(x, QuadExt):
        if ctx.disc is None:
            raise ValueError("radical entry needs a discriminant in the context")
        coef = simplify((x - x.rat) / QuadExt.sqrt(ctx.disc))
        return f"({fmt_value(x.rat, names)}) + ({fmt_value(coef, names)})*sqrtD"
    return fmt_value(x, names)


def merge_contexts(a: Context, b: Context) -> Context:
    if a.nvars != b.nvars and a.nvars and b.nvars:
        raise InputError("left and right matrices use different numbers of variables")
    base = a if a.nvars >= b.nvars else b
    disc = a.disc if a.disc is not None else b.disc
    return Context(base.nvars, base.names, disc)


def subset_str(s: Sequence[int]) -> str:
    return "{" + ",".join(map(str, s)) + "}"
