"""Deterministic output serialization: 17-significant-digit floats everywhere."""

from __future__ import annotations

import json
from typing import Iterable, Sequence


def fmt(x) -> str:
    """One scalar as text; floats carry 17 significant digits."""
    if x is None:
        return "nan"   # failed sweep rows arrive as JSON null
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _render(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_render(v, indent + 1)}' for k, v in obj.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ", ".join(_render(v, indent + 1) for v in obj)
        return "[" + items + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return fmt(obj)


def dump_json(obj: dict, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(_render(obj))
        fh.write("\n")


def dump_csv(path: str, header: Sequence[str], rows: Iterable[Sequence],
             comments: Sequence[str] = ()) -> None:
    """CSV with '.' decimals and ',' delimiter; header first, then '#' comments."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for c in comments:
            fh.write(f"# {c}\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")
