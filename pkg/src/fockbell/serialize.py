"""Small deterministic emitters shared by the command line and the scripts."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence


def format_value(value) -> str:
    """Fixed textual form: 17 significant digits for floats, plain otherwise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def tree_text(obj) -> str:
    """Canonical structured-tree form: sorted keys, stable indentation."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
