"""Deterministic CSV emission: shortest round-trip floats, LF endings, atomic writes."""

from __future__ import annotations

import math
import os
import sys
import tempfile
from typing import Iterable, Sequence


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if hasattr(v, "item"):  # numpy scalar
        return format_value(v.item())
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        # repr is the shortest string that round-trips, never above 17 digits
        return repr(v)
    if isinstance(v, complex):
        return f"{format_value(v.real)}{'+' if v.imag >= 0 or math.isnan(v.imag) else '-'}{format_value(abs(v.imag))}j"
    return str(v)


def format_row(values: Iterable) -> str:
    return ",".join(format_value(v) for v in values) + "\n"


def render(header: Sequence[str], rows: Iterable[Iterable]) -> str:
    return ",".join(header) + "\n" + "".join(format_row(r) for r in rows)


def write_atomic(path: str | None, text: str) -> None:
    """Write text to path via a temp file in the same directory plus rename.

    ``None`` or ``"-"`` writes to stdout.
    """
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
