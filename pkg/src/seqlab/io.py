"""Deterministic CSV/JSON emission.

Floats are formatted as their shortest round-trip decimal (repr), lines
end in LF, and file writes go through a temp file plus os.replace so a
crashed run never leaves a half-written artifact.  Identical data gives
byte-identical files.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

__all__ = ["format_value", "csv_text", "json_text", "write_text", "emit"]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header: str, rows) -> str:
    lines = [header]
    width = len(header.split(","))
    for row in rows:
        if len(row) != width:
            raise ValueError(f"row width {len(row)} != header width {width}")
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def json_text(obj) -> str:
    # json emits floats via repr already (shortest round-trip)
    return json.dumps(obj, indent=2, default=_json_default) + "\n"


def write_text(path, text: str) -> None:
    """Atomic write: temp file in the target directory, then os.replace."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def emit(text: str, out_path=None) -> None:
    """Write to out_path, or stdout when no path is given."""
    if out_path is None:
        print(text, end="")
    else:
        write_text(out_path, text)
