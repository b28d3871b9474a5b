"""
CSV emission with a metadata header.

Floats use 17 significant digits so every value round-trips. Files are written
to a temporary sibling and renamed into place; the target path never holds a
partial file.
"""

import csv
import logging
import os
import sys
import tempfile
from collections.abc import Iterable, Mapping, Sequence
from enum import Enum
from pathlib import Path
from typing import Any, Optional, TextIO

import numpy as np

from dressed_cavity.errors import OutputError

logger = logging.getLogger(__name__)

STDOUT = "-"


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write(
    handle: TextIO,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    meta: Optional[Mapping[str, Any]],
) -> int:
    for key, value in (meta or {}).items():
        handle.write(f"# meta: {key}={format_value(value)}\n")
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([format_value(value) for value in row])
        count += 1
    return count


def write_csv(
    path: Optional[str],
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    meta: Optional[Mapping[str, Any]] = None,
) -> int:
    """Write rows to path (stdout for None or '-'); returns the number of data rows."""
    if path is None or path == STDOUT:
        return _write(sys.stdout, header, rows, meta)

    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    try:
        handle = tempfile.NamedTemporaryFile(
            mode="w",
            newline="",
            encoding="utf-8",
            dir=directory,
            prefix=f".{target.name}.",
            suffix=".tmp",
            delete=False,
        )
    except OSError as e:
        raise OutputError(f"cannot create output in {directory}: {e}", path=str(path)) from e

    temp_name = handle.name
    try:
        with handle:
            count = _write(handle, header, rows, meta)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(temp_name, target)
    except BaseException as e:
        try:
            os.unlink(temp_name)
        except FileNotFoundError:
            pass
        if isinstance(e, OSError):
            raise OutputError(f"failed writing {path}: {e}", path=str(path)) from e
        raise

    logger.info("wrote %d rows to %s", count, target)
    return count
