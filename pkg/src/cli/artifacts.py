"""
Artifact writers.

Every artifact is written to a temporary file in the target directory and
moved into place with os.replace, so readers never see a partial file.
"""

import io
import os
import tempfile
from pathlib import Path

import orjson
import pandas as pd

from src.glaeser.logging import log_artifact_written

CSV_FLOAT_FORMAT = "%.12g"


def atomic_write_bytes(path: str | Path, payload: bytes, kind: str = "file") -> Path:
    """Write bytes atomically (temp file + rename) and log the artifact."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    log_artifact_written(kind, str(path))
    return path


def write_csv(frame: pd.DataFrame, path: str | Path, kind: str = "csv") -> Path:
    """CSV with a header row, minimal quoting and '\\n' line endings."""
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return atomic_write_bytes(path, buffer.getvalue().encode("utf-8"), kind)


def read_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path)


def write_json(document: dict, path: str | Path, kind: str = "report") -> Path:
    payload = orjson.dumps(
        document,
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY,
    )
    return atomic_write_bytes(path, payload + b"\n", kind)


def write_text(text: str, path: str | Path, kind: str = "svg") -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"), kind)
