import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from returnlab.exceptions import NotFoundError


def format_float(value):
    """Floats at 17 significant digits, integers as integers."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def to_jsonable(value):
    """Convert numpy scalars and arrays (recursively) into JSON types."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def canonical_json(document):
    """Sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_jsonable(document), sort_keys=True, indent=2) + "\n"


def config_hash(config):
    """
    Git blob hash of the canonical JSON of a config.

    Equals `git hash-object` of the canonical file.
    """
    payload = canonical_json(config).encode("utf-8")
    header = f"blob {len(payload)}\0".encode("utf-8")
    return hashlib.sha1(header + payload).hexdigest()


def load_json(path):
    """
    Read a JSON document.

    Raises:
        NotFoundError: If the file does not exist.
    """
    path = Path(path)
    if not path.is_file():
        raise NotFoundError(
            f"Config file {str(path)!r} does not exist.", loc=["config"]
        )
    with path.open("r", encoding="utf-8") as handle:
        return json.load(handle)


def atomic_write(path, text):
    """Write text through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temporary = tempfile.mkstemp(
        dir=path.parent, prefix=f".{path.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="\n") as out:
            out.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.unlink(temporary)
        raise


def csv_text(header, rows, metadata=None):
    """
    CSV document with optional '# key=value' metadata lines.

    Args:
        header (list[str]): Column names; always written.
        rows (iterable): Sequences of values, formatted with format_float
        unless already strings.
        metadata (dict): Written sorted by key before the header.
    """
    lines = []
    for key in sorted(metadata or {}):
        value = metadata[key]
        if not isinstance(value, str):
            value = json.dumps(to_jsonable(value), sort_keys=True)
        lines.append(f"# {key}={value}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(
            ",".join(
                item if isinstance(item, str) else format_float(item)
                for item in row
            )
        )
    return "\n".join(lines) + "\n"
