"""Parameter files: JSON mapping layer names to shape-annotated flat arrays.

Layout::

    {"format": "absa-params", "version": 1,
     "params": {"<layer>.<name>": {"shape": [rows, cols], "data": [...]}}}

Keys are written in sorted order and floats use Python's shortest
round-trip representation, so equal parameters give equal bytes.
"""

import json
import os
import tempfile

import numpy as np

from ..errors import FormatError, NumericError, ShapeError

FORMAT = "absa-params"
VERSION = 1


def atomic_write_text(path, text):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_params(params):
    """Serialize a ``{name: array}`` mapping (or a list of Parameters)."""
    if not isinstance(params, dict):
        params = {p.name: p.value for p in params}
    out = {}
    for name in sorted(params):
        a = np.asarray(params[name], dtype=np.float64)
        if not np.all(np.isfinite(a)):
            raise NumericError(f"parameter {name} contains non-finite values")
        out[name] = {"shape": list(a.shape), "data": [float(x) for x in a.ravel()]}
    return json.dumps({"format": FORMAT, "version": VERSION, "params": out}, indent=1) + "\n"


def save_params(path, params):
    atomic_write_text(path, dumps_params(params))


def loads_params(text, source="<string>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e.msg}", source, e.lineno) from None
    if doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise FormatError(f"not an {FORMAT} v{VERSION} file", source)
    out = {}
    for name, entry in doc["params"].items():
        shape = tuple(entry["shape"])
        data = np.array(entry["data"], dtype=np.float64)
        if data.size != int(np.prod(shape)):
            raise FormatError(f"{name}: {data.size} values for shape {shape}", source)
        out[name] = data.reshape(shape)
    return out


def load_params(path):
    with open(path, encoding="utf-8") as f:
        return loads_params(f.read(), path)


def assign_params(params, values):
    """Copy loaded ``values`` into a list of Parameters, checking names and shapes."""
    names = {p.name for p in params}
    missing = names - set(values)
    extra = set(values) - names
    if missing or extra:
        raise ShapeError(f"parameter mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}")
    for p in params:
        v = values[p.name]
        if v.shape != p.value.shape:
            raise ShapeError(f"{p.name}: stored shape {v.shape} != model shape {p.value.shape}")
        p.value[...] = v
