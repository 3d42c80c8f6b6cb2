"""File formats and atomic writes."""
import hashlib
import json
import os
import tempfile

import numpy as np


def complex_to_json(A):
    A = np.asarray(A)
    return {"re": np.real(A).tolist(), "im": np.imag(A).tolist()}


def matrix_from_json(obj):
    """``{"n", "re", "im"}`` -> complex square matrix."""
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValueError("matrix JSON needs 're' (and optionally 'im')")
    re = np.array(obj["re"], dtype=float)
    im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.ndim != 2 or re.shape[0] != re.shape[1] or im.shape != re.shape:
        raise ValueError("matrix must be square with matching re/im parts")
    if "n" in obj and int(obj["n"]) != re.shape[0]:
        raise ValueError(f"declared n={obj['n']} does not match matrix size {re.shape[0]}")
    return re + 1j * im


def matrix_to_json(A):
    A = np.asarray(A)
    return {"n": int(A.shape[0])} | complex_to_json(A)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def atomic_write(path, text):
    """Write via a temporary file in the same directory and rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def config_hash(config):
    blob = json.dumps(config, sort_keys=True, default=_default).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
