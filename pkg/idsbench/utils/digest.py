import hashlib
from pathlib import Path

import numpy as np


def file_digest(path: Path, chunk_size: int = 1 << 20) -> str:
    """SHA-256 of a file's bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            h.update(chunk)
    return h.hexdigest()


def array_digest(*arrays: np.ndarray) -> str:
    """SHA-256 over the shapes, dtypes and bytes of the given arrays."""
    h = hashlib.sha256()
    for a in arrays:
        a = np.asarray(a)
        h.update(str(a.shape).encode())
        h.update(str(a.dtype).encode())
        if a.dtype == object:
            # object arrays hold pointers, hash the tokens instead
            h.update("\x1f".join(map(str, a.ravel().tolist())).encode("utf-8"))
        else:
            h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()
