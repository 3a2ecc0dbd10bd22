# This software is licensed under NNCL v1.4 see LICENSE.md for more info
import hashlib
import json
import sys
import time
from datetime import datetime, timezone

from .errors import DocumentError


def now() -> float:
    return time.time()


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def read_input(path: str) -> str:
    """Read a whole document from a file path, or from stdin when path is '-'."""
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e}") from e


def sha256_digest(payload) -> str:
    if not isinstance(payload, str):
        payload = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    h = hashlib.sha256()
    h.update(payload.encode("utf-8"))
    return h.hexdigest()


def blocks(total: int, size: int) -> list[tuple[int, int, int]]:
    """Split range(total) into (block_index, start, count) triples of fixed size."""
    out = []
    start = 0
    idx = 0
    while start < total:
        count = min(size, total - start)
        out.append((idx, start, count))
        start += count
        idx += 1
    return out
