"""Canonical JSON serialization.

Every artifact the pipeline persists or serves over HTTP goes through
dump_json so that byte-for-byte comparisons (store durability, API/module
equivalence, deterministic re-runs) are meaningful.
"""

import json
from typing import Any


def dump_json(obj: Any) -> bytes:
    """Serialize deterministically: sorted keys, no whitespace, UTF-8."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def dump_json_str(obj: Any) -> str:
    return dump_json(obj).decode("utf-8")


def load_json(data: bytes | str) -> Any:
    return json.loads(data)
