"""Deterministic derivation of independent random streams from one seed.

Child seeds are hashes of the base seed plus a path of tags, so parallel
workers can draw their own streams without coordinating, and results do not
depend on evaluation order. Hashing goes through SHA-256 rather than
``hash()`` because the latter is salted per interpreter run.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(base: int, *parts: int | str) -> int:
    """Derive a 64-bit child seed from ``base`` and a path of tags."""
    h = hashlib.sha256(str(int(base)).encode("ascii"))
    for part in parts:
        h.update(b"/")
        h.update(str(part).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")


def child_rng(base: int, *parts: int | str) -> random.Random:
    """A fresh ``random.Random`` seeded from ``derive_seed(base, *parts)``."""
    return random.Random(derive_seed(base, *parts))
