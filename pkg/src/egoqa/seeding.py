"""Deterministic seed derivation.

Python's builtin hash() is salted per process, so all seed material is
derived from a keyed-length blake2b digest over the string forms of the
parts. Identical parts give identical seeds on every platform and run.
"""
from __future__ import annotations

import hashlib


def derive_seed(*parts: object) -> int:
    """Collapse arbitrary labels into a 64-bit RNG seed.

    Parts are length-prefixed before hashing so ("ab", "c") and ("a", "bc")
    derive different seeds.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        raw = str(part).encode("utf-8")
        h.update(len(raw).to_bytes(4, "big"))
        h.update(raw)
    return int.from_bytes(h.digest(), "big")
