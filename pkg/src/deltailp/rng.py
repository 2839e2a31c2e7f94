"""Splittable deterministic random source.

All randomness in the package flows from a single 64-bit seed.  Child
streams are derived by hashing the parent seed together with a string
label, so the stream consumed by one component never depends on how much
randomness another component drew.
"""

from __future__ import annotations

import hashlib
import random

MASK64 = (1 << 64) - 1


def split_seed(seed: int, label: str) -> int:
    """Derive a child 64-bit seed from (seed, label), deterministically."""
    h = hashlib.blake2b(digest_size=8)
    h.update((seed & MASK64).to_bytes(8, "little"))
    h.update(label.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def stream(seed: int, label: str) -> random.Random:
    """A random.Random seeded from the (seed, label) split."""
    return random.Random(split_seed(seed, label))
