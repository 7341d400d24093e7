"""Seed derivation and portable random streams.

Every random draw in the lab goes through a Philox counter-based generator
keyed by ``(seed, stream)``, so a stream is reproducible bit for bit and
independent streams can be consumed in any order.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(*parts: object) -> int:
    """Hash ``parts`` into a 64-bit seed (BLAKE2b, 8-byte digest)."""
    text = "\x1f".join(repr(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    key = np.array([seed & MASK64, stream & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
