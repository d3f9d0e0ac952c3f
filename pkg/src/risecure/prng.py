"""Deterministic, domain-separated random streams.

Every random draw in this package flows through :func:`stream`: a Philox
counter-based generator keyed by hashing a purpose tag together with the
caller's integer seeds. Identical (tag, seeds) always yield the identical
stream, independent of call order or platform, which is what makes every
simulation, benchmark and attack run here bit-reproducible.
"""

import hashlib
import struct

import numpy as np

MASK64 = (1 << 64) - 1

#: splitmix64 increment, also used by the public challenge mixer.
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

_U = np.uint64


def _domain_hash(tag: str, seeds) -> bytes:
    h = hashlib.sha256()
    h.update(tag.encode("utf-8"))
    h.update(b"\x00")
    for s in seeds:
        h.update(struct.pack("<Q", int(s) & MASK64))
    return h.digest()


def derive_seed(tag: str, *seeds: int) -> int:
    """Derive a fresh 64-bit seed from a purpose tag and parent seeds."""
    return int.from_bytes(_domain_hash(tag, seeds)[:8], "little")


def stream(tag: str, *seeds: int) -> np.random.Generator:
    """Return a Philox generator for the domain named by (tag, seeds)."""
    key = int.from_bytes(_domain_hash(tag, seeds)[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))


def splitmix64(x):
    """splitmix64 finalizer, elementwise over numpy uint64 input.

    ``splitmix64(seed + i*GOLDEN_GAMMA)`` reproduces output i of the
    reference splitmix64 sequence for ``seed``.
    """
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _U(GOLDEN_GAMMA)
        z = (z ^ (z >> _U(30))) * _U(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U(27))) * _U(0x94D049BB133111EB)
        return z ^ (z >> _U(31))
