"""Hash output stage: R3 = H(R2 || C), the output mux, and bit statistics.

Widths are rigid on purpose. R2 must be exactly the code length and the
outer challenge C exactly 128 bits, so no length-extension or padding games
are possible; any deviation raises instead of truncating or padding.
"""

import hashlib

import numpy as np

from .extractor import reconstruct
from .puf import eval_raw

OUTER_CHALLENGE_BITS = 128
DIGEST_BITS = 256

_ALGORITHMS = {"sha3-256": "sha3_256", "sha2-256": "sha256"}


def bits_to_bytes(bits):
    """Pack a bit vector to bytes, most significant bit first per byte."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def bytes_to_bits(data, n_bits=None):
    bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    return bits if n_bits is None else bits[:n_bits]


def compose_response(r2_bits, c_bits, n_code, hash_name="sha3-256"):
    """R3 = H(R2 || C) as a 256-bit vector; widths checked exactly."""
    if hash_name not in _ALGORITHMS:
        raise ValueError(f"unknown hash {hash_name!r}; expected one of {sorted(_ALGORITHMS)}")
    r2 = np.asarray(r2_bits, dtype=np.uint8)
    c = np.asarray(c_bits, dtype=np.uint8)
    if r2.shape != (n_code,):
        raise ValueError(f"R2 must be exactly {n_code} bits, got shape {r2.shape}")
    if c.shape != (OUTER_CHALLENGE_BITS,):
        raise ValueError(f"outer challenge must be exactly {OUTER_CHALLENGE_BITS} bits, got shape {c.shape}")
    h = hashlib.new(_ALGORITHMS[hash_name])
    h.update(bits_to_bytes(r2))
    h.update(bits_to_bytes(c))
    return bytes_to_bits(h.digest())


def select_output(mode, puf, c0, code, helper=None, outer_challenge=None,
                  noise_seed=0, hash_name="sha3-256"):
    """Output mux over the 2-bit selector E.

    E=0 returns the raw response R1, E=1 the corrected R2, E=2 the hashed
    R3; E=3 is reserved and rejected. Modes 1 and 2 return None when
    reconstruction fails.
    """
    mode = int(mode)
    if mode == 0:
        return eval_raw(puf, c0, noise_seed, code.n_bits)
    if mode in (1, 2):
        if helper is None:
            raise ValueError(f"mode E={mode:02b} requires helper data")
        if mode == 2 and outer_challenge is None:
            raise ValueError("mode E=10 requires an outer challenge")
        r2 = reconstruct(puf, c0, helper, noise_seed)
        if mode == 1 or r2 is None:
            return r2
        return compose_response(r2, outer_challenge, code.n_bits, hash_name)
    if mode == 3:
        raise ValueError("selector E=11 is reserved")
    raise ValueError(f"selector must be a 2-bit value, got {mode}")


def unpredictability_report(samples, threshold=4.0):
    """Bit statistics over a batch of digests, pass/fail at `threshold` sigma.

    Checks overall ones frequency (monobit), the worst per-position bias,
    and lag-1 serial correlation of the concatenated stream. A cryptographic
    digest over distinct inputs should sit within a few sigma of fair-coin
    behavior on all three.
    """
    x = np.asarray(samples, dtype=np.uint8)
    if x.ndim != 2 or len(x) < 1000:
        raise ValueError("need a 2-d batch of at least 1000 digests")
    n, w = x.shape
    total = n * w

    ones = float(x.mean())
    monobit_z = abs(ones - 0.5) * 2.0 * np.sqrt(total)

    per_bit = x.mean(axis=0)
    bias_z = float(np.max(np.abs(per_bit - 0.5)) * 2.0 * np.sqrt(n))

    flat = x.ravel().astype(np.float64) - ones
    denom = float(np.dot(flat, flat))
    serial = float(np.dot(flat[:-1], flat[1:]) / denom) if denom else 1.0
    serial_z = abs(serial) * np.sqrt(total)

    return {
        "samples": n,
        "bits_per_sample": w,
        "ones_fraction": ones,
        "monobit_z": float(monobit_z),
        "max_bit_bias_z": bias_z,
        "serial_corr_z": float(serial_z),
        "threshold": threshold,
        "pass": bool(monobit_z <= threshold and bias_z <= threshold and serial_z <= threshold),
    }
