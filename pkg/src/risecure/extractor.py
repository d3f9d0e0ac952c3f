"""Code-offset fuzzy extractor: enrollment and reconstruction.

Enrollment draws a fresh random message r, encodes it, and publishes
aux = Encode(r) XOR R1 where R1 is a noisy PUF read. Reconstruction takes a
new read R1', decodes aux XOR R1' back to r, and returns
R2 = Encode(r) XOR aux, which equals the enrollment-time R1 whenever the
two reads differ in at most t correctable positions. aux is public: it
reveals nothing useful without the PUF because r is uniform.
"""

from dataclasses import dataclass

import numpy as np

from .bch import BchCode
from .prng import stream
from .puf import eval_raw, reference_response
from .reed_solomon import ReedSolomonCode

SCHEMA_VERSION = 1

_CODES = {}


def get_code(name):
    """Look up a codec by short name ('bch', 'rs') or full code id."""
    key = name.lower()
    if key in ("bch", "bch-127-36-15"):
        key = "bch-127-36-15"
        factory = BchCode
    elif key in ("rs", "rs-255-223-16"):
        key = "rs-255-223-16"
        factory = ReedSolomonCode
    else:
        raise ValueError(f"unknown code {name!r}; expected 'bch' or 'rs'")
    if key not in _CODES:
        _CODES[key] = factory()
    return _CODES[key]


@dataclass
class HelperData:
    """Public helper string binding an enrollment to a PUF read."""

    aux: np.ndarray  # n_bits of uint8
    code_id: str

    def to_json(self):
        return {
            "version": SCHEMA_VERSION,
            "code_id": self.code_id,
            "n": int(len(self.aux)),
            "aux": np.packbits(self.aux).tobytes().hex(),
        }

    @classmethod
    def from_json(cls, doc):
        if doc.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported helper-data version {doc.get('version')!r}")
        n = int(doc["n"])
        raw = bytes.fromhex(doc["aux"])
        if len(raw) != -(-n // 8):
            raise ValueError(f"aux hex length {len(raw)} bytes inconsistent with n={n}")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
        if bits[n:].any():
            raise ValueError("nonzero padding bits in final aux byte")
        code = get_code(doc["code_id"])
        if code.n_bits != n:
            raise ValueError(f"n={n} does not match code {doc['code_id']} (n={code.n_bits})")
        return cls(aux=bits[:n].copy(), code_id=doc["code_id"])


def enroll(puf, c0, code, rng_seed):
    """Enroll (puf, c0); returns (HelperData, enrolled R2).

    Enrollment happens once, at provisioning time, under nominal conditions
    (in hardware: temporal majority voting over repeated reads), so R1 is
    the device's reference response. Later reconstructions see single noisy
    reads and recover this R1 exactly while decode succeeds. Anchoring to
    the reference keeps the per-reconstruction error count at Binomial(n, p)
    instead of the doubled 2p(1-p) rate a noisy anchor would give.
    """
    r = stream("enroll-secret", rng_seed).integers(0, 2, code.k_bits, dtype=np.uint8)
    r1 = reference_response(puf, c0, code.n_bits)
    aux = code.encode_bits(r) ^ r1
    return HelperData(aux=aux.astype(np.uint8), code_id=code.code_id), r1.copy()


def reconstruct(puf, c0, helper, noise_seed):
    """Recover the enrolled R2 from a fresh noisy read; None if decode fails."""
    code = get_code(helper.code_id)
    r1_new = eval_raw(puf, c0, noise_seed, code.n_bits)
    msg = code.decode_bits(helper.aux ^ r1_new)
    if msg is None:
        return None
    return (code.encode_bits(msg) ^ helper.aux).astype(np.uint8)
