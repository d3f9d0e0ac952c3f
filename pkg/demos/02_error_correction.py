"""Exercise both codecs at, below, and beyond their correction capability."""

import numpy as np

from risecure.extractor import get_code

rng = np.random.default_rng(0)

for name, t_desc in (("bch", "15 bit errors"), ("rs", "16 symbol errors")):
    code = get_code(name)
    print(f"=== {code.code_id}: n={code.n_bits} bits, k={code.k_bits} bits ===")
    msg = rng.integers(0, 2, code.k_bits, dtype=np.uint8)
    cw = code.encode_bits(msg)

    assert np.array_equal(code.decode_bits(cw), msg)
    print("clean roundtrip: ok")

    bad = cw.copy()
    if name == "bch":
        bad[rng.choice(code.n_bits, 15, replace=False)] ^= 1
    else:
        for s in rng.choice(255, 16, replace=False):
            byte = np.array([rng.integers(1, 256)], dtype=np.uint8)
            bad[8 * s : 8 * s + 8] ^= np.unpackbits(byte)
    out = code.decode_bits(bad)
    print(f"at capability ({t_desc}): decoded, "
          f"message intact: {np.array_equal(out, msg)}")

    # push it well past t and the decoder refuses rather than guessing
    hopeless = cw.copy()
    hopeless[rng.choice(code.n_bits, code.n_bits // 3, replace=False)] ^= 1
    print(f"at n/3 corrupted bits: decode_bits -> {code.decode_bits(hopeless)}")
    print()

bch = get_code("bch")
msgs = rng.integers(0, 2, (200, bch.k_bits), dtype=np.uint8)
failures = 0
for m in msgs:
    noisy = bch.encode_bits(m)
    noisy[rng.choice(127, 16, replace=False)] ^= 1  # one past capability
    got = bch.decode_bits(noisy)
    if got is None or not np.array_equal(got, m):
        failures += 1
print(f"bch with t+1=16 errors: {failures}/200 not recovered "
      "(bounded-distance decoding has no promise past t)")
