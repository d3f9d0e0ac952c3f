"""Walk through the three PUF models and their reliability knobs.

Every number below is reproducible: all randomness flows from named,
seeded streams, so rerunning the script prints the same output.
"""

import numpy as np

from risecure.puf import (ArbiterPuf, SramPuf, XorArbiterPuf, calibrate_sigma,
                          eval_raw, measure_reliability, reference_response)

print("=== SRAM PUF ===")
sram = SramPuf(seed=7, num_blocks=16, block_bits=127, p=0.05)
ref = reference_response(sram, 0, 127)
read = eval_raw(sram, 0, noise_seed=1, n_bits=127)
print(f"block 0 reference (first 32 bits): {''.join(map(str, ref[:32]))}")
print(f"one noisy read differs in {int(np.sum(ref != read))} of 127 bits "
      f"(expected about {127 * sram.p:.1f})")
rel = measure_reliability(sram, trials=2000, seed=0)
print(f"measured reliability over 2000 reads: {100 * rel:.2f}% (1 - p = 95%)")

print()
print("=== arbiter PUF ===")
arb = ArbiterPuf(seed=11, stages=64)
target = 0.9976
sigma = calibrate_sigma(arb, target)
noisy = arb.with_sigma(sigma)
rel = measure_reliability(noisy, trials=2000, seed=1)
print(f"calibrated noise sigma = {sigma:.4f} for a {100 * target:.2f}% target")
print(f"measured reliability: {100 * rel:.2f}%")

print()
print("=== 4-xor arbiter PUF ===")
xor = XorArbiterPuf(seed=13, stages=64, chains=4)
target = 0.9952
sigma = calibrate_sigma(xor, target)
rel = measure_reliability(xor.with_sigma(sigma), trials=2000, seed=2)
print(f"calibrated sigma = {sigma:.4f}; measured {100 * rel:.2f}% "
      f"(same per-chain noise hurts more after xor)")

# a single response bit is just the sign of a weighted parity sum, which is
# why the raw arbiter falls to logistic regression (see 07_modeling_attack)
c = np.zeros(64, dtype=np.uint8)
print()
print(f"all-zeros challenge bit: {arb.eval_bits(c[None, :], None)[0]}, "
      f"weight sum sign: {int(np.sum(arb.weights) > 0)}")
