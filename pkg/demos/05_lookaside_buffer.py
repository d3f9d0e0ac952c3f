"""Batch sampling with and without the lookaside buffer.

The buffer caches corrected responses keyed by (puf id, inner challenge).
Repeated samples of one key then cost a read and a hash instead of a full
ECC decode, which is where the batch speedup comes from. Counters are
exact; wall-clock numbers depend on the host.
"""

import argparse

from risecure.bench import FPGA_REFERENCE, run_batch_bench, run_throughput_bench

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--code", choices=("bch", "rs"), default="rs")
parser.add_argument("--repeats", type=int, default=3)
args = parser.parse_args()

rep = run_batch_bench(args.code, batch_sizes=(1, 2, 4, 8, 16),
                      repeats=args.repeats, seed=0)
print(f"repeated-key batch workload, {rep['code']}, buffer capacity "
      f"{rep['capacity']}:")
for row in rep["rows"]:
    unb, buf = row["unbuffered"], row["buffered"]
    print(f"  batch {row['batch']:2d}: unbuffered {1e3 * unb['seconds']:8.2f} ms "
          f"({unb['decode_calls']:2d} decodes)  buffered {1e3 * buf['seconds']:7.2f} ms "
          f"({buf['decode_calls']} decode, {buf['hits']:2d} hits)  "
          f"speedup {row['speedup']:5.2f}x")
hw = FPGA_REFERENCE["rs" if args.code == "rs" else "bch"]
print(f"hardware reference for the 16-round batch: {hw['batch16_speedup']}x "
      f"({hw['batch16_us']['unbuffered']} us -> {hw['batch16_us']['buffered']} us)")
print()

thr = run_throughput_bench(args.code, samples=200, seed=0)
crps = thr["crps_per_ms"]
print(f"single-sample throughput: corrected {crps['corrected']:.2f} CRPs/ms, "
      f"hashed {crps['hashed']:.2f} CRPs/ms ({thr['hash_overhead_pct']:+.2f}%)")
print(f"hardware reference: {hw['crps_per_ms']['corrected']} vs "
      f"{hw['crps_per_ms']['hashed']} CRPs/ms ({hw['hash_overhead_pct']:+.2f}%)")
print()
print("distinct-keys workload for contrast (every sample misses):")
cold = run_batch_bench(args.code, batch_sizes=(16,), repeats=args.repeats,
                       seed=0, distinct_keys=True)
row = cold["rows"][0]
print(f"  batch 16: buffered {row['buffered']['decode_calls']} decodes, "
      f"{row['buffered']['hits']} hits, speedup {row['speedup']:.2f}x")
