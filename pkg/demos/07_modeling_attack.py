"""Logistic-regression modeling attack: raw arbiter vs hashed output.

Same PUF, same attacker, same budget. The raw arbiter is a linear threshold
function of parity features and collapses quickly; the hashed output stage
leaves the attacker at a coin flip.
"""

import argparse

from risecure.attack import run_attack

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--train", type=int, default=10000)
parser.add_argument("--test", type=int, default=2000)
parser.add_argument("--epochs", type=int, default=400)
parser.add_argument("--seed", type=int, default=0)
args = parser.parse_args()

report = run_attack(seed=args.seed, train_count=args.train,
                    test_count=args.test, epochs=args.epochs)

for mode in ("raw_arbiter", "hashed_bit"):
    row = report[mode]
    print(f"{mode:12s}  train {100 * row['train_accuracy']:5.1f}%   "
          f"test {100 * row['test_accuracy']:5.1f}%   "
          f"final loss {row['final_loss']:.4f}")
print(f"accuracy gap: {100 * report['accuracy_gap']:.1f} percentage points")
print()
print(f"with {args.train} training CRPs the raw 64-stage arbiter is an open")
print("book, while the hashed mode never moves off 50% no matter the budget;")
print("exposing only E=10 is what makes the extension safe to share a bus with.")
