#!/usr/bin/env python3
"""Writes a small synthetic bid log in the ingest format.

Nine advertisers bid on 24 ad slots of decreasing activity. Within a slot each
advertiser wins at one fixed price, except for occasional off-price wins that
exercise the lenient (modal price) path.
"""
import argparse
import random


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/sample_bidlog.csv")
    ap.add_argument("--seed", type=int, default=2017)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    advertisers = [f"adv{i}" for i in range(1, 10)]
    rows = []
    for s in range(24):
        slot = f"slot{s:02d}"
        volume = int(1200 / (1 + 0.35 * s))
        present = sorted(rng.sample(advertisers, rng.randint(4, 9)))
        weights = [rng.paretovariate(1.5) for _ in present]
        prices = {a: rng.randint(20, 320) for a in present}
        for _ in range(volume):
            a = rng.choices(present, weights)[0]
            price = prices[a]
            if rng.random() < 0.01:
                price = rng.randint(20, 320)
            rows.append((slot, a, price))
    rng.shuffle(rows)
    with open(args.out, "w", newline="\n") as f:
        f.write("slot_id,advertiser_id,winning_price\n")
        for r in rows:
            f.write(f"{r[0]},{r[1]},{r[2]}\n")


if __name__ == "__main__":
    main()
