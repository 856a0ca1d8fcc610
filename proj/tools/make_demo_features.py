#!/usr/bin/env python3
"""Writes a synthetic feature stream: steady scene with a few sharp cuts."""
import argparse
import random


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--frames", type=int, default=1200)
    ap.add_argument("--fps", type=float, default=30.0)
    ap.add_argument("--cuts", type=int, nargs="*", default=[300, 600, 900])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    cuts = set(args.cuts)
    with open(args.out, "w") as f:
        f.write("#ses-features version=1 flow_normalization=max-over-stream\n")
        f.write("frame_id,timestamp,vit_similarity,flow_magnitude\n")
        for i in range(args.frames):
            if i in cuts:
                vit, flow = 0.15 + rng.uniform(0, 0.05), 0.02 + rng.uniform(0, 0.01)
            else:
                vit, flow = 0.95 + rng.uniform(-0.01, 0.01), 0.30 + rng.uniform(-0.02, 0.02)
            f.write(f"{i},{i / args.fps:.6f},{vit:.6f},{flow:.6f}\n")


if __name__ == "__main__":
    main()
