"""Weighted norm against its bound, depth by depth, for power weights."""
import argparse

from riesz_lab.constructions import build_bad_range
from riesz_lab.sequences import WeightSeq


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, nargs="+", default=[0.5, 1.0])
    ap.add_argument("--depth", type=int, default=6)
    args = ap.parse_args()
    print("s depth weighted bound ratio")
    for s in args.s:
        art = build_bad_range(WeightSeq.power(s), args.depth)
        for k, (m, b) in enumerate(zip(art.details["weighted"], art.details["weighted_bounds"]), start=1):
            print(s, k, f"{m:.6g}", f"{b:.6g}", f"{m / b:.4f}")
        print(s, "classical ratio", f"{art.details['classical_ratio']:.4g}")


if __name__ == "__main__":
    main()
