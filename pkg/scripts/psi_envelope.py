"""Fitted envelope constant of psi across N and delta."""
import argparse

from riesz_lab.constructions import build_psi, envelope_constant


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, nargs="+", default=[8, 16, 32])
    ap.add_argument("--delta", type=float, nargs="+", default=[0.25, 0.125])
    ap.add_argument("--M", type=int, default=2)
    args = ap.parse_args()
    print("delta N C_hat")
    for d in args.delta:
        for N in args.N:
            p = build_psi(N, d, args.M)
            print(d, N, f"{envelope_constant(p.psi, N, args.M):.6g}")


if __name__ == "__main__":
    main()
