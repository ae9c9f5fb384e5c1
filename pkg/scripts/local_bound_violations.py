"""Scan adapted specs and list blocks whose energy exceeds the local l2 bound."""
import argparse

import numpy as np

from riesz_lab.riesz import RieszSpec, adapted_partial, block_energies, block_spectrum, local_l2_bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--specs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print("N a block measured bound excess")
    for _ in range(args.specs):
        depth = int(rng.integers(2, 5))
        N = [int(rng.integers(1, 9))]
        for _ in range(depth - 1):
            N.append(N[-1] * int(rng.integers(4, 9)))
        a = rng.uniform(0.05, 0.5, size=depth)
        s = RieszSpec("adapted", a, N)
        per, _ = block_energies(adapted_partial(s), block_spectrum(s, strict=False))
        for j, (m, b) in enumerate(zip(per, local_l2_bounds(s)), start=1):
            if m > b + 1e-12:
                print(N, np.round(a, 3).tolist(), j, f"{m:.6g}", f"{b:.6g}", f"{m - b:.3g}")


if __name__ == "__main__":
    main()
