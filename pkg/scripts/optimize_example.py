"""Multi-start decay-rate search on the Example beam, one line per seed."""

import argparse
from concurrent.futures import ProcessPoolExecutor

from timocert import EXAMPLE_WEIGHTS, SearchConfig, certify, example_beam, maximize_kappa2


def run(seed: int):
    res = maximize_kappa2(example_beam(), SearchConfig(seed=seed))
    return seed, res.weights, res.certificate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=8)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    base = certify(EXAMPLE_WEIGHTS, example_beam())
    print(f"reference weights: kappa2 = {base.kappa2:.6g}")
    with ProcessPoolExecutor(args.workers) as pool:
        results = list(pool.map(run, range(args.seeds)))
    for seed, w, cert in results:
        ws = ", ".join(f"{v:.4g}" for v in w.as_tuple())
        print(f"seed {seed}: kappa2 = {cert.kappa2:.6g}, kappa1 = {cert.kappa1:.3g}, weights ({ws})")
    best = max(results, key=lambda r: r[2].kappa2)
    print(f"best: seed {best[0]}, kappa2 = {best[2].kappa2:.6g}")


if __name__ == "__main__":
    main()
