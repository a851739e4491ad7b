"""Run the randomized identity batteries and print a summary table."""
import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from pachner33 import identities


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=identities.DEFAULT_TOL)
    args = ap.parse_args()

    print(f"{'battery':30s} {'worst residual':>14s} {'failures':>9s} {'time':>7s}")
    overall = True
    for battery in identities.ALL_BATTERIES:
        t0 = time.perf_counter()
        res = battery(trials=args.trials, seed=args.seed, tol=args.tol)
        dt = time.perf_counter() - t0
        overall &= res.passed
        extra = " ".join(f"{k}={v:.3e}" for k, v in res.extras.items())
        print(
            f"{res.name:30s} {res.max_residual:14.3e} {res.failures:9d} {dt:6.2f}s {extra}"
        )
    print("overall:", "PASS" if overall else "FAIL")
    return 0 if overall else 1


if __name__ == "__main__":
    sys.exit(main())
