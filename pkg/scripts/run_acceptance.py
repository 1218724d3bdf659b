"""Run the twelve acceptance criteria and print one line each."""
import argparse
import sys

from artifact.acceptance import run_all

ap = argparse.ArgumentParser()
ap.add_argument("--tol-scale", type=float, default=1.0)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

res = run_all(args.tol_scale, args.seed)
for c in res:
    print(c.line(), flush=True)
sys.exit(0 if all(c.passed for c in res) else 1)
