#!/usr/bin/env python3
"""Decision table over the bundled example measures.

Prints one line per spec: verdict, route, and the attached certificate or
witness, plus the wall time of the decision call.
"""

import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from liouville.decider import decide
from liouville.exactreal import format_coordinate
from liouville.measures import parse_measure

SPECS = [
    "discrete_laplacian.yaml",
    "nonstandard_laplacian.yaml",
    "reciprocal_sequence.yaml",
    "growing_sequence.yaml",
    "fractional.yaml",
    "relativistic.yaml",
    "convolution.yaml",
    "sqrt2_pair.yaml",
    "kronecker_sqrt2_sqrt3.yaml",
    "kronecker_sqrt2_sqrt2.yaml",
    "kronecker_rational.yaml",
    "mean_value.yaml",
    "nonuniform_grid_2d.yaml",
    "planar_fractional.yaml",
]


def describe(verdict):
    if verdict.holds:
        extra = ""
        if verdict.route == "irrational_pair" and verdict.witness:
            a, b = verdict.witness["pair"]
            extra = f" pair=({format_coordinate(a)}, {format_coordinate(b)})"
        if verdict.route == "unbounded_q_sequence" and verdict.witness:
            extra = f" q-samples={verdict.witness['samples'][:4]}"
        return f"holds   route={verdict.route}{extra}"
    if verdict.holds is False:
        lam = ", ".join(
            "(" + ", ".join(format_coordinate(c) for c in v) + ")"
            for v in verdict.closure.lambda_basis
        )
        return (
            f"fails   route={verdict.route} lattice=[{lam}] "
            f"counterexample={verdict.counterexample.closed_form}"
        )
    return "uncertified (probe only)"


def main():
    spec_dir = pathlib.Path(__file__).resolve().parents[1] / "specs"
    width = max(len(s) for s in SPECS)
    for name in SPECS:
        mu = parse_measure((spec_dir / name).read_text())
        t0 = time.perf_counter()
        verdict = decide(mu)
        dt = (time.perf_counter() - t0) * 1e3
        print(f"{name:<{width}}  d={mu.dimension}  [{dt:6.1f} ms]  {describe(verdict)}")


if __name__ == "__main__":
    main()
