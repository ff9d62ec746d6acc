#!/usr/bin/env python3
"""Walk through one full counting run, printing the per-level diagnostics.

The system is a binary quartic with four zero ray pairs on the circle:

    f(X0, X1) = (X1^2 - 0.25 X0^2)(X1^2 - 2.25 X0^2)

Each refinement level halves the cube mesh, rebuilds the vertex/exclusion
partition of the projected grid, and re-checks the two halting conditions:
(i) distinct proximity-graph components are farther apart than the grid can
confuse, and (ii) every excluded point is far enough from a zero.  On halt,
one Newton-refined zero per component pair is reported.
"""

import numpy as np

from spherecount import count_roots, parse_system

SYSTEM = {
    "n": 1,
    "degrees": [4],
    "polys": [
        [
            {"J": [0, 4], "c": 1.0},
            {"J": [2, 2], "c": -2.5},
            {"J": [4, 0], "c": 0.5625},
        ]
    ],
}


def main():
    f = parse_system(SYSTEM)
    print(__doc__)
    result = count_roots(f)

    header = (
        f"{'k':>3} {'eta':>10} {'grid':>8} {'vertices':>9} "
        f"{'components':>11} {'halt(i)':>8} {'halt(ii)':>9}"
    )
    print(header)
    print("-" * len(header))
    for it in result.iterations:
        print(
            f"{it.k:>3} {it.eta:>10.6f} {it.grid_size:>8} {it.vertex_count:>9} "
            f"{it.component_count:>11} {str(it.condition_i_pass):>8} "
            f"{str(it.condition_ii_pass):>9}"
        )

    print(f"\nstatus: {result.status}")
    print(f"count (antipodal ray pairs): {result.count}")
    print(f"condition lower bound kappa_hat: {result.kappa_lower_bound:.4f}")
    print("\nrefined zeros (one per component; antipodal mates included):")
    for comp in result.components:
        z = np.array(comp["zero"])
        angle = np.degrees(np.arctan2(z[1], z[0]))
        print(
            f"  ({z[0]:+.12f}, {z[1]:+.12f})  angle {angle:+8.3f} deg  "
            f"final beta {comp['beta']:.2e}"
        )
    print("\nexpected ray directions: slopes +-0.5 and +-1.5 against X0.")


if __name__ == "__main__":
    main()
