"""Smoke test for the compiled extension.

Build and run from the repository root:

    cargo build --release -p mazer-py
    cp target/release/libmazer.so python/mazer.so
    python3 python/smoke_test.py
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import mazer  # noqa: E402


def main():
    solver = mazer.Solver("mesa", kappa_L=10.0)

    a = solver.scatter(0, "-", 0.1)
    assert a.unitarity_defect() < 1e-10, a
    empty = mazer.Solver("mesa", kappa_L=1e-300)
    assert abs(empty.scatter(0, "+", 0.5).r) < 1e-12

    opaque = solver.scatter(0, "+", 0.01)
    assert opaque.transmission() < 1e-8

    rep = mazer.report(mazer.State.excited(0), solver, k=0.1)
    assert abs(rep.R + rep.T - 1.0) < 1e-9
    assert abs(rep.delta_sigma_aa + rep.delta_p[1]) < 1e-12
    plus, minus = solver.scatter(0, "+", 0.1), solver.scatter(0, "-", 0.1)
    kernel = plus.r * minus.r.conjugate() + plus.t * minus.t.conjugate()
    assert abs(-rep.delta_sigma_aa - 0.5 * (1.0 - kernel.real)) < 1e-15

    trap = mazer.Trapping(0.5 * complex(math.cos(1.0), math.sin(1.0)), "+")
    rep = mazer.report(trap, solver, k=0.1)
    assert abs(rep.delta_sigma_aa) < 1e-12
    assert max(abs(x) for x in rep.delta_p) < 1e-12
    r, t = mazer.trapping_rt(trap, solver, 0.1)
    assert abs(r - mazer.ultracold_rt_plus(0.5)[0]) < 1e-2

    gauss = mazer.Solver("gaussian", kappa_L=10.0, width=1.0)
    rep = mazer.report(mazer.State.excited(1), gauss, k=0.5)
    assert abs(rep.R + rep.T - 1.0) < 1e-9
    assert json.loads(rep.to_json())["per_n"][0]["n"] == 0

    state = mazer.State.from_json(
        '{"form": "product", "atom": [1, 0, 0, 0], "field": [[1, 0]]}'
    )
    w_minus1, entries = state.dressed_coordinates()
    assert w_minus1 == 0.0 and entries[0][0] == 1.0

    try:
        mazer.Trapping(1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("|gamma| = 1 accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
