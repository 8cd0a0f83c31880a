"""Mesh study: discrete energy of the Example initial state and the spectral abscissa vs N."""

import argparse

import numpy as np

from timocert import EXAMPLE_IC, StateFunction, build_system, energy, example_beam
from timocert.discretize import discrete_energy, spectral_abscissa
from timocert.simulate import sample_initial_condition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[25, 50, 100, 200])
    args = ap.parse_args()

    beam = example_beam()
    # smooth but not periodic, so the boundary cells show up in the error
    funcs = [lambda x: np.sin(1.3 * x) + 0.2, lambda x: x**2, np.exp, lambda x: np.cos(2 * x)]
    exact_smooth = float(energy(StateFunction.from_functions(funcs, 1.0, n=16385), beam))
    ic = [lambda x, p=p: p(x, 1.0) for p in EXAMPLE_IC.components()]
    exact_ic = float(energy(StateFunction.from_functions(ic, 1.0, n=16385), beam))

    print(f"{'N':>5} {'E_h(ic)':>14} {'rel err':>10} {'smooth err':>11} {'order':>6} {'abscissa':>10}")
    prev = None
    for N in args.sizes:
        sys = build_system(beam, N)
        e_ic = discrete_energy(sys, sample_initial_condition(EXAMPLE_IC, sys))
        locs = (sys.cell_centers, sys.cell_centers, sys.nodes, sys.nodes)
        z = np.concatenate([f(x) for f, x in zip(funcs, locs)])
        err = abs(discrete_energy(sys, z) - exact_smooth)
        order = "" if prev is None else f"{np.log(prev[1] / err) / np.log(N / prev[0]):.2f}"
        print(f"{N:5d} {e_ic:14.9f} {abs(e_ic - exact_ic) / exact_ic:10.2e} {err:11.3e} "
              f"{order:>6} {spectral_abscissa(sys):10.5f}")
        prev = (N, err)


if __name__ == "__main__":
    main()
