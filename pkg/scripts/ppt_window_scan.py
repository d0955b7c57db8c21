"""Scan the bound-entanglement window under general dephasing.

The ground/excited channel leaves a window where the evolved family is
PPT yet realignment-witnessed. Whether that window survives when every
local coherence decays (general dephasing) is open; this script maps it
numerically. For each alpha it brackets the PPT onset and the
realignment zero under general dephasing and prints the resulting
window, if any. Exploration only: nothing here is asserted elsewhere.
"""

import argparse

import numpy as np

from dephaselab.channels import NoiseParams, general_dephase
from dephaselab.criteria import (
    NoBracketError,
    find_sign_change,
    min_pt_eigenvalue,
    realignment_excess,
)
from dephaselab.family import initial_state

T_HI = 12.0


def onset(f, t_lo=1e-6, t_hi=T_HI):
    try:
        return find_sign_change(f, t_lo, t_hi, tol=1e-9)
    except NoBracketError:
        return None


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gamma", type=float, default=1.0)
    parser.add_argument("--alphas", type=float, nargs="+", default=list(np.arange(4.05, 5.001, 0.05)))
    args = parser.parse_args()

    def evolved(alpha, t):
        return general_dephase(initial_state(alpha), NoiseParams(args.gamma, args.gamma, t))

    print(f"gamma = {args.gamma}")
    print(f"{'alpha':>6} {'t_ppt':>10} {'realign_zero':>13} {'window':>10}")
    for alpha in args.alphas:
        t_ppt = onset(lambda t: min_pt_eigenvalue(evolved(alpha, t)))
        t_real = onset(lambda t: realignment_excess(evolved(alpha, t)))
        if t_ppt is None:
            window = "no PPT onset"
        elif t_real is None or t_real <= t_ppt:
            window = "empty"
        else:
            window = f"{t_real - t_ppt:.4f}"
        show = lambda v: f"{v:.6f}" if v is not None else "-"
        print(f"{alpha:>6.2f} {show(t_ppt):>10} {show(t_real):>13} {window:>10}")


if __name__ == "__main__":
    main()
