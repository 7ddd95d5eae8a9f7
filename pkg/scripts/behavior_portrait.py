#!/usr/bin/env python3
"""Sweep the (coupling, flux) plane for one curvature case and map behaviours.

Writes a CSV grid of behaviour tags and prints a compact ASCII portrait with
the critical-coupling curve marked, e.g.::

    python3 scripts/behavior_portrait.py --case positive --kappa-max 0.6 \
        --out portrait_positive.csv
"""

import argparse
import csv
import sys

import numpy as np

from hetflow import homothety as ht

GLYPHS = {
    ht.BehaviorTag.STATIC: "o",
    ht.BehaviorTag.ETERNAL_REGULAR: ".",
    ht.BehaviorTag.ETERNAL_PAST_FINITE_FUTURE_DIVERGENT: "/",
    ht.BehaviorTag.ETERNAL_PAST_DIVERGENT_FUTURE_FINITE: "\\",
    ht.BehaviorTag.FINITE_TIME_COLLAPSE: "x",
    ht.BehaviorTag.UNRESOLVED: "?",
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--case", default="positive",
                        choices=("positive", "flat", "negative", "su2"))
    parser.add_argument("--kappa-min", type=float, default=0.0)
    parser.add_argument("--kappa-max", type=float, default=1.0)
    parser.add_argument("--kappa-steps", type=int, default=41)
    parser.add_argument("--mu-min", type=float, default=0.0)
    parser.add_argument("--mu-max", type=float, default=2.0)
    parser.add_argument("--mu-steps", type=int, default=41)
    parser.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    args = parser.parse_args(argv)

    kappa_min = args.kappa_min
    if args.case == "su2" and kappa_min <= 0.0:
        kappa_min = max(1e-3, (args.kappa_max - args.kappa_min) / args.kappa_steps)
        print(f"note: the round case needs coupling > 0; starting at {kappa_min}",
              file=sys.stderr)
    kappas = np.linspace(kappa_min, args.kappa_max, args.kappa_steps)
    mus = np.linspace(args.mu_min, args.mu_max, args.mu_steps)
    tags = ht.sweep_grid(args.case, kappas, mus)

    rows = [["i", "j", "kappa", "mu", "tag"]]
    for i, kappa in enumerate(kappas):
        for j, mu in enumerate(mus):
            rows.append([i, j, f"{kappa:.6g}", f"{mu:.6g}", tags[i, j].value])
    handle = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        csv.writer(handle).writerows(rows)
    finally:
        if args.out:
            handle.close()
            print(f"wrote {len(rows) - 1} grid points to {args.out}", file=sys.stderr)

    # ASCII portrait: coupling increases downwards, flux to the right; a `*`
    # marks the column's critical coupling where it lies inside the window.
    crit = {"positive": ht.kappa_crit_p, "negative": ht.kappa_crit_n}.get(args.case)
    print(f"# {args.case}: rows kappa {kappas[0]:.3g}..{kappas[-1]:.3g}, "
          f"cols mu {mus[0]:.3g}..{mus[-1]:.3g}", file=sys.stderr)
    legend = ", ".join(f"{glyph}={tag.value}" for tag, glyph in GLYPHS.items())
    print(f"# {legend}, *=critical coupling", file=sys.stderr)
    half_cell = 0.5 * (kappas[1] - kappas[0]) if len(kappas) > 1 else 0.0
    for i, kappa in enumerate(kappas):
        line = []
        for j, mu in enumerate(mus):
            glyph = GLYPHS[tags[i, j]]
            if crit is not None:
                kc = crit(float(mu))
                if kc > 0.0 and abs(kappa - kc) <= half_cell:
                    glyph = "*"
            line.append(glyph)
        print("".join(line), file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
