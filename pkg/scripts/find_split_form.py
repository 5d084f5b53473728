#!/usr/bin/env python3
"""Seeded search for a split-signature 3-form among sign flips of phi0.

Prints the first sign vector (one sign per phi0 monomial) whose 3-form lies
in the split orbit, with its metric signature and volume.
"""

import argparse
import random

from g2glue.forms import PHI0, AlternatingForm, nondegeneracy_and_metric


def with_signs(signs):
    terms = dict(sorted(PHI0.terms.items()))
    return AlternatingForm(3, {k: c * s for (k, c), s in zip(terms.items(), signs)})


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--tries", type=int, default=200)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    for n in range(args.tries):
        signs = [rng.choice((1, -1)) for _ in range(7)]
        res = nondegeneracy_and_metric(with_signs(signs))
        if res.orbit == "Split":
            print(f"try {n}: signs {signs} signature {res.metric.signature} volume {res.metric.volume}")
            return
    print("no split form found")


if __name__ == "__main__":
    main()
