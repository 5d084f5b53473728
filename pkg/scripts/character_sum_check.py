#!/usr/bin/env python3
"""Check sum_{j=1}^{k-1} (1 - cos(2 pi m j/k)) / (1 - cos(2 pi j/k)) = (k - m) m.

Exact arithmetic in Q(zeta_k), with a floating-point cross-check.
"""

import argparse
import math
import time

from g2glue.ade import character_sum


def float_sum(k, m):
    return sum((1 - math.cos(2 * math.pi * m * j / k)) / (1 - math.cos(2 * math.pi * j / k)) for j in range(1, k))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=24)
    args = ap.parse_args()
    t0 = time.perf_counter()
    bad = 0
    for k in range(2, args.kmax + 1):
        for m in range(k):
            ok = character_sum(k, m) == (k - m) * m and abs(float_sum(k, m) - (k - m) * m) < 1e-9
            bad += not ok
    print(f"k <= {args.kmax}: {'all identities hold' if not bad else f'{bad} failures'} ({time.perf_counter() - t0:.2f}s)")


if __name__ == "__main__":
    main()
