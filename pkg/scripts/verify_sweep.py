"""Exhaustive decode sweep over K with timings, for both schemes."""

import argparse
import time
from itertools import permutations
from math import comb

from codedcache.cli import make_files
from codedcache.scheme_kk import CodedScheme
from codedcache.scheme_mn import MNScheme

p = argparse.ArgumentParser()
p.add_argument("--kmax", type=int, default=6)
p.add_argument("--seed", type=int, default=0)
args = p.parse_args()

print("scheme,K,demands,decodes,M,R,seconds")
for K in range(2, args.kmax + 1):
    schemes = [CodedScheme(K)] + [MNScheme(K, K, r) for r in range(K + 1)]
    for s in schemes:
        t0 = time.perf_counter()
        files = make_files(K, s.granularity_bits, args.seed)
        ok = total = 0
        for d in permutations(range(1, K + 1)):
            res = s.run(files, d)
            ok += sum(got == files[x - 1] for got, x in zip(res.decoded, d))
            total += K
        M, R = res.point
        print(f"{s.label},{K},{total // K},{ok}/{total},{M},{R},{time.perf_counter() - t0:.3f}")
