"""Run the rank-based converse checks for a range of K and summarise."""

import argparse

from codedcache import entropy

p = argparse.ArgumentParser()
p.add_argument("--kmax", type=int, default=6)
p.add_argument("--lemma2-max", type=int, default=None,
               help="cap |S| for K >= 6 (default 3)")
args = p.parse_args()

for K in range(2, args.kmax + 1):
    cap = args.lemma2_max if args.lemma2_max is not None else (3 if K >= 6 else None)
    rep = entropy.run_suite(K, cap)
    counts = {}
    for r in rep.rows:
        counts[r.check] = counts.get(r.check, 0) + 1
    chain = entropy.theorem2_chain(entropy.build_variables(K))
    print(f"K={K} checks={len(rep.rows)} failed={len(rep.failures())} "
          f"chain={chain[0][1]}..{chain[-1][1]} {counts}")
