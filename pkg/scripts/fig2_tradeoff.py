"""Write the (K, K) tradeoff table (envelope, bounds, gap) as CSV.

    python scripts/fig2_tradeoff.py --K 3 --steps 120 > fig2.csv
"""

import argparse
import sys
from fractions import Fraction

from codedcache import bounds

p = argparse.ArgumentParser()
p.add_argument("--K", type=int, default=3)
p.add_argument("--steps", type=int, default=120)
args = p.parse_args()

K = args.K
rows = bounds.gap_report(K, K, bounds.tradeoff_grid(K, K, args.steps))
sys.stdout.write(bounds.gap_csv(rows))

lo, hi = Fraction(K * K - K - 1, K), Fraction(K - 1)
seg = [r for r in rows if lo <= r.M <= hi]
print(f"# {len(seg)} grid points in [{lo}, {hi}], max gap {max(r.gap for r in seg)}", file=sys.stderr)
