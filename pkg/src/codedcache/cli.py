"""Command-line harness: ``codedcache {verify,tradeoff,bounds,entropy,golden,share}``.

Exit codes: 0 all checks pass, 1 verification failure, 2 configuration error.
Test files come from Python's ``random.Random(seed)`` (MT19937), so equal
seeds and flags give byte-identical output.
"""

from __future__ import annotations

import argparse
import configparser
import difflib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction
from importlib import resources
from itertools import permutations
from math import comb
from pathlib import Path
from random import Random
from typing import Sequence

from codedcache import bounds, entropy, memshare, scheme_kk, scheme_mn
from codedcache.errors import ConfigError, IntegrityError
from codedcache.partition import PartitionSpec

PRNG = "python-random-MT19937"
COMMANDS = ("verify", "tradeoff", "bounds", "entropy", "golden", "share")


@dataclass
class RunConfig:
    command: str = "verify"
    K: int = 3
    N: int | None = None
    scheme: str = "kk"
    r: int | None = None
    alpha: Fraction = Fraction(1, 2)
    F_bits: int | str = "auto"
    seed: int = 0
    demand: str = "all"
    steps: int = 60
    jobs: int = 1
    lemma2_max: int | None = None
    out: str | None = None
    json: str | None = None
    golden: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.K < 2:
            raise ConfigError("K must be at least 2")
        if self.N is None:
            self.N = self.K
        if self.r is None:
            self.r = self.K - 1
        if not 0 <= self.r <= self.K:
            raise ConfigError(f"r={self.r} outside [0, {self.K}]")
        if self.scheme not in ("kk", "mn"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.F_bits != "auto" and (not isinstance(self.F_bits, int) or self.F_bits <= 0):
            raise ConfigError(f"F_bits must be 'auto' or a positive integer, got {self.F_bits!r}")
        if not 0 <= self.alpha <= 1:
            raise ConfigError(f"alpha={self.alpha} outside [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.steps < 1 or self.jobs < 1:
            raise ConfigError("steps and jobs must be positive")

    def demands(self) -> list[tuple[int, ...]]:
        if self.demand == "all":
            return list(permutations(range(1, self.K + 1)))
        try:
            d = tuple(int(x) for x in self.demand.replace(" ", "").split(","))
        except ValueError:
            raise ConfigError(f"bad demand {self.demand!r}") from None
        if len(d) != self.K or any(not 1 <= x <= self.N for x in d):
            raise ConfigError(f"demand {d} must name {self.K} files in [1, {self.N}]")
        return [d]


_CASTS = {"K": int, "N": int, "r": int, "seed": int, "steps": int, "jobs": int,
          "lemma2_max": int, "alpha": Fraction}


def _cast(key: str, value):
    if value is None:
        return None
    if key == "F_bits":
        return value if value == "auto" else int(value)
    return _CASTS.get(key, str)(value)


def read_config_file(path: str) -> dict:
    """``key = value`` lines (``#`` comments) into a dict of raw strings."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser.read_string("[run]\n" + Path(path).read_text())
    return dict(parser["run"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="codedcache", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="text file of key = value settings; flags win")
    p.add_argument("-K", "--K", dest="K")
    p.add_argument("-N", "--N", dest="N")
    p.add_argument("--scheme", choices=("kk", "mn"))
    p.add_argument("-r", "--r", dest="r", help="MN parameter (default K-1)")
    p.add_argument("--alpha", help="memory-sharing weight of the coded scheme, e.g. 1/2")
    p.add_argument("--F-bits", dest="F_bits", help="file size in bits or 'auto'")
    p.add_argument("--seed")
    p.add_argument("--demand", help="'all' or a comma-separated permutation")
    p.add_argument("--steps", help="grid intervals over [0, N] for tradeoff")
    p.add_argument("--jobs", help="worker processes for the demand sweep")
    p.add_argument("--lemma2-max", dest="lemma2_max", help="max |S| for lemma-2 checks")
    p.add_argument("--out", help="output path (CSV or text report)")
    p.add_argument("--json", help="JSON report path")
    p.add_argument("--golden", help="golden file to compare against")
    return p


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    raw = read_config_file(ns.config) if ns.config else {}
    known = {f.name for f in fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kw = {}
    for name in known - {"command"}:
        flag = getattr(ns, name, None)
        val = flag if flag is not None else raw.get(name)
        if val is not None:
            try:
                kw[name] = _cast(name, val)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"bad value for {name}: {val!r}") from None
    return RunConfig(command=ns.command, **kw)


def make_files(N: int, F_bits: int, seed: int) -> list[bytes]:
    rng = Random(seed)
    return [rng.randbytes(F_bits // 8) for _ in range(N)]


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _resolve_F(cfg: RunConfig, granularity: int) -> int:
    if cfg.F_bits == "auto":
        return granularity
    if cfg.F_bits % granularity:
        raise ConfigError(f"F_bits={cfg.F_bits} must be a multiple of {granularity}")
    return cfg.F_bits


def _verify_chunk(args) -> list[tuple[tuple, int, bool]]:
    scheme, files, demands = args
    out = []
    for d in demands:
        res = scheme.run(files, d)
        for k, got in enumerate(res.decoded, start=1):
            out.append((d, k, got == files[d[k - 1] - 1]))
    return out


def _sweep(scheme, files, demands, jobs) -> list[tuple[tuple, int, bool]]:
    if jobs == 1:
        return _verify_chunk((scheme, files, demands))
    chunks = [demands[j::jobs] for j in range(jobs)]
    with ProcessPoolExecutor(jobs) as ex:
        parts = list(ex.map(_verify_chunk, [(scheme, files, c) for c in chunks]))
    results = [row for part in parts for row in part]
    order = {d: n for n, d in enumerate(demands)}
    return sorted(results, key=lambda t: (order[t[0]], t[1]))


def cmd_verify(cfg: RunConfig) -> int:
    K, N = cfg.K, cfg.N
    if cfg.scheme == "kk":
        if N != K:
            raise ConfigError("scheme requires N=K")
        scheme = scheme_kk.CodedScheme(K)
        F = _resolve_F(cfg, scheme.granularity_bits)
        PartitionSpec(K, N, F)
    else:
        scheme = scheme_mn.MNScheme(N, K, cfg.r)
        F = _resolve_F(cfg, scheme.granularity_bits)
    demands = cfg.demands()
    if cfg.scheme == "kk":
        for d in demands:
            scheme_kk.check_permutation(d, K)
    files = make_files(N, F, cfg.seed)
    try:
        results = _sweep(scheme, files, demands, cfg.jobs)
    except IntegrityError as exc:
        print(f"FAIL integrity error: {exc}")
        return 1
    M, R = scheme.run(files, demands[0]).point
    bad = [(d, k) for d, k, ok in results if not ok]
    good_demands = len({d for d, _, _ in results} - {d for d, _ in bad})
    lines = [
        f"# codedcache verify scheme={scheme.label} K={K} N={N} F_bits={F} seed={cfg.seed} prng={PRNG}",
        f"demands: {good_demands}/{len(demands)} pass",
        f"decodes: {len(results) - len(bad)}/{len(results)} bit-exact",
        f"measured: M={M} R={R}",
    ]
    if N == K:
        lhs = K * M + K * (K - 1) * R
        lines.append(f"theorem2: K*M+K(K-1)*R = {lhs} vs K^2-1 = {K * K - 1}"
                     f" ({'tight' if lhs == K * K - 1 else 'slack' if lhs > K * K - 1 else 'VIOLATED'})")
    if bad:
        lines.append(f"FAIL first failing demand={bad[0][0]} user={bad[0][1]}")
    _emit("\n".join(lines) + "\n", cfg.out)
    if cfg.json:
        Path(cfg.json).write_text(json.dumps({
            "scheme": scheme.label, "K": K, "N": N, "F_bits": F, "seed": cfg.seed, "prng": PRNG,
            "demands": len(demands), "decodes": len(results), "failures": [list(b) for b in bad],
            "M": str(M), "R": str(R)}, indent=1))
    return 1 if bad else 0


def cmd_tradeoff(cfg: RunConfig) -> int:
    grid = bounds.tradeoff_grid(cfg.N, cfg.K, cfg.steps)
    _emit(bounds.gap_csv(bounds.gap_report(cfg.N, cfg.K, grid)), cfg.out)
    return 0


def cmd_bounds(cfg: RunConfig) -> int:
    N, K = cfg.N, cfg.K
    pts = bounds.atlas_points(N, K)
    env = bounds.lower_envelope(pts)
    lines = [f"# achievable points for (N,K)=({N},{K}); verified=scheme implemented bit-level",
             "M,R,source,verified,R_lower,below_bound"]
    status = 0
    for p in sorted(pts, key=lambda q: (q.M, q.R)):
        lb = bounds.max_lower_bound(N, K, p.M)
        if p.R < lb:
            status = 1
        lines.append(f"{p.M},{p.R},{p.source},{p.verified},{lb},{p.R < lb}")
    lines.append("# envelope breakpoints")
    lines += [f"{p.M},{p.R},{p.source}" for p in env]
    if N == K:
        lo, hi = Fraction(K * K - K - 1, K), Fraction(K - 1)
        worst = max(r.gap for r in bounds.gap_report(N, K, bounds.rational_grid(lo, hi, 20)))
        lines.append(f"# max gap on [{lo}, {hi}]: {worst}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return status


def cmd_entropy(cfg: RunConfig) -> int:
    max_size = cfg.lemma2_max
    if max_size is None and cfg.K >= 6:
        max_size = 3
    rep = entropy.run_suite(cfg.K, max_size)
    if cfg.K == 3:
        rep.extend(entropy.check_theorem2_chain(entropy.build_mn_variables(3, 2)).rows)
    text = rep.to_text()
    v = entropy.build_variables(cfg.K)
    M = Fraction(v.cache_units, v.file_units)
    R = Fraction(v.packet_units, v.file_units)
    text += f"# K*M+K(K-1)*R = {cfg.K * M + cfg.K * (cfg.K - 1) * R} with M={M} R={R}; K^2-1 = {cfg.K**2 - 1}\n"
    _emit(text, cfg.out)
    if cfg.json:
        Path(cfg.json).write_text(rep.to_json())
    return 0 if rep.all_passed else 1


def golden_text() -> str:
    return resources.files("codedcache").joinpath("data/placement_k3.jsonl").read_text()


def golden_diff(dump: str, golden: str) -> list[str]:
    return list(difflib.unified_diff(golden.splitlines(True), dump.splitlines(True),
                                     "golden", "placement"))


def cmd_golden(cfg: RunConfig) -> int:
    if cfg.K != 3:
        raise ConfigError("golden only defined for K=3")
    dump = scheme_kk.dump_caches(scheme_kk.placement_exprs(3))
    golden = Path(cfg.golden).read_text() if cfg.golden else golden_text()
    if cfg.out:
        Path(cfg.out).write_text(dump)
    diff = golden_diff(dump, golden)
    if diff:
        sys.stdout.write("".join(diff))
        return 1
    print("golden: no diff (30 entries, 10 per user)")
    return 0


def cmd_share(cfg: RunConfig) -> int:
    K = cfg.K
    if cfg.N != K:
        raise ConfigError("share requires N=K")
    a, b = scheme_kk.CodedScheme(K), scheme_mn.MNScheme(K, K, cfg.r)
    plan = memshare.plan_share(cfg.alpha, a, b, 1 if cfg.F_bits == "auto" else cfg.F_bits)
    files = make_files(K, plan.F_bits, cfg.seed)
    bad = []
    point = None
    for d in cfg.demands():
        scheme_kk.check_permutation(d, K)
        decoded, point = memshare.run_share(plan, files, d)
        bad += [(d, k) for k, got in enumerate(decoded, start=1) if got != files[d[k - 1] - 1]]
    lines = [f"# codedcache share K={K} alpha={plan.alpha} r={cfg.r} F_bits={plan.F_bits}"
             f" seed={cfg.seed} prng={PRNG}",
             f"measured: M={point.M} R={point.R}",
             f"decodes: {'all bit-exact' if not bad else f'{len(bad)} failures, first {bad[0]}'}"]
    if cfg.r == K - 1:
        line = Fraction(K + 1, K) - point.M / (K - 1)
        lines.append(f"on R=(K+1)/K-M/(K-1): {point.R == line}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return 1 if bad else 0


HANDLERS = {"verify": cmd_verify, "tradeoff": cmd_tradeoff, "bounds": cmd_bounds,
            "entropy": cmd_entropy, "golden": cmd_golden, "share": cmd_share}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        return HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
