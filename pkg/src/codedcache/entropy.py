"""Rank-based check of the converse argument on the concrete linear scheme.

Every cache entry and packet is a GF(2)-linear function of independent,
uniform subfiles, so the joint entropy of any collection of them is the GF(2)
rank of their coefficient rows times the subfile size. All quantities below
are in subfile units and every comparison is exact integer arithmetic.

A passing check is *instance-verified*: it confirms the inequality on this
scheme, it does not prove it for all schemes.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from codedcache import scheme_kk, scheme_mn
from codedcache.gf2 import rank, unit, vector
from codedcache.partition import enumerate_subfiles, subfile_columns

Rows = list[int]
OPS = {"=": lambda a, b: a == b, ">=": lambda a, b: a >= b, "<=": lambda a, b: a <= b,
       ">": lambda a, b: a > b}


def rotated_demand(i: int, K: int) -> tuple[int, ...]:
    """``(i, i+1, ..., K, 1, ..., i-1)``: user ``K+1-i`` asks for file ``K``."""
    return tuple((i - 1 + k) % K + 1 for k in range(K))


@dataclass
class SchemeVariables:
    K: int
    N: int
    file_units: int
    Z: list[Rows]
    X: list[Rows]
    W: list[Rows]
    cache_units: int
    packet_units: int
    label: str = "kk"

    def z(self, k: int) -> Rows:
        return self.Z[k - 1]

    def x(self, idx: Iterable[int]) -> Rows:
        return [r for i in sorted(set(idx)) for r in self.X[i - 1]]

    def w(self, files: Iterable[int]) -> Rows:
        return [r for n in sorted(set(files)) for r in self.W[n - 1]]

    def all_files(self) -> Rows:
        return self.w(range(1, self.N + 1))


def _assert_rotation(K: int):
    for i in range(1, K + 1):
        d = rotated_demand(i, K)
        assert d[K - i] == K, f"rotation {i}: user {K + 1 - i} asks for {d[K - i]}"


def build_variables(K: int) -> SchemeVariables:
    _assert_rotation(K)
    col = subfile_columns(K, K)

    def row(e) -> int:
        return vector(col[s] for s in e)

    Z = [[row(e) for e in rows] for rows in scheme_kk.placement_exprs(K)]
    X = [[row(e) for e in scheme_kk.delivery_exprs(rotated_demand(i, K))] for i in range(1, K + 1)]
    W = [[unit(col[s]) for s in enumerate_subfiles(K, n)] for n in range(1, K + 1)]
    return SchemeVariables(K, K, K * (K - 1), Z, X, W, len(Z[0]), len(X[0]), f"kk(K={K})")


def build_mn_variables(K: int, r: int) -> SchemeVariables:
    _assert_rotation(K)
    ids = [scheme_mn.MNSubfileId(n, T) for n in range(1, K + 1) for T in scheme_mn.subsets(K, r)]
    col = {s: c for c, s in enumerate(ids)}

    def row(e) -> int:
        return vector(col[s] for s in e)

    Z = [[row(e) for e in rows] for rows in scheme_mn.placement_exprs_mn(K, K, r)]
    X = [[row(e) for e in scheme_mn.delivery_exprs_mn(rotated_demand(i, K), r)]
         for i in range(1, K + 1)]
    W = [[unit(col[s]) for s in ids if s.file == n] for n in range(1, K + 1)]
    per_file = len(W[0])
    return SchemeVariables(K, K, per_file, Z, X, W, len(Z[0]), len(X[0]), f"mn(K={K},r={r})")


def entropy_of(*groups: Rows) -> int:
    """Joint entropy (subfile units) of the union of row groups."""
    return rank(r for g in groups for r in g)


@dataclass
class CheckRow:
    check: str
    K: int
    params: dict
    lhs: int
    rhs: int
    relation: str
    expect: bool = True
    note: str = "instance-verified"

    @property
    def holds(self) -> bool:
        return OPS[self.relation](self.lhs, self.rhs)

    @property
    def passed(self) -> bool:
        return self.holds == self.expect

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d

    def __str__(self):
        tag = "PASS" if self.passed else "FAIL"
        ctrl = "" if self.expect else " (control, expected not to hold)"
        return f"{tag} {self.check} K={self.K} {self.params}: {self.lhs} {self.relation} {self.rhs}{ctrl}"


@dataclass
class EntropyReport:
    rows: list[CheckRow] = field(default_factory=list)

    def extend(self, rows: Iterable[CheckRow]):
        self.rows.extend(rows)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if not r.passed]

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.rows], indent=1)

    def to_text(self) -> str:
        head = f"# {len(self.rows)} checks, {len(self.failures())} failed\n"
        return head + "\n".join(map(str, self.rows)) + "\n"


def check_decodability(v: SchemeVariables, k: int, i: int, file: int | None = None) -> CheckRow:
    """Adding the requested file to ``Z_k, X^i`` leaves the rank unchanged.

    With ``file`` set to a non-requested file the rank should grow; that row
    is an expected-fail control.
    """
    wanted = rotated_demand(i, v.K)[k - 1]
    n = wanted if file is None else file
    base = entropy_of(v.z(k), v.x([i]))
    with_file = entropy_of(v.w([n]), v.z(k), v.x([i]))
    return CheckRow("decodability", v.K, {"k": k, "i": i, "file": n}, base, with_file, "=",
                    expect=(n == wanted))


def check_rotation_identities(v: SchemeVariables, i: int) -> list[CheckRow]:
    K = v.K
    u = K + 1 - i
    rest = [j for j in range(1, K + 1) if j != i]
    a = CheckRow("rotation-all-but-last", K, {"i": i, "user": u},
                 entropy_of(v.z(u), v.x(rest)),
                 entropy_of(v.w(range(1, K)), v.z(u), v.x(rest)), "=")
    b = CheckRow("rotation-last", K, {"i": i, "user": u},
                 entropy_of(v.z(u), v.x([i])),
                 entropy_of(v.w([K]), v.z(u), v.x([i])), "=")
    return [a, b]


def _without(K: int, S: Iterable[int]) -> list[int]:
    S = set(S)
    return [j for j in range(1, K + 1) if j not in S]


def check_lemma2(v: SchemeVariables, S: Sequence[int], i: int) -> CheckRow:
    K = v.K
    S = sorted(set(S))
    if i in S or not 1 <= i <= K or any(not 1 <= s <= K for s in S):
        raise ValueError(f"invalid (S={S}, i={i}) for K={K}")
    w = v.w(range(1, K))
    lhs = entropy_of(w, v.x(_without(K, S))) + entropy_of(w, v.z(K + 1 - i), v.x(_without(K, [i])))
    rhs = entropy_of(w, v.x(_without(K, S + [i]))) + entropy_of(v.all_files())
    return CheckRow("lemma2", K, {"S": S, "i": i}, lhs, rhs, ">=")


def lemma2_cases(K: int, max_size: int | None = None) -> list[tuple[list[int], int]]:
    cases = []
    top = K - 1 if max_size is None else min(max_size, K - 1)
    for size in range(0, top + 1):
        for S in combinations(range(1, K + 1), size):
            cases += [(list(S), i) for i in range(1, K + 1) if i not in S]
    return cases


def theorem2_chain(v: SchemeVariables) -> list[tuple[str, int]]:
    """Every displayed line of the converse chain, evaluated as ranks.

    Returns ``(label, value)`` pairs in order; consecutive lines are related
    by the relations in :data:`CHAIN_RELATIONS`.
    """
    K = v.K
    T = v.file_units
    w = v.w(range(1, K))
    full = entropy_of(v.all_files())

    def term(i: int) -> int:
        return entropy_of(w, v.z(K + 1 - i), v.x(_without(K, [i])))

    lines = [("KM+K(K-1)R", K * v.cache_units + K * (K - 1) * v.packet_units)]
    lines.append(("sum H(Z)+sum H(X)",
                  sum(entropy_of(v.z(K + 1 - i)) for i in range(1, K + 1))
                  + sum(entropy_of(v.x(_without(K, [i]))) for i in range(1, K + 1))))
    lines.append(("sum H(Z,X)", sum(entropy_of(v.z(K + 1 - i), v.x(_without(K, [i])))
                                    for i in range(1, K + 1))))
    lines.append(("sum H(W',Z,X)", sum(term(i) for i in range(1, K + 1))))
    tail = sum(term(i) for i in range(3, K + 1))
    lines.append(("merge users K, K-1",
                  entropy_of(w, v.z(K), v.z(K - 1), v.x(_without(K, [1])), v.x(_without(K, [2])))
                  + entropy_of(w, v.x(_without(K, [1, 2]))) + tail))
    lines.append(("all packets",
                  entropy_of(v.all_files(), v.z(K), v.z(K - 1), v.x(range(1, K + 1)))
                  + entropy_of(w, v.x(_without(K, [1, 2]))) + tail))
    for j in range(2, K + 1):
        lines.append((f"after {j - 1} reductions",
                      (j - 1) * full + entropy_of(w, v.x(_without(K, range(1, j + 1))))
                      + sum(term(i) for i in range(j + 1, K + 1))))
    lines.append(("(K^2-1)F", (K * K - 1) * T))
    return lines


def chain_relations(K: int) -> list[str]:
    # L0>=L1>=L2=L3>=merge=allpackets=G2>=G3...>=GK=(K^2-1)F
    return [">=", ">=", "=", ">=", "=", "="] + [">="] * (K - 2) + ["="]


def check_theorem2_chain(v: SchemeVariables) -> EntropyReport:
    lines = theorem2_chain(v)
    rels = chain_relations(v.K)
    assert len(rels) == len(lines) - 1
    rep = EntropyReport()
    for (la, a), (lb, b), rel in zip(lines, lines[1:], rels):
        rep.rows.append(CheckRow("theorem2-step", v.K, {"from": la, "to": lb, "scheme": v.label},
                                 a, b, rel))
    rep.rows.append(CheckRow("theorem2-tight", v.K, {"scheme": v.label},
                             lines[0][1], lines[-1][1], "="))
    return rep


def run_suite(K: int, lemma2_max_size: int | None = None, controls: bool = True) -> EntropyReport:
    """Every check for the coded scheme at ``K``.

    ``lemma2_max_size`` limits ``|S|`` (use it at K = 6); ``None`` is
    exhaustive.
    """
    v = build_variables(K)
    rep = EntropyReport()
    full = entropy_of(v.all_files())
    rep.rows.append(CheckRow("files-independent", K, {}, full, K * v.file_units, "="))
    for k in range(1, K + 1):
        rep.rows.append(CheckRow("functions-of-files", K, {"k": k},
                                 entropy_of(v.all_files(), v.z(k)), full, "="))
        rep.rows.append(CheckRow("cache-rank", K, {"k": k}, entropy_of(v.z(k)), v.cache_units, "="))
    for k in range(1, K + 1):
        for i in range(1, K + 1):
            rep.rows.append(check_decodability(v, k, i))
            if controls:
                wanted = rotated_demand(i, K)[k - 1]
                other = wanted % K + 1
                rep.rows.append(check_decodability(v, k, i, file=other))
    for i in range(1, K + 1):
        rep.extend(check_rotation_identities(v, i))
    for S, i in lemma2_cases(K, lemma2_max_size):
        rep.rows.append(check_lemma2(v, S, i))
    rep.extend(check_theorem2_chain(v).rows)
    return rep
