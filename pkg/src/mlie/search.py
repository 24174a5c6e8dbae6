"""Enumeration of every star structure on a small group.

The backtracking search decides the values ``g_i * g_j`` on a generating
sequence and propagates them to whole subgroups with the two distributive
axioms. Every emitted table is certified by the full axiom checker, so
propagation only ever prunes.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import BudgetExceeded
from .groups import GroupTable, Subset, generating_sequence, subgroup_closure
from .mla import StarTable, _grid, check_mla_axioms

DEFAULT_BUDGET = 60.0


def default_budget() -> float:
    env = os.environ.get("MLA_BUDGET_SECONDS")
    return float(env) if env else DEFAULT_BUDGET


@dataclass
class SearchOptions:
    max_solutions: Optional[int] = None
    dedup_by_automorphism: bool = False
    time_budget: float = field(default_factory=default_budget)

    def __post_init__(self):
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")
        if self.max_solutions is not None and self.max_solutions <= 0:
            raise ValueError("max_solutions must be positive")


@dataclass
class SearchResult:
    group: GroupTable
    stars: list
    complete: bool = True
    orbits: Optional[list] = None   # (representative, orbit size) when deduplicated

    def __len__(self):
        return len(self.stars)

    def __iter__(self):
        return iter(self.stars)

    def __getitem__(self, i):
        return self.stars[i]


class _Clock:
    def __init__(self, budget: float):
        self.deadline = time.monotonic() + budget

    def check(self, partial=None):
        if time.monotonic() > self.deadline:
            raise BudgetExceeded(partial=partial)


# ---------------------------------------------------------------------------
# propagation


def _propagate(g: GroupTable, gens: list[int], pair: dict, idx: list[int]):
    """Star table on the subgroup generated by ``gens[i] for i in idx``.

    ``pair[(i, j)]`` holds ``g_i * g_j`` for every i, j in idx. Rows of the
    generators are filled by ``g * (y g_l) = (g * y) ^y(g * g_l)``; all other
    rows by ``(x g_i) * z = ^x(g_i * z)(x * z)``. Returns the subgroup members
    and an n x n table holding -1 outside the subgroup.
    """
    n, m, c, e = g.order, g.mul, g.conj_table, g.identity
    sub = [gens[i] for i in idx]
    members = subgroup_closure(g, sub).elements()
    gen_rows = {}
    for i in idx:
        row = np.full(n, -1, dtype=np.int64)
        row[e] = e
        work = [e]
        while work:
            y = work.pop()
            for l in idx:
                t = m[y, gens[l]]
                if row[t] < 0:
                    row[t] = m[row[y], c[y, pair[(i, l)]]]
                    work.append(t)
        gen_rows[i] = row
    table = np.full((n, n), -1, dtype=np.int64)
    table[e, members] = e
    done = {e}
    work = [e]
    while work:
        x = work.pop()
        for i in idx:
            t = int(m[x, gens[i]])
            if t not in done:
                r = gen_rows[i][members]
                table[t, members] = m[c[x, r], table[x, members]]
                done.add(t)
                work.append(t)
    return members, table


def _restricted_ok(g: GroupTable, table: np.ndarray, members: list[int]) -> bool:
    """Axioms 1-5 on all tuples whose star arguments lie inside ``members``."""
    m, c, e = g.mul, g.conj_table, g.identity
    el = np.array(members)
    k = len(el)
    inside = np.zeros(g.order, dtype=bool)
    inside[el] = True
    s = table
    if (s[el, el] != e).any():
        return False
    X, Y, Z = (el[i] for i in _grid(k, 3))
    if (s[X, m[Y, Z]] != m[s[X, Y], c[Y, s[X, Z]]]).any():
        return False
    if (s[m[X, Y], Z] != m[c[X, s[Y, Z]], s[X, Z]]).any():
        return False
    if (c[Z, s[X, Y]] != s[c[Z, X], c[Z, Y]]).any():
        return False
    # axiom 4 where every starred argument stays inside
    a1, a2 = s[X, Y], c[Y, Z]
    b1, b2 = s[Y, Z], c[Z, X]
    d1, d2 = s[Z, X], c[X, Y]
    ok = inside[a1] & inside[a2] & inside[b1] & inside[b2] & inside[d1] & inside[d2]
    if ok.any():
        a = np.where(ok, s[np.where(ok, a1, e), np.where(ok, a2, e)], e)
        b = np.where(ok, s[np.where(ok, b1, e), np.where(ok, b2, e)], e)
        d = np.where(ok, s[np.where(ok, d1, e), np.where(ok, d2, e)], e)
        if (m[m[a, b], d] != e).any():
            return False
    return True


def _pair_order(k: int) -> list[tuple[int, int]]:
    return [(i, j) for j in range(1, k) for i in range(j)]


def iter_stars(g: GroupTable, clock: _Clock | None = None) -> Iterator[np.ndarray]:
    """Yield every certified star table on ``g`` (unsorted)."""
    clock = clock or _Clock(float("inf"))
    e = g.identity
    gens = generating_sequence(g)
    k = len(gens)
    if k == 0:
        yield np.full((g.order, g.order), e, dtype=np.int64)
        return
    pairs = _pair_order(k)
    pair: dict = {(i, i): e for i in range(k)}
    # candidate values for g_i * g_j: x^m = 1 forces (x * y)^... constraints via
    # propagation; here only the trivial necessary condition is used.
    cands = list(range(g.order))

    def rec(pos: int):
        clock.check()
        if pos == len(pairs):
            members, table = _propagate(g, gens, pair, list(range(k)))
            if len(members) == g.order and not check_mla_axioms(g, table, stop_early=True):
                yield table
            return
        i, j = pairs[pos]
        for v in cands:
            pair[(i, j)] = v
            pair[(j, i)] = int(g.inv[v])
            idx = list(range(i + 1)) + [j]
            members, table = _propagate(g, gens, pair, idx)
            if _restricted_ok(g, table, members):
                yield from rec(pos + 1)
        del pair[(i, j)], pair[(j, i)]

    yield from rec(0)


def enumerate_stars(g: GroupTable, opts: SearchOptions | None = None) -> SearchResult:
    """All star structures on ``g``, sorted lexicographically by table.

    Raises BudgetExceeded carrying the partial SearchResult (marked
    incomplete) when the time budget runs out.
    """
    opts = opts or SearchOptions()
    clock = _Clock(opts.time_budget)
    found: list = []
    complete = True
    try:
        for table in iter_stars(g, clock):
            found.append(StarTable(table))
            if opts.max_solutions is not None and len(found) >= opts.max_solutions:
                complete = False
                break
    except BudgetExceeded:
        partial = SearchResult(g, sorted(found), complete=False)
        raise BudgetExceeded(f"search on {g.name or 'group'} ran out of time "
                             f"after {len(found)} structures", partial=partial) from None
    res = SearchResult(g, sorted(found), complete=complete)
    if opts.dedup_by_automorphism:
        auts = automorphism_group(g, budget=max(clock.deadline - time.monotonic(), 1e-3))
        res.orbits = dedup_stars(g, res.stars, auts)
    return res


# ---------------------------------------------------------------------------
# naive generate-and-test (cross-check for tiny groups)


def naive_stars(g: GroupTable) -> list[StarTable]:
    """Cell-by-cell backtracking with no propagation at all.

    Only ``x * x = 1`` and ``1 * x = x * 1 = 1`` are fixed up front; every
    other cell ranges over the whole group, and an assignment is dropped as
    soon as some fully assigned instance of an axiom fails. Meant for
    ``|G| <= 6``.
    """
    n, m, c, e = g.order, g.mul, g.conj_table, g.identity
    s = np.full((n, n), -1, dtype=np.int64)
    s[np.arange(n), np.arange(n)] = e
    s[e, :] = e
    s[:, e] = e
    cells = [(a, b) for a in range(n) for b in range(n) if s[a, b] < 0]
    X, Y, Z = _grid(n, 3)
    out = []

    def consistent() -> bool:
        known = s >= 0
        sv = np.where(known, s, e)
        # axiom 2
        ok = known[X, m[Y, Z]] & known[X, Y] & known[X, Z]
        if (ok & (sv[X, m[Y, Z]] != m[sv[X, Y], c[Y, sv[X, Z]]])).any():
            return False
        # axiom 3
        ok = known[m[X, Y], Z] & known[Y, Z] & known[X, Z]
        if (ok & (sv[m[X, Y], Z] != m[c[X, sv[Y, Z]], sv[X, Z]])).any():
            return False
        # axiom 5
        ok = known[X, Y] & known[c[Z, X], c[Z, Y]]
        if (ok & (c[Z, sv[X, Y]] != sv[c[Z, X], c[Z, Y]])).any():
            return False
        # axiom 4
        a1, a2, b1, b2, d1, d2 = sv[X, Y], c[Y, Z], sv[Y, Z], c[Z, X], sv[Z, X], c[X, Y]
        ok = (known[X, Y] & known[Y, Z] & known[Z, X]
              & known[a1, a2] & known[b1, b2] & known[d1, d2])
        lhs = m[m[sv[a1, a2], sv[b1, b2]], sv[d1, d2]]
        return not (ok & (lhs != e)).any()

    def rec(pos: int):
        if pos == len(cells):
            if not check_mla_axioms(g, s):
                out.append(StarTable(s.copy()))
            return
        a, b = cells[pos]
        for v in range(n):
            s[a, b] = v
            if consistent():
                rec(pos + 1)
        s[a, b] = -1

    rec(0)
    return sorted(out)


# ---------------------------------------------------------------------------
# abelian groups: brackets as alternating biadditive maps


def abelian_basis(a: GroupTable) -> list[int]:
    """Elements b_1..b_k with A the internal direct sum of the <b_i>.

    Brute force over tuples of non-identity elements, shortest first; fine
    for the orders used here.
    """
    if not a.is_abelian:
        raise ValueError("abelian_basis needs an abelian group")
    n = a.order
    if n == 1:
        return []
    orders = a.orders
    nonid = [x for x in range(n) if x != a.identity]
    for k in range(1, n.bit_length() + 1):
        for combo in itertools.combinations(nonid, k):
            if math.prod(int(orders[x]) for x in combo) != n:
                continue
            if len(_span_coords(a, combo)) == n:
                return list(combo)
    raise AssertionError("no basis found")  # unreachable for finite abelian groups


def _span_coords(a: GroupTable, basis) -> dict[int, tuple]:
    """Map element -> coordinate tuple, for every element reached."""
    out = {a.identity: tuple(0 for _ in basis)}
    ranges = [range(int(a.orders[b])) for b in basis]
    for coords in itertools.product(*ranges):
        x = a.identity
        for b, cnt in zip(basis, coords):
            x = a.mul[x, a.power(b, cnt)]
        out.setdefault(int(x), coords)
    return out


def coordinates(a: GroupTable, basis) -> tuple[dict, dict]:
    """(element -> coords, coords -> element) for an abelian basis."""
    to = _span_coords(a, basis)
    return to, {v: k for k, v in to.items()}


def _expand_brackets(a, C, ords, radix, elem, cands) -> list[StarTable]:
    """Full tables from basis-pair brackets, each checked exhaustively."""
    n = a.order
    batch = max(1, (1 << 21) // n ** 3)
    m, e = a.mul, a.identity
    x, y, z = _grid(n, 3)
    diag = np.arange(n)
    out = []
    for lo in range(0, len(cands), batch):
        tc = np.einsum("xi,yj,bijr->bxyr", C, C, cands[lo:lo + batch]) % ords
        tabs = elem[tc @ radix]                                  # B x n x n
        b = np.arange(len(tabs))[:, None, None, None]
        jac = m[m[tabs[b, tabs[b, x, y], z], tabs[b, tabs[b, y, z], x]],
                tabs[b, tabs[b, z, x], y]]
        good = (jac == e).all(axis=(1, 2, 3)) & (tabs[:, diag, diag] == e).all(axis=1)
        out += [StarTable(t) for t in tabs[good]]
    return out


def abelian_bracket_oracle(a: GroupTable, chunk: int = 1 << 18) -> list[StarTable]:
    """Every Lie ring structure on an abelian group, found independently.

    Bracket values on basis pairs b_i, b_j (i < j) range over elements
    whose order divides gcd(ord b_i, ord b_j). The Jacobi identity is
    additive in each argument, so candidates are first screened on basis
    triples, vectorised in coordinates. Survivors are expanded to full
    tables and kept iff they are alternating and satisfy
    ``[[x,y],z] + [[y,z],x] + [[z,x],y] = 0`` for every triple.
    """
    if not a.is_abelian:
        raise ValueError("abelian_bracket_oracle needs an abelian group")
    n = a.order
    basis = abelian_basis(a)
    k = len(basis)
    to, back = coordinates(a, basis)
    if k < 2:
        return [StarTable(np.full((n, n), a.identity, dtype=np.int64))]
    ords = np.array([int(a.orders[b]) for b in basis], dtype=np.int64)
    C = np.array([to[x] for x in range(n)], dtype=np.int64)          # n x k
    radix = np.concatenate([[1], np.cumprod(ords)[:-1]])
    elem = np.empty(n, dtype=np.int64)
    for c, x in back.items():
        elem[int(np.dot(c, radix))] = x
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    choices = []
    for i, j in pairs:
        d = math.gcd(int(ords[i]), int(ords[j]))
        choices.append(C[[v for v in range(n) if d % int(a.orders[v]) == 0]])
    sizes = [len(c) for c in choices]
    total = math.prod(sizes)
    triples = list(itertools.combinations(range(k), 3))
    dt = np.int16 if ords.max() <= 32 else np.int64   # sums stay below 2**15
    small = ords.astype(dt)[:, None]
    out = []
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        V = np.zeros((k, k, k, len(idx)), dtype=dt)     # candidates last, contiguous
        for p, (i, j) in enumerate(pairs):
            c = choices[p][idx % sizes[p]].T
            idx = idx // sizes[p]
            V[i, j] = c
            V[j, i] = (-c) % small

        def br(u, m):
            acc = u[0] * V[0, m]
            for q in range(1, k):
                acc += u[q] * V[q, m]
            return acc

        ok = np.ones(V.shape[-1], dtype=bool)
        for i, j, l in triples:
            u, v, w = V[i, j], V[j, l], V[l, i]
            jac = (br(u, l) + br(v, i) + br(w, j)) % small
            ok &= ~jac.any(axis=0)
        cands = np.moveaxis(V[..., ok], -1, 0).astype(np.int64)
        out += _expand_brackets(a, C, ords, radix, elem, cands)
    return sorted(set(out), key=StarTable.key)


# ---------------------------------------------------------------------------
# homomorphisms and automorphisms


def homomorphisms(src: GroupTable, tgt: GroupTable, *, bijective: bool = False,
                  budget: float | None = None) -> list[np.ndarray]:
    """All homomorphisms src -> tgt as index arrays, found from generator images."""
    clock = _Clock(budget if budget is not None else default_budget())
    gens = generating_sequence(src)
    n = src.order
    choices = []
    for gi in gens:
        o = int(src.orders[gi])
        if bijective:
            choices.append([y for y in range(tgt.order) if int(tgt.orders[y]) == o])
        else:
            choices.append([y for y in range(tgt.order) if o % int(tgt.orders[y]) == 0])
    out = []
    for imgs in itertools.product(*choices):
        clock.check()
        phi = np.full(n, -1, dtype=np.int64)
        phi[src.identity] = tgt.identity
        work = [src.identity]
        ok = True
        while work and ok:
            x = work.pop()
            for gi, yi in zip(gens, imgs):
                t = src.mul[x, gi]
                val = tgt.mul[phi[x], yi]
                if phi[t] < 0:
                    phi[t] = val
                    work.append(int(t))
                elif phi[t] != val:
                    ok = False
                    break
        if not ok:
            continue
        if not np.array_equal(phi[src.mul], tgt.mul[phi[:, None], phi[None, :]]):
            continue
        if bijective and len(set(phi.tolist())) != tgt.order:
            continue
        out.append(phi)
    out.sort(key=lambda p: p.tolist())
    return out


def automorphism_group(g: GroupTable, budget: float | None = None) -> list[np.ndarray]:
    """All automorphisms of ``g`` as permutations of element indices."""
    return homomorphisms(g, g, bijective=True, budget=budget)


def endomorphisms(g: GroupTable, budget: float | None = None) -> list[np.ndarray]:
    return homomorphisms(g, g, budget=budget)


def act_on_star(perm: np.ndarray, star: np.ndarray) -> np.ndarray:
    """The star *' with perm(a * b) = perm(a) *' perm(b)."""
    out = np.empty_like(star)
    out[np.ix_(perm, perm)] = perm[star]
    return out


def dedup_stars(g: GroupTable, stars, auts) -> list[tuple[StarTable, int]]:
    """Orbit representatives (lexicographically least table) with orbit sizes."""
    seen: dict = {}
    for st in stars:
        arr = st.star if isinstance(st, StarTable) else np.asarray(st)
        orbit = {tuple(act_on_star(p, arr).ravel().tolist()) for p in auts}
        rep = min(orbit)
        if rep not in seen:
            seen[rep] = len(orbit)
    n = g.order
    return [(StarTable(np.array(rep).reshape(n, n)), size)
            for rep, size in sorted(seen.items())]
