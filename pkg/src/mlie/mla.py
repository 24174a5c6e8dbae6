"""Star operations on finite groups: axioms, identities, series and centres.

Conventions: ``[x, y] = x y x^-1 y^-1`` and ``^z x = z x z^-1``. A star is
an ``n x n`` integer table over a :class:`~mlie.groups.GroupTable`; every
exhaustive check is vectorised over all quantified tuples and reports the
first failing tuple in row-major order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    NotAnIdeal,
    NotWellDefined,
    PreconditionFailed,
    TheoremViolated,
)
from .groups import (
    GroupHom,
    GroupTable,
    Subset,
    center,
    commutator_subgroup,
    derived_subgroup,
    is_abelian_subset,
    is_class2,
    normal_closure,
    normality_witness,
    quotient,
    coset_representatives,
    subgroup_closure,
)


@dataclass(frozen=True, eq=False)
class StarTable:
    star: np.ndarray

    def __post_init__(self):
        arr = np.array(self.star, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "star", arr)

    @property
    def order(self) -> int:
        return self.star.shape[0]

    def key(self) -> tuple:
        return tuple(self.star.ravel().tolist())

    def __eq__(self, other):
        if not isinstance(other, StarTable):
            return NotImplemented
        return np.array_equal(self.star, other.star)

    def __hash__(self):
        return hash(self.star.tobytes())

    def __lt__(self, other: "StarTable") -> bool:
        return self.key() < other.key()


@dataclass(frozen=True, eq=False)
class MLA:
    group: GroupTable
    table: StarTable
    certified: bool = False

    @property
    def star(self) -> np.ndarray:
        return self.table.star

    def __eq__(self, other):
        if not isinstance(other, MLA):
            return NotImplemented
        return self.group == other.group and self.table == other.table


@dataclass(frozen=True, eq=False)
class LieRing:
    """An MLA whose group is abelian."""

    mla: MLA

    def __post_init__(self):
        if not self.mla.group.is_abelian:
            raise ValueError("a Lie ring needs an abelian group")

    @property
    def group(self) -> GroupTable:
        return self.mla.group

    @property
    def bracket(self) -> np.ndarray:
        return self.mla.star


@dataclass(frozen=True)
class Violation:
    label: str
    witness: tuple
    left: int
    right: int

    def to_json(self) -> dict:
        return {"label": self.label, "witness": list(self.witness),
                "left": self.left, "right": self.right}


@dataclass
class SeriesReport:
    kind: str
    terms: list
    stabilized: bool
    class_or_length: Optional[int]
    start: int = 0

    def term(self, k: int) -> Subset:
        """Term with index ``k`` (first term at ``start``); past the computed range the series is constant."""
        i = k - self.start
        if i < 0:
            raise IndexError(k)
        return self.terms[min(i, len(self.terms) - 1)]

    @property
    def reaches_identity(self) -> bool:
        return self.class_or_length is not None

    def to_json(self) -> dict:
        return {"kind": self.kind, "start": self.start,
                "orders": [t.size for t in self.terms],
                "terms": [t.elements() for t in self.terms],
                "stabilized": self.stabilized,
                "class": self.class_or_length}


def _arr(star) -> np.ndarray:
    if isinstance(star, MLA):
        return star.star
    if isinstance(star, StarTable):
        return star.star
    return np.asarray(star, dtype=np.int64)


def _first(label: str, left, right, out: list) -> bool:
    """Append a Violation for the first index where ``left != right``."""
    left = np.asarray(left)
    right = np.broadcast_to(np.asarray(right), left.shape)
    bad = np.argwhere(left != right)
    if len(bad) == 0:
        return True
    w = tuple(int(i) for i in bad[0])
    out.append(Violation(label, w, int(left[w]), int(right[w])))
    return False


def _grid(n: int, k: int):
    """k index arrays broadcasting to an n^k grid (row-major)."""
    ar = np.arange(n)
    return [ar.reshape([n if i == j else 1 for j in range(k)]) for i in range(k)]


def star_trivial(g: GroupTable) -> MLA:
    s = np.full((g.order, g.order), g.identity, dtype=np.int64)
    return certify(g, s)


def star_improper(g: GroupTable) -> MLA:
    return certify(g, g.comm_table)


def certify(g: GroupTable, star) -> MLA:
    """Run the axiom checker; raise TheoremViolated if it fails."""
    viol = check_mla_axioms(g, star)
    if viol:
        raise TheoremViolated(viol, "while certifying")
    return MLA(g, StarTable(_arr(star)), True)


def as_mla(g: GroupTable, star) -> MLA:
    """Wrap a table, certifying it. Returns an uncertified MLA on failure."""
    s = _arr(star)
    ok = not check_mla_axioms(g, s)
    return MLA(g, StarTable(s), ok)


def check_mla_axioms(g: GroupTable, star, *, stop_early: bool = False) -> list[Violation]:
    """Exhaustively check the five axioms.

    Axiom 1 is checked over all x, axioms 2-5 over all triples (x, y, z).
    One report per failing axiom, carrying its first witness.
    """
    s = _arr(star)
    n = g.order
    if s.shape != (n, n) or (s < 0).any() or (s >= n).any():
        bad = np.argwhere((s < 0) | (s >= n))
        w = tuple(int(i) for i in bad[0]) if len(bad) else ()
        return [Violation("closure", w, -1, -1)]
    m, c, e = g.mul, g.conj_table, g.identity
    out: list[Violation] = []
    ar = np.arange(n)
    # 1. x * x = 1
    if not _first("axiom1", s[ar, ar], e, out) and stop_early:
        return out
    x, y, z = _grid(n, 3)
    # 2. x * (yz) = (x * y) ^y(x * z)
    if not _first("axiom2", s[x, m[y, z]], m[s[x, y], c[y, s[x, z]]], out) and stop_early:
        return out
    # 3. (xy) * z = ^x(y * z) (x * z)
    if not _first("axiom3", s[m[x, y], z], m[c[x, s[y, z]], s[x, z]], out) and stop_early:
        return out
    # 4. ((x*y) * ^y z)((y*z) * ^z x)((z*x) * ^x y) = 1
    a = s[s[x, y], c[y, z]]
    b = s[s[y, z], c[z, x]]
    d = s[s[z, x], c[x, y]]
    if not _first("axiom4", m[m[a, b], d], e, out) and stop_early:
        return out
    # 5. ^z(x * y) = ^z x * ^z y
    _first("axiom5", c[z, s[x, y]], s[c[z, x], c[z, y]], out)
    return out


def is_mla(g: GroupTable, star) -> bool:
    return not check_mla_axioms(g, star, stop_early=True)


def lie_commutator_table(g: GroupTable, star) -> np.ndarray:
    """``L[a, b] = (a * b)^-1 [a, b]`` for all pairs."""
    s = _arr(star)
    return g.mul[g.inv[s], g.comm_table]


def lie_commutator(g: GroupTable, star, a: int, b: int) -> int:
    s = _arr(star)
    return int(g.mul[g.inv[s[a, b]], g.comm_table[a, b]])


def check_derived_identities(g: GroupTable, star) -> list[Violation]:
    """The twelve identities that every multiplicative Lie algebra satisfies.

    Labels ``mla-1`` .. ``mla-5`` are consequences of the axioms for the star
    itself, ``lie-1`` .. ``lie-7`` are the identities of the Lie commutator.
    All quantifiers are exhausted.
    """
    s = _arr(star)
    n = g.order
    m, c, inv, cm, e = g.mul, g.conj_table, g.inv, g.comm_table, g.identity
    L = lie_commutator_table(g, s)
    out: list[Violation] = []
    ar = np.arange(n)

    # mla-1: 1 * x = x * 1 = 1
    _first("mla-1a", s[e, ar], e, out)
    _first("mla-1b", s[ar, e], e, out)
    x, y = _grid(n, 2)
    # mla-2: (x*y)(y*x) = 1
    _first("mla-2", m[s[x, y], s[y, x]], e, out)
    # mla-3: ^(x*y)(u*v) = ^[x,y](u*v)
    x4, y4, u4, v4 = _grid(n, 4)
    _first("mla-3", c[s[x4, y4], s[u4, v4]], c[cm[x4, y4], s[u4, v4]], out)
    # mla-4: [(x*y), z] = [x,y] * z
    x3, y3, z3 = _grid(n, 3)
    _first("mla-4", cm[s[x3, y3], z3], s[cm[x3, y3], z3], out)
    # mla-5: x^-1 * y = ^(x^-1)(x*y)^-1 ; x * y^-1 = ^(y^-1)(x*y)^-1
    _first("mla-5a", s[inv[x], y], c[inv[x], inv[s[x, y]]], out)
    _first("mla-5b", s[x, inv[y]], c[inv[y], inv[s[x, y]]], out)

    # lie-1: L[a,a] = 1
    _first("lie-1", L[ar, ar], e, out)
    # lie-2: L[a,b] L[b,a] = 1
    _first("lie-2", m[L[x, y], L[y, x]], e, out)
    a, b, cc = x3, y3, z3
    # lie-3: L[ab, c] = L[a,c] ^(^c a)(L[b,c])
    _first("lie-3", L[m[a, b], cc], m[L[a, cc], c[c[cc, a], L[b, cc]]], out)
    # lie-4: L[a, bc] = ^b(L[a,c]) ^[^b c, ^b a](L[a,b])
    _first("lie-4", L[a, m[b, cc]],
           m[c[b, L[a, cc]], c[cm[c[b, cc], c[b, a]], L[a, b]]], out)
    # lie-5: ^a(L[b,c]) = L[^a b, ^a c]
    _first("lie-5", c[a, L[b, cc]], L[c[a, b], c[a, cc]], out)
    # lie-6: L[a^-1, b] = ^(a^-1)(L[b,a]) ; L[a, b^-1] = ^(b^-1)(L[b,a])
    _first("lie-6a", L[inv[x], y], c[inv[x], L[y, x]], out)
    _first("lie-6b", L[x, inv[y]], c[inv[y], L[y, x]], out)
    # lie-7: ^(L[a,b])(x*y) = x*y
    _first("lie-7", c[L[x4, y4], s[u4, v4]], s[u4, v4], out)
    return out


def star_values(star, a: Subset | None = None, b: Subset | None = None) -> list[int]:
    s = _arr(star)
    ea = a.elements() if a is not None else range(s.shape[0])
    eb = b.elements() if b is not None else range(s.shape[0])
    return np.unique(s[np.ix_(list(ea), list(eb))]).tolist()


def star_span(g: GroupTable, star, a: Subset | None = None, b: Subset | None = None) -> Subset:
    """Subgroup generated by ``{x * y : x in A, y in B}`` (default A = B = G)."""
    return subgroup_closure(g, star_values(star, a, b))


def lie_span(g: GroupTable, star, a: Subset | None = None, b: Subset | None = None) -> Subset:
    """Subgroup generated by the Lie commutators ``L[x, y]``, x in A, y in B."""
    return subgroup_closure(g, star_values(lie_commutator_table(g, star), a, b))


def ideal_closure(g: GroupTable, star, gens) -> Subset:
    """Smallest normal subgroup containing ``gens`` that absorbs ``g * n`` and ``n * g``.

    Worklist saturation: conjugates, products, inverses and star products
    with arbitrary group elements are added until nothing new appears.
    """
    s = _arr(star)
    m, c, inv = g.mul, g.conj_table, g.inv
    seen = np.zeros(g.order, dtype=bool)
    init = gens.elements() if isinstance(gens, Subset) else [int(x) for x in gens]
    work = [g.identity] + init
    for x in work:
        seen[x] = True
    members = [x for x in range(g.order) if seen[x]]
    while work:
        x = work.pop()
        new = np.concatenate([c[:, x], s[:, x], s[x, :], [inv[x]],
                              m[x, members], m[members, x]])
        for y in np.unique(new).tolist():
            if not seen[y]:
                seen[y] = True
                members.append(y)
                work.append(y)
    return Subset(seen)


def ideal_witness(g: GroupTable, star, n: Subset):
    """First reason ``n`` fails to be an ideal, or None."""
    s = _arr(star)
    el = n.elements()
    if g.identity not in n:
        return ("identity", g.identity)
    bad = np.argwhere(~n.members[g.mul[np.ix_(el, el)]])
    if len(bad):
        return ("product", el[bad[0][0]], el[bad[0][1]])
    w = normality_witness(g, n)
    if w is not None:
        return ("conjugate",) + w
    left = np.argwhere(~n.members[s[:, el]])
    if len(left):
        return ("g*n", int(left[0][0]), el[left[0][1]])
    right = np.argwhere(~n.members[s[el, :]])
    if len(right):
        return ("n*g", el[right[0][0]], int(right[0][1]))
    return None


def is_ideal(g: GroupTable, star, n: Subset) -> bool:
    return ideal_witness(g, star, n) is None


def _series(kind: str, first: Subset, step, g: GroupTable, start: int) -> SeriesReport:
    terms = [first]
    seen = {first}
    while not terms[-1].is_trivial(g):
        nxt = step(terms[-1])
        if nxt in seen:
            return SeriesReport(kind, terms, True, None, start)
        seen.add(nxt)
        terms.append(nxt)
    # index of the first trivial term
    first_trivial = start + len(terms) - 1
    if kind.endswith("lower-central") and start == 1:
        cls = first_trivial - 1
    else:
        cls = first_trivial
    return SeriesReport(kind, terms, True, max(cls, 0), start)


def gamma_series(g: GroupTable, star, kind: str = "lower-central") -> SeriesReport:
    """Star-derived (``Gamma^(k)``, from k=0) or star-lower-central (``Gamma_(k)``, from k=1) series.

    The reported class is the solvability class, respectively the smallest n
    with ``Gamma_(n+1) = 1``. ``None`` means the chain stabilised above {e}.
    """
    full = Subset.full(g.order)
    if kind == "derived":
        return _series("gamma-derived", full, lambda t: star_span(g, star, t, t), g, 0)
    if kind == "lower-central":
        return _series("gamma-lower-central", full, lambda t: star_span(g, star, full, t), g, 1)
    raise ValueError(f"unknown series kind {kind!r}")


def lie_series(g: GroupTable, star, kind: str = "lower-central") -> SeriesReport:
    """Lie-derived (``G^(k)``) or Lie-lower-central (``L_k``) series, both from k=0.

    Each term is the ideal generated by the Lie commutators of the previous
    term with itself (derived) or with G (lower central).
    """
    L = lie_commutator_table(g, star)
    full = Subset.full(g.order)

    def gens(a, b):
        return np.unique(L[np.ix_(a.elements(), b.elements())]).tolist()

    if kind == "derived":
        return _series("lie-derived", full, lambda t: ideal_closure(g, star, gens(t, t)), g, 0)
    if kind == "lower-central":
        return _series("lie-lower-central", full,
                       lambda t: ideal_closure(g, star, gens(full, t)), g, 0)
    raise ValueError(f"unknown series kind {kind!r}")


def mz_center(g: GroupTable, star) -> Subset:
    """Elements whose Lie commutator with everything is trivial."""
    L = lie_commutator_table(g, star)
    return Subset((L == g.identity).all(axis=1))


def lz_center(g: GroupTable, star) -> Subset:
    """Elements whose star with everything is trivial."""
    return Subset((_arr(star) == g.identity).all(axis=1))


def induced_quotient_star(g: GroupTable, star, n: Subset) -> tuple[MLA, GroupHom]:
    """The star induced on G/N, together with the projection.

    ``n`` must be an ideal; the induced table is read off coset
    representatives and then compared against every pair of elements.
    """
    s = _arr(star)
    w = ideal_witness(g, s, n)
    if w is not None:
        raise NotAnIdeal(w)
    q, proj = quotient(g, n)
    reps = coset_representatives(proj)
    img = proj.image
    qs = img[s[np.ix_(reps, reps)]]
    bad = np.argwhere(img[s] != qs[img[:, None], img[None, :]])
    if len(bad):
        raise NotWellDefined(tuple(int(i) for i in bad[0]))
    return certify(q, qs), proj


def is_trivial_star(g: GroupTable, star) -> bool:
    return bool((_arr(star) == g.identity).all())


def is_improper_star(g: GroupTable, star) -> bool:
    return bool(np.array_equal(_arr(star), g.comm_table))


# ---------------------------------------------------------------------------
# combining two structures


def combination_preconditions(g: GroupTable, star1, star2) -> list[PreconditionFailed]:
    """Check the three hypotheses of the pointwise-product construction.

    (1) both star spans abelian, (2) values of the two stars commute for all
    quadruples (x, y, z, w), (3) the six-factor mixed Jacobi identity for all
    triples.
    """
    s1, s2 = _arr(star1), _arr(star2)
    m, c, e = g.mul, g.conj_table, g.identity
    n = g.order
    fails = []
    for lab, s in (("1a", s1), ("1b", s2)):
        span = star_span(g, s)
        el = span.elements()
        bad = np.argwhere(~g.commute[np.ix_(el, el)])
        if len(bad):
            fails.append(PreconditionFailed(lab, (el[bad[0][0]], el[bad[0][1]])))
    x, y, z, w = _grid(n, 4)
    bad = np.argwhere(~g.commute[s1[x, y], s2[z, w]])
    if len(bad):
        fails.append(PreconditionFailed("2", tuple(int(i) for i in bad[0])))
    x, y, z = _grid(n, 3)
    f1 = s2[s1[x, y], c[y, z]]
    f2 = s1[s2[x, y], c[y, z]]
    f3 = s2[s1[y, z], c[z, x]]
    f4 = s1[s2[y, z], c[z, x]]
    f5 = s2[s1[z, x], c[x, y]]
    f6 = s1[s2[z, x], c[x, y]]
    prod = m[m[m[m[m[f1, f2], f3], f4], f5], f6]
    bad = np.argwhere(prod != e)
    if len(bad):
        fails.append(PreconditionFailed("3", tuple(int(i) for i in bad[0])))
    return fails


def combine_structures(g: GroupTable, star1, star2) -> MLA:
    """``x * y = (x *1 y)(x *2 y)``, after checking the hypotheses.

    The product is re-certified from scratch by the axiom checker.
    """
    fails = combination_preconditions(g, star1, star2)
    if fails:
        raise fails[0]
    s1, s2 = _arr(star1), _arr(star2)
    prod = g.mul[s1, s2]
    viol = check_mla_axioms(g, prod)
    if viol:
        raise TheoremViolated(viol, "for the combined star")
    return MLA(g, StarTable(prod), True)


def commuting_values_witness(g: GroupTable, star1, star2):
    """First (x, y, z, w) with [x *1 y, z *2 w] != 1, or None."""
    s1, s2 = _arr(star1), _arr(star2)
    x, y, z, w = _grid(g.order, 4)
    bad = np.argwhere(~g.commute[s1[x, y], s2[z, w]])
    return tuple(int(i) for i in bad[0]) if len(bad) else None


# ---------------------------------------------------------------------------
# class-2 groups


@dataclass
class Class2Report:
    items: list = field(default_factory=list)  # (label, ok, witness)

    @property
    def all_true(self) -> bool:
        return all(ok for _, ok, _ in self.items)

    def to_json(self) -> dict:
        return {lab: {"ok": ok, "witness": None if w is None else list(w)}
                for lab, ok, w in self.items}


def _witness(mask) -> tuple | None:
    bad = np.argwhere(mask)
    return tuple(int(i) for i in bad[0]) if len(bad) else None


def class2_property_report(g: GroupTable, star) -> Class2Report:
    """The five properties every star on a class-2 group must have.

    1. the star vanishes on [G, G]; 2. G*G is abelian; 3. the subgroup
    generated by the Lie commutators is abelian; 4. [z, x*y] = 1 for
    x, y in MZ(G); 5. (x*y) * [u, v] = 1 for all x, y, u, v.
    """
    if not is_class2(g):
        raise PreconditionFailed("class2", None)
    s = _arr(star)
    e, cm = g.identity, g.comm_table
    rep = Class2Report()

    d = derived_subgroup(g).elements()
    w = _witness(s[np.ix_(d, d)] != e)
    rep.items.append(("1", w is None, None if w is None else (d[w[0]], d[w[1]])))

    for lab, span in (("2", star_span(g, s)), ("3", lie_span(g, s))):
        el = span.elements()
        w = _witness(~g.commute[np.ix_(el, el)])
        rep.items.append((lab, w is None, None if w is None else (el[w[0]], el[w[1]])))

    mz = mz_center(g, s).elements()
    z = np.arange(g.order)
    vals = s[np.ix_(mz, mz)]
    w = _witness(cm[z[:, None, None], vals[None, :, :]] != e)
    rep.items.append(("4", w is None, None if w is None else (w[0], mz[w[1]], mz[w[2]])))

    x, y, u, v = _grid(g.order, 4)
    w = _witness(s[s[x, y], cm[u, v]] != e)
    rep.items.append(("5", w is None, w))
    return rep


def containment_report(g: GroupTable, star) -> dict:
    """Compare the Lie lower central series with the star lower central series.

    Returns per-n booleans for ``[G, L_n] <= Gamma_(n+1)`` and
    ``L_n <= Gamma_(n)`` (n >= 1) over the range where either series
    still moves, plus the two nilpotency classes.
    """
    gam = gamma_series(g, star, "lower-central")
    lie = lie_series(g, star, "lower-central")
    full = Subset.full(g.order)
    top = max(gam.start + len(gam.terms), lie.start + len(lie.terms)) + 1
    bracket, pointwise = {}, {}
    for k in range(1, top + 1):
        bracket[k] = commutator_subgroup(g, full, lie.term(k)).issubset(gam.term(k + 1))
        pointwise[k] = lie.term(k).issubset(gam.term(k))
    return {"gamma": gam, "lie": lie, "bracket": bracket, "pointwise": pointwise}
