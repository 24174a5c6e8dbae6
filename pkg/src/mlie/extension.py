"""Star structures on extensions of one Lie ring by another.

An extension of H by K is stored through the canonical section
``t(x) = (1, x)``: the group is H x K as a set, with element ``(a, x)`` at
index ``a + |H| * x`` (H fastest) and product
``(a, x)(b, y) = (a sigma_x(b) f(x, y), xy)``.

The compatibility equations are evaluated exactly as displayed, factor by
factor, on numpy index grids. Nothing is simplified by hand; the built
structure is always re-certified by the axiom checker afterwards.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ConditionFailed,
    ConstructionInvalid,
    NotAnIdeal,
    NotCentralType,
    NotWellDefined,
    PreconditionFailed,
    QuotientMismatch,
    TheoremViolated,
    ValidationError,
)
from .groups import (
    GroupTable,
    Subset,
    coset_representatives,
    cyclic,
    derived_subgroup,
    is_class2,
    is_normal,
    quotient,
    subgroup_table,
    validate_group,
)
from .mla import (
    MLA,
    LieRing,
    StarTable,
    Violation,
    _first,
    check_mla_axioms,
    induced_quotient_star,
    is_trivial_star,
    lz_center,
    star_trivial,
)
from .search import abelian_basis, coordinates


@dataclass(frozen=True, eq=False)
class ExtensionData:
    H: LieRing
    K: LieRing
    sigma: np.ndarray   # |K| x |H|: sigma[x] is an automorphism of H
    gamma: np.ndarray   # |K| x |H|: gamma[x] is an endomorphism of H
    f: np.ndarray       # |K| x |K| -> H
    h: np.ndarray       # |K| x |K| -> H

    def __post_init__(self):
        nh, nk = self.H.group.order, self.K.group.order
        for name, shape in (("sigma", (nk, nh)), ("gamma", (nk, nh)),
                            ("f", (nk, nk)), ("h", (nk, nk))):
            arr = np.array(getattr(self, name), dtype=np.int64)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            if (arr < 0).any() or (arr >= nh).any():
                raise ValueError(f"{name} has entries outside H")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def pair_index(self, a, x):
        return a + self.H.group.order * x

    def split(self, g):
        nh = self.H.group.order
        return g % nh, g // nh


class _Ops:
    """Elementwise H and K arithmetic for transcribing long displays."""

    def __init__(self, e: ExtensionData):
        self.Hm = e.H.group.mul
        self.Hi = e.H.group.inv
        self.Km = e.K.group.mul
        self.Ki = e.K.group.inv
        self.b1 = e.H.bracket
        self.b2 = e.K.bracket
        self.S = e.sigma
        self.G = e.gamma
        self.F = e.f
        self.Hh = e.h
        self.one = e.H.group.identity
        self.kone = e.K.group.identity

    def m(self, *args):
        out = args[0]
        for a in args[1:]:
            out = self.Hm[out, a]
        return out

    def i(self, a):
        return self.Hi[a]

    def sq(self, a):
        return self.Hm[a, a]

    def km(self, *args):
        out = args[0]
        for a in args[1:]:
            out = self.Km[out, a]
        return out

    def st(self, a, b):           # bracket on H
        return self.b1[a, b]

    def ks(self, x, y):           # bracket on K
        return self.b2[x, y]

    def sig(self, x, a):
        return self.S[x, a]

    def gam(self, x, a):
        return self.G[x, a]

    def f(self, x, y):
        return self.F[x, y]

    def hh(self, x, y):
        return self.Hh[x, y]


def _grids(e: ExtensionData, names: Sequence[str]) -> dict:
    nh, nk = e.H.group.order, e.K.group.order
    sizes = [nh if v in "hkl" else nk for v in names]
    out = {}
    for pos, v in enumerate(names):
        shape = [1] * len(names)
        shape[pos] = sizes[pos]
        out[v] = np.arange(sizes[pos]).reshape(shape)
    return out


def _check(label, names, lhs, rhs, out):
    lhs = np.asarray(lhs)
    shape = np.broadcast_shapes(lhs.shape, np.shape(rhs))
    if not _first(label, np.broadcast_to(lhs, shape), np.broadcast_to(rhs, shape), out):
        v = out[-1]
        out[-1] = Violation(label, tuple(zip(names, v.witness)), v.left, v.right)


def verify_cocycle(e: ExtensionData) -> list[Violation]:
    """Check sigma, gamma and the factor set f.

    Labels: ``sigma-aut``, ``sigma-action`` (sigma_x sigma_y = sigma_xy, the
    condition that makes the product associative), ``gamma-end``,
    ``cocycle-normal`` (f(1, x) = f(x, 1) = 1), ``cocycle`` (the cocycle law
    over all triples) and ``cocycle-inverse-1`` .. ``-3`` (its consequences for
    f(x^-1, x) and f(x, x^-1) over pairs).
    """
    o = _Ops(e)
    Hg = e.H.group
    out: list[Violation] = []
    nh, nk = Hg.order, e.K.group.order
    a = np.arange(nh)
    # sigma_x and gamma_x are homomorphisms; sigma_x is bijective
    for lab, tab in (("sigma-aut", e.sigma), ("gamma-end", e.gamma)):
        lhs = tab[:, Hg.mul]                      # (x, a, b)
        rhs = Hg.mul[tab[:, :, None], tab[:, None, :]]
        _check(lab, ("x", "h", "k"), lhs, rhs, out)
    for x in range(nk):
        if len(set(e.sigma[x].tolist())) != nh:
            out.append(Violation("sigma-aut", (("x", x),), -1, -1))
            break
    g = _grids(e, ("x", "y", "h"))
    _check("sigma-action", ("x", "y", "h"),
           o.sig(o.km(g["x"], g["y"]), g["h"]), o.sig(g["x"], o.sig(g["y"], g["h"])), out)

    kk = np.arange(nk)
    one = o.kone
    _check("cocycle-normal", ("x",), o.f(one, kk), o.one, out)
    _check("cocycle-normal", ("x",), o.f(kk, one), o.one, out)

    g = _grids(e, ("x", "y", "z"))
    x, y, z = g["x"], g["y"], g["z"]
    _check("cocycle", ("x", "y", "z"),
           o.m(o.f(x, y), o.f(o.km(x, y), z)),
           o.m(o.sig(x, o.f(y, z)), o.f(x, o.km(y, z))), out)

    g = _grids(e, ("x", "y"))
    x, y = g["x"], g["y"]
    xi = o.Ki[x]
    xy = o.km(x, y)
    rhs = o.m(o.f(y, x), o.f(xy, xi))
    _check("cocycle-inverse-1", ("x", "y"), o.sig(xy, o.f(xi, x)), rhs, out)
    _check("cocycle-inverse-2", ("x", "y"), o.sig(y, o.f(x, xi)), rhs, out)
    _check("cocycle-inverse-3", ("x", "y"), o.sig(xy, o.f(xi, x)), o.sig(y, o.f(x, xi)), out)
    return out


def verify_star_compatibility(e: ExtensionData) -> list[Violation]:
    """Evaluate the compatibility equations between the data and the star formula.

    Labels: ``h-normal`` (h(x, 1) = h(1, x) = h(x, x) = 1),
    ``sigma-fixes-bracket``, then one equation per remaining axiom:
    ``left-distributive``, ``right-distributive``, ``conjugation`` and
    ``jacobi``. Each is quantified over exactly its free variables, taken in
    the order h, k, l (in H) then x, y, z (in K).
    Inside H, ``a * b`` is the bracket of H; between elements of K it is the
    bracket of K.
    """
    o = _Ops(e)
    m, i, sq, st, ks = o.m, o.i, o.sq, o.st, o.ks
    km, sig, gam, f, hh = o.km, o.sig, o.gam, o.f, o.hh
    one, kone = o.one, o.kone
    out: list[Violation] = []

    # h(x,1) = h(1,x) = h(x,x) = 1
    kk = np.arange(e.K.group.order)
    _check("h-normal", ("x",), hh(kk, kone), one, out)
    _check("h-normal", ("x",), hh(kone, kk), one, out)
    _check("h-normal", ("x",), hh(kk, kk), one, out)

    # sigma_(x*y)(h*k) = h*k
    g = _grids(e, ("h", "k", "x", "y"))
    h, k, x, y = g["h"], g["k"], g["x"], g["y"]
    _check("sigma-fixes-bracket", ("h", "k", "x", "y"), sig(ks(x, y), st(h, k)), st(h, k), out)

    # left distributive law, on H-parts
    names = ("k", "l", "x", "y", "z")
    g = _grids(e, names)
    k, l, x, y, z = (g[v] for v in names)
    xy = km(x, y)
    fxy = f(x, y)
    sk_inv = sig(x, i(k))                       # sigma_x(k^-1)
    lhs = m(l, gam(xy, l), fxy,
            st(m(sig(x, k), fxy), l),
            sig(ks(xy, z), m(sk_inv, i(fxy), gam(z, m(sk_inv, i(fxy))))),
            hh(xy, z))
    yz = ks(y, z)
    rhs = m(sig(x, m(l, gam(y, l), st(k, l),
                     sig(yz, m(i(k), i(l), gam(z, i(k)))),
                     hh(y, z))),
            f(x, yz), i(f(yz, x)),
            sig(yz, m(l, gam(x, l), hh(x, z))),
            f(yz, ks(x, z)))
    _check("left-distributive", names, lhs, rhs, out)

    # right distributive law
    names = ("h", "l", "x", "y", "z")
    g = _grids(e, names)
    h, l, x, y, z = (g[v] for v in names)
    yz = km(y, z)
    syl_f = m(sig(y, l), f(y, z))               # sigma_y(l) f(y,z)
    lhs = m(syl_f, gam(x, syl_f), st(h, syl_f),
            sig(ks(x, yz), m(i(h), sig(y, i(l)), i(f(y, z)), gam(yz, i(h)))),
            hh(x, yz))
    xsz = ks(x, z)
    inner = m(h, l, gam(x, l), st(h, l),
              sig(xsz, m(i(h), i(l), gam(z, i(h)))),
              hh(x, z))
    rhs = m(sig(ks(x, y), m(i(h), gam(y, i(h)), sig(y, inner),
                            f(y, xsz), i(f(xsz, y)))),
            f(ks(x, y), xsz), hh(x, y))
    _check("right-distributive", names, lhs, rhs, out)

    # conjugation equivariance
    names = ("h", "k", "l", "x", "y", "z")
    g = _grids(e, names)
    h, k, l, x, y, z = (g[v] for v in names)
    xsy = ks(x, y)
    lhs = m(sig(z, m(gam(x, k), st(h, k),
                     sig(xsy, m(i(h), i(k), gam(y, i(h)))),
                     hh(x, y))),
            f(z, xsy), i(f(xsy, z)))
    fzx = m(f(z, x), i(f(x, z)))               # f(z,x) f(x,z)^-1
    fzy = m(f(z, y), i(f(y, z)))               # f(z,y) f(y,z)^-1
    left_arg = m(l, sig(z, h), fzx, sig(x, i(l)))
    right_arg = m(l, sig(z, k), fzy, sig(y, i(l)))
    rhs = m(l, fzx, fzy, sig(x, i(l)), sig(y, i(l)),
            gam(x, right_arg),
            st(left_arg, right_arg),
            sig(xsy, m(i(l), sig(z, i(m(h, k))), i(f(z, x)), f(x, z), i(f(z, y)), f(y, z),
                       sig(x, l), sig(y, l),
                       gam(y, m(i(l), sig(z, i(h)), sig(x, l), i(f(z, x)), f(x, z))))),
            hh(x, y))
    _check("conjugation", names, lhs, rhs, out)

    # Jacobi: the product of the three cyclic terms is trivial
    _check("jacobi", names, _jacobi(o, h, k, l, x, y, z), one, out)
    return out


def _jacobi_block(o: _Ops, h, k, l, x, y, z):
    """One cyclic block of the Jacobi check: the H-part of ((h,x)*(k,y)) * ^(k,y)(l,z).

    Called with (h,k,l,x,y,z), then (k,l,h,y,z,x), then (l,h,k,z,x,y).
    """
    m, i, sq, st, ks = o.m, o.i, o.sq, o.st, o.ks
    sig, gam, f, hh = o.sig, o.gam, o.f, o.hh
    xsy = ks(x, y)
    fyz = m(f(y, z), i(f(z, y)))                # f(y,z) f(z,y)^-1
    arg = m(k, sig(y, l), sig(z, i(k)), fyz)    # k sigma_y(l) sigma_z(k^-1) f(y,z) f(z,y)^-1
    s_hk = sig(xsy, m(i(h), i(k), gam(y, i(h))))
    s_hk_pos = sig(xsy, m(h, k, gam(y, h)))     # sigma_(x*y)(h k Gamma_y(h))
    xsy_z = ks(xsy, z)
    part = m(h, sq(k), gam(x, k), sig(y, l), sig(z, i(k)), s_hk, fyz, hh(x, y),
             st(m(h, k, st(h, k), s_hk, hh(x, y)), arg),
             gam(xsy, arg),
             sig(xsy_z, m(i(h), i(sq(k)), gam(x, i(k)), sig(y, i(l)), sig(z, k),
                          s_hk_pos, i(f(y, z)), f(z, y), i(hh(x, y)),
                          gam(z, m(i(h), i(k), gam(x, i(k)), st(k, h),
                                   s_hk_pos, i(hh(x, y)))))),
             hh(xsy, z))
    return part, xsy_z


def _jacobi(o: _Ops, h, k, l, x, y, z):
    m, km, sig, f = o.m, o.km, o.sig, o.f
    p1, a = _jacobi_block(o, h, k, l, x, y, z)     # a = (x*y)*z
    p2, b = _jacobi_block(o, k, l, h, y, z, x)     # b = (y*z)*x
    p3, c = _jacobi_block(o, l, h, k, z, x, y)     # c = (z*x)*y
    ab = km(a, b)
    return m(p1, sig(a, p2), f(a, b), sig(ab, p3), f(ab, c))


# ---------------------------------------------------------------------------
# construction


def build_group_from_extension(e: ExtensionData, name: str = "") -> GroupTable:
    """H x K with ``(a, x)(b, y) = (a sigma_x(b) f(x, y), xy)``."""
    Hg, Kg = e.H.group, e.K.group
    nh, nk = Hg.order, Kg.order
    idx = np.arange(nh * nk)
    a, x = idx % nh, idx // nh
    A, X = a[:, None], x[:, None]
    B, Y = a[None, :], x[None, :]
    first = Hg.mul[Hg.mul[A, e.sigma[X, B]], e.f[X, Y]]
    mul = first + nh * Kg.mul[X, Y]
    try:
        return validate_group(mul, name=name or f"ext({Hg.name},{Kg.name})")
    except ValidationError as exc:
        raise ConstructionInvalid(f"extension data does not define a group: {exc}") from exc


def extension_star_table(e: ExtensionData) -> np.ndarray:
    """``(a,x) * (b,y) = (a b G_x(b) (a *1 b) s_(x*2y)(a^-1 b^-1 G_y(a^-1)) h(x,y), x *2 y)``."""
    o = _Ops(e)
    nh, nk = e.H.group.order, e.K.group.order
    idx = np.arange(nh * nk)
    a, x = idx % nh, idx // nh
    A, X = a[:, None], x[:, None]
    B, Y = a[None, :], x[None, :]
    xsy = o.ks(X, Y)
    first = o.m(A, B, o.gam(X, B), o.st(A, B),
                o.sig(xsy, o.m(o.i(A), o.i(B), o.gam(Y, o.i(A)))),
                o.hh(X, Y))
    return first + nh * xsy


def build_star_from_extension(e: ExtensionData, *, check: bool = True) -> MLA:
    """Group and star of the extension, certified by the axiom checker.

    With ``check`` the two verifiers must come back clean first
    (PreconditionFailed otherwise). A certification failure after clean
    verification raises TheoremViolated with the checker's witnesses.
    """
    if check:
        for v in verify_cocycle(e) + verify_star_compatibility(e):
            raise PreconditionFailed(v.label, v.witness)
    g = build_group_from_extension(e)
    star = extension_star_table(e)
    viol = check_mla_axioms(g, star)
    if viol:
        raise TheoremViolated(viol, "for the extension star")
    return MLA(g, StarTable(star), True)


# ---------------------------------------------------------------------------
# biadditive alternating pairings


@dataclass(frozen=True, eq=False)
class CentralPairing:
    Q: GroupTable
    A: GroupTable
    pairing: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pairing, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "pairing", arr)

    def __eq__(self, other):
        if not isinstance(other, CentralPairing):
            return NotImplemented
        return (self.Q == other.Q and self.A == other.A
                and np.array_equal(self.pairing, other.pairing))

    def __hash__(self):
        return hash(self.pairing.tobytes())

    def violations(self) -> list[Violation]:
        """h(x,x) = 1, h(xy,z) = h(x,z)h(y,z), h(x,yz) = h(x,y)h(x,z)."""
        q, a, p = self.Q, self.A, self.pairing
        out: list[Violation] = []
        ar = np.arange(q.order)
        _first("alternating", p[ar, ar], a.identity, out)
        x, y, z = ar[:, None, None], ar[None, :, None], ar[None, None, :]
        _first("left-additive", p[q.mul[x, y], z], a.mul[p[x, z], p[y, z]], out)
        _first("right-additive", p[x, q.mul[y, z]], a.mul[p[x, y], p[x, z]], out)
        return out


def enumerate_central_pairings(Q: GroupTable, A: GroupTable) -> list[CentralPairing]:
    """All alternating biadditive maps Q x Q -> A.

    Values on basis pairs b_i, b_j (i < j) range over elements of A whose
    order divides gcd(ord b_i, ord b_j); everything else follows by
    biadditivity. Each map is verified exhaustively before it is returned.
    """
    if not (Q.is_abelian and A.is_abelian):
        raise ValueError("pairings need abelian groups")
    basis = abelian_basis(Q)
    kq = len(basis)
    to, _ = coordinates(Q, basis)
    coords = [to[x] for x in range(Q.order)]
    ords = [int(Q.orders[b]) for b in basis]
    pairs = [(i, j) for i in range(kq) for j in range(i + 1, kq)]
    choices = [[v for v in range(A.order) if math.gcd(ords[i], ords[j]) % int(A.orders[v]) == 0]
               for i, j in pairs]
    out = []
    for vals in itertools.product(*choices):
        val = {}
        for (i, j), v in zip(pairs, vals):
            val[(i, j)] = v
            val[(j, i)] = int(A.inv[v])
        table = np.empty((Q.order, Q.order), dtype=np.int64)
        for x in range(Q.order):
            for y in range(Q.order):
                acc = A.identity
                for (i, j), v in val.items():
                    c = coords[x][i] * coords[y][j]
                    if c:
                        acc = A.mul[acc, A.power(v, c)]
                table[x, y] = acc
        cp = CentralPairing(Q, A, table)
        if not cp.violations():
            out.append(cp)
    out.sort(key=lambda c: c.pairing.ravel().tolist())
    return out


def central_spaces(g: GroupTable):
    """(Q, projection, A, embedding) for Q = G/[G,G] and A = [G,G].

    A is indexed by the sorted members of [G,G]; the embedding maps A
    indices back to G.
    """
    d = derived_subgroup(g)
    q, proj = quotient(g, d, name=f"{g.name}/[G,G]")
    a, embed = subgroup_table(g, d, name=f"[{g.name},{g.name}]")
    return q, proj, a, embed


def central_pairing_to_star(g: GroupTable, p: CentralPairing) -> MLA:
    """``a * b = pairing(aN, bN)`` read inside [G, G]; certified."""
    if not is_class2(g):
        raise PreconditionFailed("class2", None)
    q, proj, a, embed = central_spaces(g)
    if p.Q != q:
        raise QuotientMismatch("pairing domain is not G/[G,G] in canonical indexing")
    if p.A != a:
        raise QuotientMismatch("pairing codomain is not [G,G] in canonical indexing")
    viol = p.violations()
    if viol:
        raise PreconditionFailed(viol[0].label, viol[0].witness)
    img = proj.image
    star = embed[p.pairing[img[:, None], img[None, :]]]
    viol = check_mla_axioms(g, star)
    if viol:
        raise TheoremViolated(viol, "for a central pairing star")
    return MLA(g, StarTable(star), True)


def star_to_central_pairing(g: GroupTable, star, transversal: Optional[Sequence[int]] = None
                            ) -> CentralPairing:
    """Recover the pairing of a star whose induced structure on G/[G,G] is trivial.

    ``transversal[x]`` picks the representative of coset x (default: least
    element). The pairing is read off the representatives and then checked
    against every pair of elements.
    """
    s = star.star if isinstance(star, (MLA, StarTable)) else np.asarray(star, dtype=np.int64)
    if check_mla_axioms(g, s, stop_early=True):
        raise NotCentralType("star is not a multiplicative Lie algebra")
    if not is_class2(g):
        raise NotCentralType("group is not nilpotent of class 2")
    q, proj, a, embed = central_spaces(g)
    d = derived_subgroup(g)
    try:
        qm, _ = induced_quotient_star(g, s, d)
    except (NotAnIdeal, NotWellDefined) as exc:
        raise NotCentralType("[G,G] does not induce a quotient structure", exc.witness) from None
    if not is_trivial_star(q, qm.star):
        bad = np.argwhere(qm.star != q.identity)[0]
        raise NotCentralType("quotient structure nontrivial", tuple(int(i) for i in bad))
    lz = lz_center(g, s)
    if not d.issubset(lz):
        w = [x for x in d if x not in lz][0]
        raise NotCentralType("[G,G] not inside the Lie centre", (w,))
    reps = coset_representatives(proj) if transversal is None else np.asarray(transversal)
    if len(reps) != q.order or (proj.image[reps] != np.arange(q.order)).any():
        raise ValueError("transversal does not pick one element per coset")
    pos = np.full(g.order, -1, dtype=np.int64)
    pos[embed] = np.arange(len(embed))
    pairing = pos[s[np.ix_(reps, reps)]]
    if (pairing < 0).any():
        bad = np.argwhere(pairing < 0)[0]
        raise NotCentralType("star value outside [G,G]", (int(reps[bad[0]]), int(reps[bad[1]])))
    img = proj.image
    again = embed[pairing[img[:, None], img[None, :]]]
    bad = np.argwhere(again != s)
    if len(bad):
        raise NotCentralType("star depends on the section", tuple(int(i) for i in bad[0]))
    return CentralPairing(q, a, pairing)


def central_extension_data(p: CentralPairing, f: np.ndarray) -> ExtensionData:
    """Extension data for the central case: sigma = id, Gamma = 0, trivial brackets."""
    H = LieRing(star_trivial(p.A))
    K = LieRing(star_trivial(p.Q))
    nk, nh = p.Q.order, p.A.order
    sigma = np.tile(np.arange(nh), (nk, 1))
    gamma = np.full((nk, nh), p.A.identity)
    return ExtensionData(H, K, sigma, gamma, f, p.pairing)


def heisenberg_cocycle(p: int) -> np.ndarray:
    """f((a,b),(c,d)) = u^(b c) on K = C_p x C_p with values in H = C_p.

    K uses the mixed-radix layout (a, b) -> a + p*b; u is 1 in C_p.
    """
    idx = np.arange(p * p)
    a, b = idx % p, idx // p
    return (b[:, None] * a[None, :]) % p


# ---------------------------------------------------------------------------
# metacyclic groups


@dataclass
class MetacyclicFrame:
    """A group split as H t(x) over a normal subgroup H with cyclic quotient."""

    group: GroupTable
    H: GroupTable
    embed: np.ndarray      # H index -> G element
    Q: GroupTable
    proj: np.ndarray       # G element -> Q index
    section: np.ndarray    # Q index -> G element
    sigma: np.ndarray      # Q x H
    f: np.ndarray          # Q x Q -> H

    def local(self, gel):
        pos = np.full(self.group.order, -1, dtype=np.int64)
        pos[self.embed] = np.arange(len(self.embed))
        return pos[gel]


def metacyclic_frame(g: GroupTable, h: Subset) -> MetacyclicFrame:
    if not is_normal(g, h):
        raise PreconditionFailed("normal", None)
    hg, embed = subgroup_table(g, h, name="H")
    q, proj = quotient(g, h)
    reps = coset_representatives(proj)
    pos = np.full(g.order, -1, dtype=np.int64)
    pos[embed] = np.arange(len(embed))
    m, inv = g.mul, g.inv
    sigma = pos[g.conj_table[reps][:, embed]]
    f = pos[m[m[reps[:, None], reps[None, :]], inv[reps[q.mul]]]]
    return MetacyclicFrame(g, hg, embed, q, proj.image, reps, sigma, f)


def metacyclic_conditions(fr: MetacyclicFrame, gammas, hmap) -> list[Violation]:
    """Cocycle and h normalisation, endomorphism property of Gamma, and conditions a-d."""
    Hg, Q = fr.H, fr.Q
    H = LieRing(star_trivial(Hg))
    K = LieRing(star_trivial(Q))
    e = ExtensionData(H, K, fr.sigma, gammas, fr.f, hmap)
    out = [v for v in verify_cocycle(e) if v.label in ("cocycle-normal", "cocycle", "gamma-end")]
    o = _Ops(e)
    m, i, sig, gam, f, hh, km = o.m, o.i, o.sig, o.gam, o.f, o.hh, o.km
    kk = np.arange(Q.order)
    _check("h-normal", ("x",), hh(kk, o.kone), o.one, out)
    _check("h-normal", ("x",), hh(o.kone, kk), o.one, out)
    _check("h-normal", ("x",), hh(kk, kk), o.one, out)

    names = ("k", "x", "y", "z")
    g = _grids(e, names)
    k, x, y, z = (g[v] for v in names)
    _check("a", names,
           m(gam(z, m(sig(x, i(k)), i(f(x, y)))), hh(km(x, y), z)),
           m(sig(x, m(gam(z, i(k)), hh(y, z))), hh(x, z)), out)

    names = ("l", "x", "y", "z")
    g = _grids(e, names)
    l, x, y, z = (g[v] for v in names)
    _check("b", names,
           m(gam(x, m(sig(y, l), f(y, z))), hh(x, km(y, z))),
           m(sig(y, m(gam(x, l), hh(x, z))), hh(x, y)), out)

    names = ("h", "k", "l", "x", "y", "z")
    g = _grids(e, names)
    h, k, l, x, y, z = (g[v] for v in names)
    _check("c", names,
           sig(z, m(gam(x, k), gam(y, i(h)), hh(x, y))),
           m(gam(x, m(l, sig(z, k), f(z, y), i(f(y, z)), sig(y, i(l)))),
             gam(y, m(i(l), sig(z, i(h)), sig(x, l), i(f(z, x)), f(x, z))),
             hh(x, y)), out)
    _check("d", names,
           m(gam(z, m(gam(x, i(k)), gam(y, h), i(hh(x, y)))),
             gam(x, m(gam(y, i(l)), gam(z, k), i(hh(y, z)))),
             gam(y, m(gam(z, i(h)), gam(x, l), i(hh(z, x))))),
           o.one, out)
    return out


def metacyclic_star(g: GroupTable, h: Subset, gammas, hmap, *, strict: bool = False) -> MLA:
    """``a t(x) * b t(y) = Gamma_x(b) Gamma_y(a^-1) h(x, y)`` on a metacyclic group.

    ``h`` is the cyclic normal subgroup; gammas (|Q| x |H|) and hmap
    (|Q| x |Q|) use the H indexing of ``subgroup_table``. Conditions failing
    raise ConditionFailed; an uncertifiable result raises TheoremViolated.

    Conditions (a)-(d) alone do not always imply the axioms (Q8, D4 and
    M16 have counterexamples). ``strict=True`` also runs the general
    compatibility equations, which reject exactly those cases.
    """
    fr = metacyclic_frame(g, h)
    if not _is_cyclic(fr.H) or not _is_cyclic(fr.Q):
        raise PreconditionFailed("cyclic", None)
    gammas = np.asarray(gammas, dtype=np.int64)
    hmap = np.asarray(hmap, dtype=np.int64)
    viol = metacyclic_conditions(fr, gammas, hmap)
    if not viol and strict:
        viol = verify_star_compatibility(ExtensionData(
            LieRing(star_trivial(fr.H)), LieRing(star_trivial(fr.Q)),
            fr.sigma, gammas, fr.f, hmap))
    if viol:
        raise ConditionFailed(viol[0].label, viol[0].witness)
    star = metacyclic_star_table(fr, gammas, hmap)
    viol = check_mla_axioms(g, star)
    if viol:
        raise TheoremViolated(viol, "for the metacyclic star")
    return MLA(g, StarTable(star), True)


def metacyclic_star_table(fr: MetacyclicFrame, gammas, hmap) -> np.ndarray:
    g, Hg = fr.group, fr.H
    x = fr.proj
    a = fr.local(g.mul[np.arange(g.order), g.inv[fr.section[x]]])   # g = a t(x)
    A, X = a[:, None], x[:, None]
    B, Y = a[None, :], x[None, :]
    val = Hg.mul[Hg.mul[gammas[X, B], gammas[Y, Hg.inv[A]]], hmap[X, Y]]
    return fr.embed[val]


def _is_cyclic(g: GroupTable) -> bool:
    return int(g.orders.max()) == g.order


# ---------------------------------------------------------------------------
# random instances


def automorphism_table(g: GroupTable, auts=None) -> tuple[GroupTable, list]:
    """Aut(G) as a group table under composition; index 0 is the identity map."""
    from .search import automorphism_group
    auts = [np.asarray(p) for p in (auts if auts is not None else automorphism_group(g))]
    ident = np.arange(g.order)
    auts.sort(key=lambda p: (not np.array_equal(p, ident), p.tolist()))
    pos = {tuple(p.tolist()): i for i, p in enumerate(auts)}
    mul = [[pos[tuple(p[q].tolist())] for q in auts] for p in auts]
    return validate_group(mul, name=f"Aut({g.name})"), auts


def cocycle_library(K: GroupTable, H: GroupTable) -> list[np.ndarray]:
    """Known factor sets K x K -> H: the trivial one and bilinear ones.

    A bilinear cocycle is ``f(x, y) = u^(x_i y_j)`` in coordinates of a basis
    of K, for basis positions i, j and u in H whose order divides both
    basis orders. Bilinear maps satisfy the cocycle law for trivial sigma.
    """
    out = [np.full((K.order, K.order), H.identity, dtype=np.int64)]
    basis = abelian_basis(K)
    to, _ = coordinates(K, basis)
    coords = [to[x] for x in range(K.order)]
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            d = math.gcd(int(K.orders[bi]), int(K.orders[bj]))
            for u in range(H.order):
                if u == H.identity or d % int(H.orders[u]):
                    continue
                f = np.array([[H.power(u, coords[x][i] * coords[y][j])
                               for y in range(K.order)] for x in range(K.order)])
                out.append(f)
    return out


@dataclass
class InstanceSpace:
    """Precomputed ingredients for drawing extension data over fixed H and K."""

    Hg: GroupTable
    Kg: GroupTable
    brackets_H: list
    brackets_K: list
    sigmas: list
    endos: list
    cocycles: list
    pairings: list

    @classmethod
    def build(cls, Hg: GroupTable, Kg: GroupTable) -> "InstanceSpace":
        from .search import abelian_bracket_oracle, endomorphisms, homomorphisms
        aut_tab, auts = automorphism_table(Hg)
        sigmas = [np.array([auts[a] for a in phi]) for phi in homomorphisms(Kg, aut_tab)]
        return cls(Hg, Kg,
                   [s.star for s in abelian_bracket_oracle(Hg)],
                   [s.star for s in abelian_bracket_oracle(Kg)],
                   sigmas,
                   endomorphisms(Hg),
                   cocycle_library(Kg, Hg),
                   [p.pairing for p in enumerate_central_pairings(Kg, Hg)])

    def draw(self, rng: np.random.Generator, p_zero_gamma: float = 0.5) -> ExtensionData:
        """One draw; may or may not verify."""
        def pick(seq):
            return seq[int(rng.integers(len(seq)))]

        nk, nh = self.Kg.order, self.Hg.order
        if rng.random() < p_zero_gamma:
            gamma = np.full((nk, nh), self.Hg.identity, dtype=np.int64)
        else:
            gamma = np.array([pick(self.endos) for _ in range(nk)])
            gamma[self.Kg.identity] = self.Hg.identity
        return ExtensionData(
            LieRing(MLA(self.Hg, StarTable(pick(self.brackets_H)), True)),
            LieRing(MLA(self.Kg, StarTable(pick(self.brackets_K)), True)),
            pick(self.sigmas), gamma, pick(self.cocycles), pick(self.pairings))


def is_verified(e: ExtensionData) -> bool:
    return not verify_cocycle(e) and not verify_star_compatibility(e)


def random_verified_instances(spaces: Sequence[InstanceSpace], count: int,
                              rng: np.random.Generator, max_draws: int = 100_000):
    """Draw until ``count`` instances pass both verifiers (rejection sampling)."""
    out = []
    draws = 0
    while len(out) < count:
        if draws >= max_draws:
            raise RuntimeError(f"only {len(out)} verified instances after {draws} draws")
        sp = spaces[int(rng.integers(len(spaces)))]
        e = sp.draw(rng)
        draws += 1
        if is_verified(e):
            out.append(e)
    return out, draws
