"""Finite groups as validated multiplication tables.

Elements are the integers ``0..n-1``. Every constructor in this module puts
the identity at index 0 and documents how the remaining indices are laid out,
so that tables written to disk reload bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InvalidParameters,
    MissingInverse,
    NoIdentity,
    NotAssociative,
    NotClosed,
    NotNormal,
    ValidationError,
)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Subset:
    """Membership flags over the elements of a group of order ``n``."""

    members: np.ndarray

    def __post_init__(self):
        flags = np.array(self.members, dtype=bool)
        flags.setflags(write=False)
        object.__setattr__(self, "members", flags)

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> "Subset":
        flags = np.zeros(n, dtype=bool)
        for e in elements:
            flags[int(e)] = True
        return cls(flags)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def identity(cls, group: "GroupTable") -> "Subset":
        return cls.of(group.order, [group.identity])

    @property
    def parent_order(self) -> int:
        return len(self.members)

    @property
    def size(self) -> int:
        return int(self.members.sum())

    def __len__(self) -> int:
        return self.size

    def elements(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.members)]

    def __iter__(self):
        return iter(self.elements())

    def __contains__(self, a) -> bool:
        return bool(self.members[int(a)])

    def issubset(self, other: "Subset") -> bool:
        return not bool(np.any(self.members & ~other.members))

    def __le__(self, other: "Subset") -> bool:
        return self.issubset(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subset):
            return NotImplemented
        return np.array_equal(self.members, other.members)

    def __hash__(self) -> int:
        return hash(self.members.tobytes())

    def __repr__(self) -> str:
        return f"Subset({self.elements()})"

    def is_full(self) -> bool:
        return bool(self.members.all())

    def is_trivial(self, group: "GroupTable") -> bool:
        return self.size == 1 and bool(self.members[group.identity])


@dataclass(frozen=True, eq=False)
class GroupTable:
    """A finite group given by its multiplication table.

    Build instances with :func:`validate_group` or one of the constructors;
    the dataclass itself does no checking.
    """

    order: int
    mul: np.ndarray
    identity: int
    inv: np.ndarray
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "mul", _frozen(self.mul))
        object.__setattr__(self, "inv", _frozen(self.inv))

    def __len__(self) -> int:
        return self.order

    def elements(self) -> range:
        return range(self.order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupTable):
            return NotImplemented
        return (self.order == other.order and self.identity == other.identity
                and np.array_equal(self.mul, other.mul))

    def __hash__(self) -> int:
        return hash((self.order, self.mul.tobytes()))

    @cached_property
    def conj_table(self) -> np.ndarray:
        """``conj_table[z, x] = z x z^-1``."""
        t = self.mul[self.mul, self.inv[:, None]]
        t.setflags(write=False)
        return t

    @cached_property
    def comm_table(self) -> np.ndarray:
        """``comm_table[x, y] = x y x^-1 y^-1``."""
        inv = self.inv
        t = self.mul[self.mul, self.mul[inv[:, None], inv[None, :]]]
        t.setflags(write=False)
        return t

    @cached_property
    def commute(self) -> np.ndarray:
        t = self.mul == self.mul.T
        t.setflags(write=False)
        return t

    @cached_property
    def is_abelian(self) -> bool:
        return bool(self.commute.all())

    def power(self, a: int, k: int) -> int:
        k %= self.element_order(a)
        r = self.identity
        for _ in range(k):
            r = int(self.mul[r, a])
        return r

    def element_order(self, a: int) -> int:
        r, k = int(a), 1
        while r != self.identity:
            r = int(self.mul[r, a])
            k += 1
        return k

    @cached_property
    def orders(self) -> np.ndarray:
        return _frozen([self.element_order(a) for a in range(self.order)])

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*[int(o) for o in self.orders])

    def to_json(self) -> dict:
        return {"name": self.name, "order": self.order, "mul": self.mul.tolist()}


@dataclass(frozen=True, eq=False)
class GroupHom:
    source: GroupTable
    target: GroupTable
    image: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "image", _frozen(self.image))

    def __call__(self, a):
        return self.image[a]

    def is_homomorphism(self) -> bool:
        im, s, t = self.image, self.source, self.target
        if im[s.identity] != t.identity:
            return False
        return bool(np.array_equal(im[s.mul], t.mul[im[:, None], im[None, :]]))

    def kernel(self) -> Subset:
        return Subset(self.image == self.target.identity)

    def image_subset(self) -> Subset:
        return Subset.of(self.target.order, set(self.image.tolist()))


# ---------------------------------------------------------------------------
# validation


def validate_group(raw: Sequence[Sequence[int]], name: str = "") -> GroupTable:
    """Check that ``raw`` is a group table and locate identity and inverses.

    Each failure names the first offending witness in row-major order.
    """
    try:
        mul = np.array(raw, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"table is not a rectangular integer array: {exc}") from None
    if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
        raise ValidationError(f"table must be square and nonempty, got shape {mul.shape}")
    n = mul.shape[0]
    bad = np.argwhere((mul < 0) | (mul >= n))
    if len(bad):
        raise NotClosed(tuple(int(i) for i in bad[0]))

    ar = np.arange(n)
    ident = None
    for e in range(n):
        if np.array_equal(mul[e], ar) and np.array_equal(mul[:, e], ar):
            ident = e
            break
    if ident is None:
        raise NoIdentity()

    inv = np.full(n, -1, dtype=np.int64)
    for a in range(n):
        cands = np.flatnonzero((mul[a] == ident) & (mul[:, a] == ident))
        if len(cands) == 0:
            raise MissingInverse(a)
        inv[a] = cands[0]

    # (ab)c vs a(bc), vectorised over all triples
    lhs = mul[mul[:, :, None], ar[None, None, :]]
    rhs = mul[ar[:, None, None], mul[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        raise NotAssociative(*(int(i) for i in bad[0]))
    return GroupTable(n, mul, ident, inv, name)


def group_from_json(data: dict) -> GroupTable:
    return validate_group(data["mul"], name=data.get("name", ""))


# ---------------------------------------------------------------------------
# standard families


def cyclic(n: int) -> GroupTable:
    """C_n with index i standing for g^i."""
    if n < 1:
        raise InvalidParameters("cyclic order must be positive")
    ar = np.arange(n)
    mul = (ar[:, None] + ar[None, :]) % n
    return GroupTable(n, mul, 0, (-ar) % n, f"C{n}")


def direct_product(g: GroupTable, h: GroupTable, name: str | None = None) -> GroupTable:
    """G x H on pairs, pair (a, b) stored at index ``a + |G| * b``.

    The first factor varies fastest.
    """
    ng, nh = g.order, h.order
    idx = np.arange(ng * nh)
    a, b = idx % ng, idx // ng
    mul = g.mul[a[:, None], a[None, :]] + ng * h.mul[b[:, None], b[None, :]]
    inv = g.inv[a] + ng * h.inv[b]
    ident = g.identity + ng * h.identity
    return GroupTable(ng * nh, mul, ident, inv, name or f"{g.name}x{h.name}")


def abelian(*orders: int) -> GroupTable:
    """C_{n1} x ... x C_{nk}, mixed radix with the first factor fastest."""
    if not orders:
        raise InvalidParameters("abelian needs at least one factor")
    out = cyclic(orders[0])
    for n in orders[1:]:
        out = direct_product(out, cyclic(n))
    return GroupTable(out.order, out.mul, out.identity, out.inv,
                      "x".join(f"C{n}" for n in orders))


def dihedral(n: int) -> GroupTable:
    """Dihedral group of order 2n; r^i s^j sits at index ``i + n*j``."""
    if n < 1:
        raise InvalidParameters("dihedral parameter must be positive")
    idx = np.arange(2 * n)
    i, j = idx % n, idx // n
    sign = np.where(j == 1, -1, 1)
    rot = (i[:, None] + sign[:, None] * i[None, :]) % n
    ref = (j[:, None] + j[None, :]) % 2
    mul = rot + n * ref
    inv = np.array([int(np.flatnonzero(mul[a] == 0)[0]) for a in idx])
    return GroupTable(2 * n, mul, 0, inv, f"D{n}")


def metacyclic(m: int, n: int, r: int, s: int) -> GroupTable:
    """<a, b | a^m = 1, b^n = a^s, b a b^-1 = a^r>; a^i b^j at index ``i + m*j``."""
    if m < 1 or n < 1:
        raise InvalidParameters("metacyclic orders must be positive")
    if pow(r, n, m) != 1 % m:
        raise InvalidParameters(f"r^n = {r}^{n} is not 1 mod {m}")
    if (s * (r - 1)) % m != 0:
        raise InvalidParameters(f"s(r-1) = {s * (r - 1)} is not 0 mod {m}")
    size = m * n
    idx = np.arange(size)
    i, j = idx % m, idx // m
    rpow = np.array([pow(r, int(e), m) for e in range(n)])
    expo = i[:, None] + i[None, :] * rpow[j][:, None]
    bj = j[:, None] + j[None, :]
    expo = expo + np.where(bj >= n, s, 0)
    mul = (expo % m) + m * (bj % n)
    inv = np.array([int(np.flatnonzero(mul[a] == 0)[0]) for a in idx])
    return GroupTable(size, mul, 0, inv, f"M({m},{n},{r},{s})")


def quaternion8() -> GroupTable:
    """Q8 presented as metacyclic(4, 2, 3, 2): a^i b^j at index ``i + 4*j``."""
    g = metacyclic(4, 2, 3, 2)
    return GroupTable(g.order, g.mul, g.identity, g.inv, "Q8")


def heisenberg(p: int) -> GroupTable:
    """Upper unitriangular 3x3 matrices over Z/p.

    (a, b, c) sits at index ``a + p*b + p^2*c`` and
    (a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b').
    """
    if p < 2:
        raise InvalidParameters("heisenberg needs p >= 2")
    idx = np.arange(p ** 3)
    a, b, c = idx % p, (idx // p) % p, idx // (p * p)
    na = (a[:, None] + a[None, :]) % p
    nb = (b[:, None] + b[None, :]) % p
    nc = (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % p
    mul = na + p * nb + p * p * nc
    inv = np.array([int(np.flatnonzero(mul[x] == 0)[0]) for x in idx])
    return GroupTable(p ** 3, mul, 0, inv, f"Heis({p})")


FAMILIES = {
    "cyclic": (cyclic, 1),
    "abelian": (abelian, None),
    "dihedral": (dihedral, 1),
    "quaternion8": (quaternion8, 0),
    "q8": (quaternion8, 0),
    "heisenberg": (heisenberg, 1),
    "metacyclic": (metacyclic, 4),
}


def construct_standard_group(spec: str) -> GroupTable:
    """Build a group from a ``name:params`` family string.

    Factors joined by `` x `` build a direct product, e.g.
    ``"dihedral:4 x cyclic:2"``.

    >>> construct_standard_group("metacyclic:5,4,2,0").order
    20
    """
    if " x " in spec:
        parts = [construct_standard_group(p) for p in spec.split(" x ")]
        out = parts[0]
        for p in parts[1:]:
            out = direct_product(out, p)
        return out
    name, _, params = spec.strip().partition(":")
    name = name.strip().lower()
    if name not in FAMILIES:
        raise InvalidParameters(f"unknown family {name!r}; known: {sorted(FAMILIES)}")
    ctor, arity = FAMILIES[name]
    try:
        args = [int(x) for x in params.replace(":", ",").split(",") if x.strip()]
    except ValueError:
        raise InvalidParameters(f"bad parameters in {spec!r}") from None
    if arity is not None and len(args) != arity:
        raise InvalidParameters(f"{name} takes {arity} parameter(s), got {len(args)}")
    g = ctor(*args)
    validate_group(g.mul)
    return g


# ---------------------------------------------------------------------------
# elementwise operations


def conj(g: GroupTable, z: int, x: int) -> int:
    """z x z^-1"""
    return int(g.conj_table[z, x])


def comm(g: GroupTable, x: int, y: int) -> int:
    """x y x^-1 y^-1"""
    return int(g.comm_table[x, y])


# ---------------------------------------------------------------------------
# subgroups


def _as_list(gens) -> list[int]:
    if isinstance(gens, Subset):
        return gens.elements()
    return [int(x) for x in gens]


def subgroup_closure(g: GroupTable, gens) -> Subset:
    """Smallest subgroup containing ``gens`` (a Subset or iterable of indices)."""
    gl = sorted(set(_as_list(gens)))
    seen = np.zeros(g.order, dtype=bool)
    seen[g.identity] = True
    work = [g.identity]
    while work:
        x = work.pop()
        for s in gl:
            y = g.mul[x, s]
            if not seen[y]:
                seen[y] = True
                work.append(int(y))
    return Subset(seen)


def normal_closure(g: GroupTable, gens) -> Subset:
    conjugates = set()
    for x in _as_list(gens):
        conjugates.update(g.conj_table[:, x].tolist())
    return subgroup_closure(g, conjugates)


def is_subgroup(g: GroupTable, s: Subset) -> bool:
    m = s.members
    if not m[g.identity]:
        return False
    el = np.flatnonzero(m)
    return bool(m[g.mul[np.ix_(el, el)]].all() and m[g.inv[el]].all())


def normality_witness(g: GroupTable, s: Subset):
    """First (z, x) with x in s and z x z^-1 outside s, or None."""
    m = s.members
    bad = np.argwhere(~m[g.conj_table] & m[None, :])
    if len(bad):
        return tuple(int(i) for i in bad[0])
    return None


def is_normal(g: GroupTable, s: Subset) -> bool:
    return is_subgroup(g, s) and normality_witness(g, s) is None


def center(g: GroupTable) -> Subset:
    return Subset(g.commute.all(axis=1))


def derived_subgroup(g: GroupTable) -> Subset:
    return subgroup_closure(g, np.unique(g.comm_table).tolist())


def commutator_subgroup(g: GroupTable, a: Subset, b: Subset) -> Subset:
    """[A, B], the subgroup generated by [x, y] for x in A, y in B."""
    ea, eb = a.elements(), b.elements()
    vals = np.unique(g.comm_table[np.ix_(ea, eb)])
    return subgroup_closure(g, vals.tolist())


def is_class2(g: GroupTable) -> bool:
    """[G, G] inside Z(G); abelian groups qualify."""
    return derived_subgroup(g).issubset(center(g))


def is_abelian_subset(g: GroupTable, s: Subset) -> bool:
    el = s.elements()
    return bool(g.commute[np.ix_(el, el)].all())


def subgroup_table(g: GroupTable, s: Subset, name: str = "") -> tuple[GroupTable, np.ndarray]:
    """The subgroup ``s`` as a group on its own, plus the embedding.

    Subgroup index i corresponds to the i-th smallest member of ``s``.
    """
    el = np.array(s.elements(), dtype=np.int64)
    pos = np.full(g.order, -1, dtype=np.int64)
    pos[el] = np.arange(len(el))
    mul = pos[g.mul[np.ix_(el, el)]]
    if (mul < 0).any():
        raise ValidationError("subset is not closed under multiplication")
    return GroupTable(len(el), mul, int(pos[g.identity]), pos[g.inv[el]], name), el


def quotient(g: GroupTable, n: Subset, name: str | None = None) -> tuple[GroupTable, GroupHom]:
    """G/N with cosets ordered by their least element.

    Raises NotNormal if ``n`` is not a normal subgroup.
    """
    if not is_subgroup(g, n):
        el = n.elements()
        bad = [(a, b) for a in el for b in el if g.mul[a, b] not in n]
        raise NotNormal(bad[0] if bad else ("identity", g.identity))
    w = normality_witness(g, n)
    if w is not None:
        raise NotNormal(w)
    nel = n.elements()
    label = np.full(g.order, -1, dtype=np.int64)
    reps = []
    for a in range(g.order):
        if label[a] < 0:
            label[g.mul[a, nel]] = len(reps)
            reps.append(a)
    reps = np.array(reps, dtype=np.int64)
    qmul = label[g.mul[np.ix_(reps, reps)]]
    qinv = label[g.inv[reps]]
    q = GroupTable(len(reps), qmul, int(label[g.identity]), qinv,
                   name or f"{g.name}/N{n.size}")
    return q, GroupHom(g, q, label)


def coset_representatives(proj: GroupHom) -> np.ndarray:
    """Least element of every coset, indexed by quotient element."""
    reps = np.full(proj.target.order, -1, dtype=np.int64)
    for a in range(proj.source.order - 1, -1, -1):
        reps[proj.image[a]] = a
    return reps


def relabel(g: GroupTable, perm: Sequence[int], name: str | None = None) -> GroupTable:
    """Copy of ``g`` with element a renamed to perm[a]."""
    perm = np.asarray(perm, dtype=np.int64)
    n = g.order
    inv_perm = np.empty(n, dtype=np.int64)
    inv_perm[perm] = np.arange(n)
    mul = perm[g.mul[np.ix_(inv_perm, inv_perm)]]
    return GroupTable(n, mul, int(perm[g.identity]), perm[g.inv[inv_perm]],
                      name if name is not None else g.name)


def generating_sequence(g: GroupTable) -> list[int]:
    """A short generating sequence picked greedily by element index.

    Each chosen element enlarges the subgroup generated so far; among the
    candidates the one giving the largest enlargement wins (ties: smallest
    index), which keeps the sequence short for the small groups used here.
    """
    gens: list[int] = []
    cur = Subset.identity(g)
    while not cur.is_full():
        best, best_size = None, -1
        for a in range(g.order):
            if a in cur:
                continue
            size = subgroup_closure(g, gens + [a]).size
            if size > best_size:
                best, best_size = a, size
        gens.append(best)
        cur = subgroup_closure(g, gens)
    return gens
