import itertools

import numpy as np
import pytest

from mlie.errors import (
    InvalidParameters,
    MissingInverse,
    NoIdentity,
    NotAssociative,
    NotClosed,
    NotNormal,
)
from mlie.groups import (
    Subset,
    abelian,
    center,
    comm,
    conj,
    construct_standard_group,
    cyclic,
    derived_subgroup,
    dihedral,
    direct_product,
    heisenberg,
    is_class2,
    is_normal,
    metacyclic,
    normal_closure,
    quaternion8,
    quotient,
    relabel,
    subgroup_closure,
    subgroup_table,
    validate_group,
)


def heis_mul(p, u, v):
    """Reference product on triples, written out by hand."""
    a, b, c = u
    a2, b2, c2 = v
    return ((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p)


def heis_index(p, t):
    return t[0] + p * t[1] + p * p * t[2]


# validation ------------------------------------------------------------------

def test_trivial_table():
    g = validate_group([[0]])
    assert g.order == 1 and g.identity == 0


def test_c2_table():
    g = validate_group([[0, 1], [1, 0]])
    assert g.identity == 0
    assert g.inv.tolist() == [0, 1]


def test_no_inverse_rejected():
    with pytest.raises((NoIdentity, MissingInverse)) as exc:
        validate_group([[0, 1], [1, 1]])
    if isinstance(exc.value, MissingInverse):
        assert exc.value.witness == 1


def test_out_of_range_entry():
    with pytest.raises(NotClosed) as exc:
        validate_group([[0, 1], [1, 2]])
    assert exc.value.witness == (1, 1)


def test_non_associative_witness():
    # a Latin square with identity 0 that is not associative
    t = [[0, 1, 2, 3, 4],
         [1, 0, 3, 4, 2],
         [2, 4, 0, 1, 3],
         [3, 2, 4, 0, 1],
         [4, 3, 1, 2, 0]]
    with pytest.raises(NotAssociative) as exc:
        validate_group(t)
    a, b, c = exc.value.witness
    m = np.array(t)
    assert m[m[a, b], c] != m[a, m[b, c]]


def test_no_identity():
    with pytest.raises(NoIdentity):
        validate_group([[1, 1], [1, 1]])


# families --------------------------------------------------------------------

def test_cyclic_one():
    assert cyclic(1).order == 1


def test_heisenberg3_center_is_derived():
    g = heisenberg(3)
    assert g.order == 27
    z, d = center(g), derived_subgroup(g)
    assert z.size == 3 and z == d
    # oracle: the centre is {(0,0,c)} by the multiplication rule
    assert z.elements() == sorted(heis_index(3, (0, 0, c)) for c in range(3))


def test_heisenberg_table_matches_reference():
    p = 3
    g = heisenberg(p)
    triples = list(itertools.product(range(p), repeat=3))
    for u in triples:
        for v in triples:
            w = heis_mul(p, u, v)
            assert g.mul[heis_index(p, u), heis_index(p, v)] == heis_index(p, w)


def test_metacyclic_20():
    g = metacyclic(5, 4, 2, 0)
    validate_group(g.mul)
    a = subgroup_closure(g, [1])
    assert a.size == 5 and is_normal(g, a)


@pytest.mark.parametrize("params", [(5, 4, 3, 1), (6, 2, 2, 0), (5, 2, 2, 0)])
def test_metacyclic_bad_parameters(params):
    with pytest.raises(InvalidParameters):
        metacyclic(*params)


def test_quaternion():
    g = quaternion8()
    assert g.order == 8 and not g.is_abelian
    assert int((g.orders == 2).sum()) == 1        # a single involution
    assert int((g.orders == 4).sum()) == 6


def test_dihedral():
    g = dihedral(4)
    assert g.order == 8 and not g.is_abelian
    assert int((g.orders == 2).sum()) == 5


def test_family_grammar():
    assert construct_standard_group("metacyclic:5,4,2,0").order == 20
    assert construct_standard_group("dihedral:4 x cyclic:2").order == 16
    with pytest.raises(InvalidParameters):
        construct_standard_group("nosuch:3")
    with pytest.raises(InvalidParameters):
        construct_standard_group("dihedral:4,2")


# element operations ----------------------------------------------------------

def test_abelian_commutators_vanish():
    g = abelian(2, 4)
    assert all(comm(g, x, y) == 0 for x in range(8) for y in range(8))


def test_conj_by_identity():
    g = dihedral(5)
    assert all(conj(g, g.identity, x) == x for x in range(g.order))


def test_heisenberg_commutator():
    p = 3
    g = heisenberg(p)
    x, y = heis_index(p, (1, 0, 0)), heis_index(p, (0, 1, 0))
    assert comm(g, x, y) == heis_index(p, (0, 0, 1))


# subgroups -------------------------------------------------------------------

def test_closure_of_nothing():
    g = dihedral(3)
    assert subgroup_closure(g, []).elements() == [0]


def test_cyclic_subgroup():
    assert subgroup_closure(cyclic(6), [2]).elements() == [0, 2, 4]


def test_normal_closure_of_reflection():
    g = dihedral(4)
    s = 4                                          # r^0 s
    n = normal_closure(g, [s])
    # oracle: saturate {s} under conjugation and products by brute force
    cur = {s}
    while True:
        nxt = cur | {int(g.conj_table[z, x]) for z in range(8) for x in cur}
        nxt |= {int(g.mul[a, b]) for a in nxt for b in nxt}
        if nxt == cur:
            break
        cur = nxt
    assert set(n.elements()) == cur
    assert n.size >= 4 and is_normal(g, n)


def test_center_and_derived_abelian():
    g = abelian(3, 3)
    assert center(g).is_full and derived_subgroup(g).is_trivial(g) and is_class2(g)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_heisenberg_class2(p):
    g = heisenberg(p)
    assert center(g).size == p and center(g) == derived_subgroup(g) and is_class2(g)


def test_s3_not_class2():
    g = metacyclic(3, 2, 2, 0)
    assert derived_subgroup(g).size == 3 and center(g).size == 1
    assert not is_class2(g)


# quotients -------------------------------------------------------------------

def test_quotient_by_identity():
    g = dihedral(4)
    q, proj = quotient(g, Subset.identity(g))
    assert q.order == 8 and sorted(proj.image.tolist()) == list(range(8))


def test_quotient_by_everything():
    g = dihedral(4)
    q, _ = quotient(g, Subset.full(8))
    assert q.order == 1


def test_heisenberg_mod_center():
    g = heisenberg(3)
    q, proj = quotient(g, center(g))
    validate_group(q.mul)
    assert q.order == 9 and q.is_abelian and q.exponent == 3
    assert proj.is_homomorphism() and proj.kernel() == center(g)


def test_quotient_rejects_non_normal():
    g = dihedral(3)
    with pytest.raises(NotNormal):
        quotient(g, subgroup_closure(g, [3]))


# products --------------------------------------------------------------------

def test_trivial_factor():
    g = dihedral(3)
    pr = direct_product(cyclic(1), g)
    assert np.array_equal(pr.mul, g.mul)


def test_klein():
    g = direct_product(cyclic(2), cyclic(2))
    assert g.order == 4 and g.exponent == 2


def test_c3_squared_exponent():
    g = direct_product(cyclic(3), cyclic(3))
    assert all(g.power(x, 3) == 0 for x in range(9))


def test_subgroup_table_and_relabel():
    g = dihedral(4)
    sub, emb = subgroup_table(g, subgroup_closure(g, [1]))
    assert sub.order == 4 and sub.is_abelian
    assert np.array_equal(g.mul[emb[:, None], emb[None, :]], emb[sub.mul])
    perm = np.array([0, 3, 2, 1, 4, 7, 6, 5])
    h = relabel(g, perm)
    validate_group(h.mul)
