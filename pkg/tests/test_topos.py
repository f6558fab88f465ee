import pytest

from facto.fincat import chain_category, discrete_category, terminal_category, walking_arrow
from facto.topos.cartesian import compare_lt, dfs_to_lt, is_cartesian_dfs
from facto.topos.omega import (Omega, check_closure_axioms, check_lt_laws, closure_of, enumerate_grothendieck,
                               enumerate_lt, identity_topology, lt_from_grothendieck, lt_leq, top_topology,
                               topology_of_closure)
from facto.topos.presheaf import (check_exponential, constant_presheaf, enumerate_presheaves, exponential,
                                  nat_hom_morphisms, nat_homs, product, representable, terminal_presheaf)
from facto.topos.sheaves import check_sheafification, is_sheaf, sheafify
from oracles import grothendieck_topologies, sieves

BASES = [terminal_category(), walking_arrow(), chain_category(3), discrete_category(2)]


@pytest.mark.parametrize("B", BASES, ids=lambda B: B.name)
def test_omega_matches_sieve_oracle(B):
    om = Omega(B)
    for c in range(B.n_obj):
        assert set(om.sieves[c]) == set(sieves(B, c))


def test_walking_arrow_omega_sizes():
    assert Omega(walking_arrow()).presheaf.sizes == (2, 3)


@pytest.mark.parametrize("B", BASES, ids=lambda B: B.name)
def test_topologies_match_grothendieck_oracle(B):
    ks = enumerate_lt(B)
    oracle = grothendieck_topologies(B)
    assert len(ks) == len(oracle)
    got = {tuple(frozenset(k.covering(c)) for c in range(B.n_obj)) for k in ks}
    want = {tuple(frozenset(J[c]) for c in range(B.n_obj)) for J in oracle}
    assert got == want
    # the package's own Grothendieck route agrees as well
    assert {lt_from_grothendieck(ks[0].om, J) for J in enumerate_grothendieck(B)} == set(ks)


def test_known_counts():
    assert len(enumerate_lt(terminal_category())) == 2
    assert len(enumerate_lt(walking_arrow())) == 4


@pytest.mark.parametrize("B", BASES[:3], ids=lambda B: B.name)
def test_lt_laws_and_extremes(B):
    ks = enumerate_lt(B)
    om = ks[0].om
    for k in ks:
        assert check_lt_laws(k).ok
        assert lt_leq(identity_topology(om), k) and lt_leq(k, top_topology(om))
    assert identity_topology(om) in ks and top_topology(om) in ks


@pytest.mark.parametrize("B", BASES[:3], ids=lambda B: B.name)
def test_closure_bijection(B):
    ks = enumerate_lt(B)
    om = ks[0].om
    pres = [om.presheaf, terminal_presheaf(B)] + [representable(B, c) for c in range(B.n_obj)]
    for k in ks:
        c = closure_of(k)
        assert topology_of_closure(c) == k
        assert check_closure_axioms(c, pres, nat_hom_morphisms(representable(B, 0), om.presheaf)).ok


def test_dfs_for_every_topology(arrow_topos):
    from facto.ortho import verify_dfs
    T = arrow_topos
    for k in enumerate_lt(T.B, T.om):
        D = T.dfs_of(k)
        assert verify_dfs(T.C, D.E, D.J, D.M).ok
        assert is_cartesian_dfs(T, D).checks["cartesian"]
        k2, rep = dfs_to_lt(T, D)
        assert k2 == k and rep.ok


def test_order_characterizations_agree(arrow_topos):
    T = arrow_topos
    ks = enumerate_lt(T.B, T.om)
    for a in ks:
        for b in ks:
            r = compare_lt(T, a, b)
            assert r["le"] == lt_leq(a, b)


def test_sheafification_walking_arrow(arrow_topos):
    T = arrow_topos
    for k in enumerate_lt(T.B, T.om):
        for P in T.window.presheaves:
            rep = check_sheafification(k, P)
            assert rep.ok, rep
            assert is_sheaf(k, sheafify(k, P).sheaf)


def test_top_topology_sheaves_are_terminal():
    B = walking_arrow()
    om = Omega(B)
    k = top_topology(om)
    for P in enumerate_presheaves(B, [2, 2]):
        a = sheafify(k, P).sheaf
        assert a.sizes == (1, 1)


def test_exponential_on_walking_arrow():
    B = walking_arrow()
    A, C = representable(B, 1), constant_presheaf(B, 2)
    assert check_exponential(A, C, [terminal_presheaf(B), representable(B, 0)]).ok
    E = exponential(A, C)
    E = getattr(E, "presheaf", E)
    # Yoneda: C^A(c) = Nat(y(c) x A, C)
    for c in range(B.n_obj):
        Y, _, _ = product(representable(B, c), A)
        assert E.sizes[c] == len(nat_homs(Y, C))
    P, _, _ = product(A, A)
    assert P.sizes == (A.sizes[0] ** 2, A.sizes[1] ** 2)
