import pytest

from facto.algebra import (check_left_induced, check_lifted_adjunction, check_right_induced, closure_monad,
                           coem_category, cyclic_group, em_category, forgetful_preimage, identity_comonad,
                           identity_monad, induced_classes, involution_count, lift_factorization,
                           support_inclusion_instance, validate_monad)
from facto.fincat import chain_category, finset, same_tables
from facto.ortho import (Dfs, epi_class, factorizations_fs, fs_comparisons, iso_class, is_local, mono_class,
                         class_compose, verify_fs)
from oracles import equivariant_maps, group_actions


def test_z2_algebras_match_oracle(z2):
    T, em = z2
    G = cyclic_group(2)
    for n in range(5):
        want = set(group_actions(G.table, G.identity, n))
        got = {tuple(a.structure) for a in em.algebras if a.carrier == n}
        assert got == want
        assert len(want) == involution_count(n)
    assert len(em.algebras) == 18


def test_z2_morphisms_match_oracle(z2):
    T, em = z2
    EM = em.category
    for i, A in enumerate(em.algebras):
        for j, B in enumerate(em.algebras):
            rows = equivariant_maps(2, A.structure, A.carrier, B.structure, B.carrier)
            assert len(EM.hom(i, j)) == len(rows)
            got = {tuple(T.base.row(int(EM.underlying[m]))) for m in EM.hom(i, j)}
            assert got == set(rows)


def test_lift_matches_generic_search(z2):
    T, em = z2
    C, EM = em.base, em.category
    E, M = epi_class(C), mono_class(C)
    ET, MT = forgetful_preimage(em, E), forgetful_preimage(em, M)
    for f in range(EM.n_mor):
        lift = lift_factorization(em, f, E, M)
        assert lift.report.ok
        assert EM.compose(lift.m_alg, lift.e_alg) == f
        for fac in factorizations_fs(EM, f, ET, MT):
            assert len(fs_comparisons(EM, (lift.e_alg, lift.m_alg), fac)) == 1


def test_induced_fs_on_algebras(z2):
    T, em = z2
    C = em.base
    ET, MT = forgetful_preimage(em, epi_class(C)), forgetful_preimage(em, mono_class(C))
    assert verify_fs(em.category, ET, MT).ok


@pytest.mark.parametrize("which", ["EIM", "EMI"])
def test_locality_transfers_both_ways(z2, which):
    T, em = z2
    C = em.base
    cls = {"E": epi_class(C), "I": iso_class(C), "M": mono_class(C)}
    D = Dfs(*(cls[c] for c in which), name=which)
    DT = induced_classes(em, D)
    EM = em.category
    for S, ST in ((D.J, DT.J), (class_compose(C, D.J, D.E), class_compose(EM, DT.J, DT.E))):
        for i, A in enumerate(em.algebras):
            assert is_local(EM, i, ST) == is_local(C, int(em.forgetful.obj_map[i]), S)


def test_right_induced_report(z2):
    T, em = z2
    C = em.base
    D = Dfs(epi_class(C), iso_class(C), mono_class(C), name="EIM")
    assert check_right_induced(em, D).ok


def test_left_induced_identity_comonad():
    C = finset(2)
    cem = coem_category(identity_comonad(C))
    assert same_tables(cem.category, C) or cem.category.n_mor == C.n_mor
    D = Dfs(epi_class(C), iso_class(C), mono_class(C), name="EIM")
    assert check_left_induced(cem, D).ok


def test_identity_monad_algebras_are_base():
    C = finset(2)
    em = em_category(identity_monad(C))
    assert len(em.algebras) == C.n_obj
    assert em.category.n_mor == C.n_mor


def test_closure_monad_algebras_are_fixed_points():
    C = chain_category(4)
    T_obj = [1, 1, 3, 3]
    M = closure_monad(C, T_obj)
    assert validate_monad(M).ok
    em = em_category(M)
    assert sorted(int(em.forgetful.obj_map[i]) for i in range(len(em.algebras))) == [1, 3]


def test_lifted_adjunction_is_quillen():
    rep = check_lifted_adjunction(*support_inclusion_instance(cyclic_group(2), 4))
    assert rep.ok, rep
