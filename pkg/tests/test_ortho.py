import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from facto.errors import HypothesisFailed, NoFactorization, NonCommutingSquare
from facto.fincat import chain_category, finset, preorder_spaces
from facto.ortho import (Dfs, MorphismClass, all_class, bad_ladder, bim_class, box_left, box_right,
                         check_bousfield, check_diagonal, check_locality, class_compose, dfs_qfs_roundtrip,
                         dfs_to_qfs, epi_class, factorizations_dfs, factorizations_fs, factorize_fs,
                         fs_comparisons, dfs_comparisons, iso_class, ladder_fillers, ladder_fillers_naive,
                         lift_fillers, local_objects, mono_class, perp_left, perp_right, qfs_hypotheses,
                         qfs_to_dfs, reg_epi_class, reg_mono_class, two_out_of_three_failures, verify_dfs,
                         verify_fs, verify_qfs, verify_wfs)
from oracles import fillers_from_rows


def _sq(C, f, g):
    """Commuting squares from f to g, as (u, v)."""
    for u in C.hom(int(C.dom[f]), int(C.dom[g])):
        for v in C.hom(int(C.cod[f]), int(C.cod[g])):
            if C.compose(int(v), f) == C.compose(g, int(u)):
                yield int(u), int(v)


def test_lift_fillers_against_rows(fs2):
    C = fs2
    for f in range(C.n_mor):
        for g in range(C.n_mor):
            for u, v in _sq(C, f, g):
                n = fillers_from_rows(C.row(f), C.row(g), C.row(u), C.row(v),
                                      int(C.sizes[C.cod[f]]), int(C.sizes[C.dom[g]]))
                assert len(lift_fillers(C, f, g, u, v).fillers) == n


def test_lift_rejects_non_commuting(fs2):
    C = fs2
    f = g = int(C.ident[2])
    u, v = (int(x) for x in C.hom(2, 2)[:2])
    assert C.compose(v, f) != C.compose(g, u)
    with pytest.raises(NonCommutingSquare):
        lift_fillers(C, f, g, u, v)


def test_epi_mono_fs_finset3(fs3):
    rep = verify_fs(fs3, epi_class(fs3), mono_class(fs3))
    assert rep.ok, rep


def test_any_two_factorizations_linked_by_unique_iso(fs3):
    E, M = epi_class(fs3), mono_class(fs3)
    for f in range(fs3.n_mor):
        facs = factorizations_fs(fs3, f, E, M)
        assert facs
        for a in facs:
            for b in facs:
                assert len(fs_comparisons(fs3, a, b)) == 1


def test_perp_complements(fs3):
    assert perp_right(fs3, epi_class(fs3)) == mono_class(fs3)
    assert perp_left(fs3, mono_class(fs3)) == epi_class(fs3)


def test_wrong_order_fails_with_square_witness(fs3):
    rep = verify_fs(fs3, mono_class(fs3), epi_class(fs3))
    assert not rep.ok
    assert any(v.law.endswith("lifting") for v in rep.violations)


def test_weak_fs_all_iso(fs2):
    assert verify_wfs(fs2, all_class(fs2), iso_class(fs2)).ok
    assert verify_wfs(fs2, iso_class(fs2), all_class(fs2)).ok


def test_no_factorization_raises(fs2):
    Z = MorphismClass(fs2, np.zeros(fs2.n_mor, dtype=bool), "Z")
    with pytest.raises(NoFactorization):
        factorize_fs(fs2, 3, Z, Z)


def _dfs(C, E, J, M, name="D"):
    return Dfs(E, J, M, name=name)


def test_dfs_epi_iso_mono(fs3):
    D = _dfs(fs3, epi_class(fs3), iso_class(fs3), mono_class(fs3))
    assert verify_dfs(fs3, D.E, D.J, D.M).ok


def test_dfs_failure_has_ladder(fs3):
    E, M = epi_class(fs3), mono_class(fs3)
    rep = verify_dfs(fs3, E, E, M)
    assert not rep.ok
    v = next(v for v in rep.violations if v.law == "ladder filler")
    e, j, jp, m = (fs3.mor(x) for x in v.witness[:4])
    assert bad_ladder(fs3, e, j, jp, m) is not None


def test_ladder_fast_route_matches_naive(fs2):
    E, J, M = epi_class(fs2), all_class(fs2), mono_class(fs2)
    for (e, j, jp, m, u, v, n) in ladder_fillers_naive(fs2, E, J, M):
        assert len(ladder_fillers(fs2, e, j, jp, m, u, v)) == n


def test_dfs_factorizations_unique_up_to_iso(fs3):
    E, J, M = epi_class(fs3), iso_class(fs3), mono_class(fs3)
    for f in range(fs3.n_mor):
        facs = factorizations_dfs(fs3, f, E, J, M)
        for a in facs:
            assert len(dfs_comparisons(fs3, facs[0], a)) == 1


def test_remark_two_of_three_witness(fs2):
    """(Epi, Mono, Iso) is a dfs whose weak equivalences fail 2-out-of-3."""
    D = _dfs(fs2, epi_class(fs2), mono_class(fs2), iso_class(fs2), "EMI")
    assert verify_dfs(fs2, D.E, D.J, D.M).ok
    bad = two_out_of_three_failures(fs2, D.weq())
    assert bad
    f, g = bad[0]
    W = D.weq()
    assert sum([W.mask[f], W.mask[g], W.mask[fs2.compose(g, f)]]) == 2
    assert not qfs_hypotheses(fs2, D).ok
    with pytest.raises(HypothesisFailed):
        dfs_to_qfs(fs2, D)
    q = dfs_to_qfs(fs2, D, check=False)
    assert not verify_qfs(fs2, q.Cof, q.W, q.Fib).ok


@pytest.mark.parametrize("C,which", [(finset(2), "EIM"), (finset(3), "EIM"), (finset(2), "IAI"),
                                     (chain_category(3), "IAI"), (chain_category(3), "AII")])
def test_dfs_qfs_roundtrip(C, which):
    cls = {"E": epi_class(C), "I": iso_class(C), "M": mono_class(C), "A": all_class(C)}
    D = Dfs(*(cls[c] for c in which), name=which)
    assert verify_dfs(C, D.E, D.J, D.M).ok
    rep = dfs_qfs_roundtrip(C, D)
    assert rep.ok, rep
    q = dfs_to_qfs(C, D)
    back = qfs_to_dfs(C, q)
    assert (back.E, back.J, back.M) == (D.E, D.J, D.M)
    assert dfs_qfs_roundtrip(C, q).ok


def test_preorder_spaces_regular_classes():
    C = preorder_spaces(2)
    D = Dfs(reg_epi_class(C), bim_class(C), reg_mono_class(C), name="top")
    assert verify_dfs(C, D.E, D.J, D.M).ok
    assert two_out_of_three_failures(C, D.weq())


def test_locality_and_diagonal(fs3):
    D = Dfs(epi_class(fs3), mono_class(fs3), iso_class(fs3), name="EMI")
    assert check_locality(fs3, D).ok
    # the only set injective-complete for monos in FinSet<=3 is the point
    assert local_objects(fs3, D.J) == [1]
    r = check_diagonal(fs3, D, 1)
    assert r["applicable"]
    assert r["local_implies_trivial_fibration"] and r["trivial_fibration_implies_separating"]
    # 2 x 2 leaves the bound, so there is no diagonal to test
    assert not check_diagonal(fs3, D, 2)["applicable"]


def test_bousfield_reflexive(fs3):
    D = Dfs(epi_class(fs3), iso_class(fs3), mono_class(fs3))
    assert check_bousfield(fs3, D, D)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.booleans(), min_size=finset(2).n_mor, max_size=finset(2).n_mor))
def test_galois_connection(bits):
    C = finset(2)
    K = MorphismClass(C, np.array(bits), "K")
    R = perp_right(C, K)
    assert K <= perp_left(C, R)
    assert perp_right(C, perp_left(C, R)) == R
    # weak lifting is implied by unique lifting
    assert R <= box_right(C, K)
    assert perp_left(C, K) <= box_left(C, K)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.booleans(), min_size=finset(2).n_mor, max_size=finset(2).n_mor))
def test_perp_classes_contain_isos_and_compose(bits):
    C = finset(2)
    R = perp_right(C, MorphismClass(C, np.array(bits), "K"))
    assert iso_class(C) <= R
    assert class_compose(C, R, R) <= R
