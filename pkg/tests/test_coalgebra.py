import pytest

from facto.coalgebra import (build_coalgebra_topos, check_cartesian_comonad, compare_with_base, extend_lt,
                             flagship_instance, identity_window_comonad, product_comonad,
                             restriction_image_comonad, slice_category, slice_equivalence, terminal_instance)
from facto.errors import NotCartesian
from facto.fincat import validate_category
from facto.functors import is_equivalence, validate_functor
from facto.ortho import verify_fs
from facto.topos.omega import enumerate_lt
from facto.topos.presheaf import representable


@pytest.fixture(scope="module")
def flagship():
    return flagship_instance()


@pytest.fixture(scope="module")
def point():
    return terminal_instance()


def test_flagship_is_a_topos_of_slices(flagship):
    T, wc, CT = flagship
    assert CT.report.ok, CT.report
    assert check_cartesian_comonad(wc).checks["cartesian"]
    S, F = slice_equivalence(CT)
    assert validate_functor(F).ok
    assert is_equivalence(F)
    # independent route: slice built directly from the window
    S2 = slice_category(T, wc.b_idx)
    assert S2.n_mor == S.n_mor


def test_flagship_epi_mono(flagship):
    T, wc, CT = flagship
    assert verify_fs(CT.C, CT.epi(), CT.mono()).ok


def test_terminal_extension_is_base_topology(point):
    T, wc, CT = point
    for k in enumerate_lt(T.B, T.om):
        ext = extend_lt(CT, k)
        assert ext.report.ok
        assert compare_with_base(CT, ext).ok


def test_identity_comonad_cartesian(arrow_topos):
    wc = identity_window_comonad(arrow_topos)
    assert check_cartesian_comonad(wc).checks["cartesian"]


def test_product_with_representable_cartesian(arrow_topos):
    wc = product_comonad(arrow_topos, representable(arrow_topos.B, 1))
    assert check_cartesian_comonad(wc).checks["cartesian"]


def test_restriction_image_not_cartesian(arrow_topos):
    wc = restriction_image_comonad(arrow_topos)
    rep = check_cartesian_comonad(wc)
    assert not rep.checks["cartesian"]
    assert rep.violations
    with pytest.raises(NotCartesian):
        build_coalgebra_topos(arrow_topos, wc)


def test_terminal_product_coalgebras_match_base(point):
    T, wc, CT = point
    assert CT.C.n_obj == T.C.n_obj
    assert validate_category(CT.C).ok
