import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from facto.errors import BoundExceeded
from facto.fincat import (FinCategory, chain_category, epi_mask, finset, inverse, iso_mask, mono_mask,
                          opposite, poset_category, preorder_spaces, same_tables, terminal_category,
                          validate_category, walking_arrow)
from oracles import finset_hom_count, injective, surjective


def test_finset_counts_match_oracle(fs3):
    assert fs3.n_obj == 4
    assert fs3.n_mor == finset_hom_count(3)


@pytest.mark.parametrize("C", [finset(2), finset(3), walking_arrow(), terminal_category(), chain_category(4),
                               preorder_spaces(2)], ids=lambda C: C.name)
def test_builtin_categories_validate(C):
    assert validate_category(C).ok


def test_mono_epi_iso_against_rows(fs3):
    mono, epi, iso = mono_mask(fs3), epi_mask(fs3), iso_mask(fs3)
    for m in range(fs3.n_mor):
        row = fs3.row(m)
        n = int(fs3.sizes[fs3.cod[m]])
        assert mono[m] == injective(row)
        assert epi[m] == surjective(row, n)
        assert iso[m] == (injective(row) and surjective(row, n))


def test_inverse_of_isos(fs3):
    for m in np.flatnonzero(iso_mask(fs3)):
        g = inverse(fs3, int(m))
        assert fs3.compose(g, int(m)) == fs3.ident[fs3.dom[m]]


def test_preorder_spaces_not_balanced():
    C = preorder_spaces(2)
    both = mono_mask(C) & epi_mask(C)
    assert (both & ~iso_mask(C)).any()


def test_opposite_twice_is_same_table():
    C = walking_arrow()
    assert same_tables(opposite(opposite(C)), C)


def test_missing_composite_reported():
    C = FinCategory.from_table(["a", "b", "c"], [("f", "a", "b"), ("g", "b", "c")], {}, name="X")
    rep = validate_category(C)
    assert not rep.ok
    v = rep.violations[0]
    assert v.law == "missing composite"
    assert tuple(v.witness[:2]) == ("g", "f")


def test_bound_exceeded(monkeypatch):
    monkeypatch.setenv("FACTO_MAX_MOR", "10")
    with pytest.raises(BoundExceeded):
        finset(2)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_composition_associative_finset(data):
    C = finset(3)
    f = data.draw(st.integers(0, C.n_mor - 1))
    g = data.draw(st.sampled_from(list(C.homs_from(int(C.cod[f])))))
    h = data.draw(st.sampled_from(list(C.homs_from(int(C.cod[g])))))
    g, h = int(g), int(h)
    assert C.compose(h, C.compose(g, f)) == C.compose(C.compose(h, g), f)
    # concrete composition is function composition of rows
    assert np.array_equal(C.row(C.compose(g, f)), C.row(g)[C.row(f)])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=8))
def test_random_posets_are_categories(pairs):
    els = [str(i) for i in range(5)]
    leq = np.eye(5, dtype=bool)
    for a, b in pairs:
        if a < b:
            leq[a, b] = True
    for k in range(5):
        leq |= leq[:, [k]] & leq[[k], :]
    C = poset_category(els, lambda x, y: bool(leq[int(x), int(y)]))
    assert validate_category(C).ok
    assert C.n_mor == int(leq.sum())
