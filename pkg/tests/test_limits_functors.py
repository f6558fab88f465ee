import numpy as np

from facto.fincat import chain_category, finset, terminal_category, walking_arrow
from facto.functors import (Adjunction, Functor, compose_functors, identity_functor, is_equivalence,
                            validate_adjunction, validate_functor)
from facto.limits import (coproduct, equalizer, initial_object, product, pullback,
                          terminal_object)


def test_finset_universal_objects(fs3):
    assert fs3.sizes[terminal_object(fs3)] == 1
    assert fs3.sizes[initial_object(fs3)] == 0


def test_finset_products_and_coproducts(fs3):
    for a in range(4):
        for b in range(4):
            p = product(fs3, a, b)
            s = coproduct(fs3, a, b)
            assert (p is not None) == (a * b <= 3)
            assert (s is not None) == (a + b <= 3)
            if p is not None:
                assert fs3.sizes[p.apex] == a * b
            if s is not None:
                assert fs3.sizes[s.apex] == a + b


def test_pullbacks_count_matching_pairs(fs2):
    C = fs2
    for f in range(C.n_mor):
        for g in C.homs_to(int(C.cod[f])):
            g = int(g)
            fr, gr = C.row(f), C.row(g)
            n = sum(1 for x in fr for y in gr if x == y)
            pb = pullback(C, f, g)
            if n <= 2:
                assert pb is not None and C.sizes[pb.apex] == n


def test_equalizer_is_fixed_set(fs2):
    C = fs2
    for f in C.hom(2, 2):
        eq = equalizer(C, int(f), int(C.ident[2]))
        assert C.sizes[eq.apex] == int((C.row(int(f)) == np.arange(2)).sum())


def test_chain_meets_are_minima():
    C = chain_category(4)
    for a in range(4):
        for b in range(4):
            assert product(C, a, b).apex == min(a, b)


def test_functor_composition_and_identity():
    C = walking_arrow()
    I = identity_functor(C)
    assert validate_functor(compose_functors(I, I)).ok
    assert is_equivalence(I)


def test_terminal_adjunction():
    """``! : C -> 1`` has a right adjoint picking the terminal object of FinSet."""
    C = finset(2)
    P = terminal_category()
    t = terminal_object(C)
    L = Functor(C, P, np.zeros(C.n_obj, dtype=np.int64), np.zeros(C.n_mor, dtype=np.int64), name="!")
    R = Functor(P, C, np.array([t]), np.array([C.ident[t]]), name="1")
    unit = np.array([int(C.hom(x, t)[0]) for x in range(C.n_obj)])
    adj = Adjunction(L, R, unit, np.array([0]), name="! -| 1")
    assert validate_adjunction(adj).ok
