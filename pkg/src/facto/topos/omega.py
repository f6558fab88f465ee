"""Sieves, the subobject classifier and Lawvere-Tierney topologies.

A sieve on ``c`` is a set of morphisms into ``c`` closed under
precomposition; ``Omega(c)`` lists them ordered by (size, member ids), so the
empty sieve comes first and the maximal sieve last.  Subobjects of a presheaf
are pointwise masks, which makes comparisons of subobjects plain equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import NotMono
from ..fincat import FinCategory
from ..report import ValidationReport
from .presheaf import (Presheaf, PresheafMorphism, all_submasks, nat_homs, pair, preimage_masks, product,
                       terminal_presheaf)


@dataclass(frozen=True)
class Sieve:
    on: int
    members: frozenset

    def __repr__(self) -> str:
        return f"Sieve({self.on}, {sorted(self.members)})"


def sieves_on(B: FinCategory, c: int) -> list[frozenset]:
    into = [int(m) for m in B.homs_to(c)]
    out = []
    for bits in itertools.product([False, True], repeat=len(into)):
        S = frozenset(m for m, b in zip(into, bits) if b)
        ok = all(B.compose(s, int(t)) in S for s in S for t in B.homs_to(int(B.dom[s])))
        if ok:
            out.append(S)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def pull_sieve(B: FinCategory, S: frozenset, f: int) -> frozenset:
    """``f* S = {g | f o g in S}``."""
    return frozenset(int(g) for g in B.homs_to(int(B.dom[f])) if B.compose(f, int(g)) in S)


class Omega:
    """The subobject classifier of presheaves on ``B`` with its structure maps."""

    def __init__(self, B: FinCategory):
        self.B = B
        self.sieves = [sieves_on(B, c) for c in range(B.n_obj)]
        self.index = [{s: i for i, s in enumerate(ss)} for ss in self.sieves]
        res = []
        for m in range(B.n_mor):
            x, y = int(B.dom[m]), int(B.cod[m])
            res.append(np.array([self.index[x][pull_sieve(B, S, m)] for S in self.sieves[y]], dtype=np.int64))
        labels = [tuple("{" + ",".join(B.names[g] for g in sorted(S)) + "}" for S in ss) for ss in self.sieves]
        self.presheaf = Presheaf(B, [len(s) for s in self.sieves], res, labels=labels, name="Omega")
        self.top = np.array([len(s) - 1 for s in self.sieves], dtype=np.int64)
        self.bottom = np.zeros(B.n_obj, dtype=np.int64)
        self.terminal = terminal_presheaf(B)
        self.true = PresheafMorphism(self.terminal, self.presheaf, [[t] for t in self.top], name="true")
        # intersection tables
        self.meet_table = []
        for c in range(B.n_obj):
            ss = self.sieves[c]
            t = np.array([[self.index[c][a & b] for b in ss] for a in ss], dtype=np.int64)
            self.meet_table.append(t)
        self.omega2, self.p1, self.p2 = product(self.presheaf, self.presheaf)

    @property
    def P(self) -> Presheaf:
        return self.presheaf

    def meet(self) -> PresheafMorphism:
        """Internal meet, computed as the classifying map of ``true x true``."""
        tt = pair(self.true, self.true, self.omega2)
        return char(self, tt)

    def meet_pointwise(self) -> PresheafMorphism:
        comps = [t.reshape(-1) for t in self.meet_table]
        return PresheafMorphism(self.omega2, self.presheaf, comps)


def char_masks(om: Omega, A: Presheaf, masks) -> PresheafMorphism:
    """Classifying map of the sub-presheaf given by ``masks``."""
    B = om.B
    comps = []
    for c in range(B.n_obj):
        into = [int(g) for g in B.homs_to(c)]
        vals = np.empty(A.sizes[c], dtype=np.int64)
        for x in range(A.sizes[c]):
            S = frozenset(g for g in into if masks[int(B.dom[g])][A.restrict[g][x]])
            vals[x] = om.index[c][S]
        comps.append(vals)
    return PresheafMorphism(A, om.presheaf, comps)


def char(om: Omega, m: PresheafMorphism) -> PresheafMorphism:
    if not m.is_mono():
        raise NotMono(repr(m))
    return char_masks(om, m.target, m.image_masks())


def subobject_masks(om: Omega, chi: PresheafMorphism) -> tuple[np.ndarray, ...]:
    """Pullback of ``true`` along ``chi`` as masks."""
    return tuple(comp == om.top[c] for c, comp in enumerate(chi.components))


def subobject_of(om: Omega, chi: PresheafMorphism):
    from .presheaf import subpresheaf
    return subpresheaf(chi.source, subobject_masks(om, chi))


# ---------------------------------------------------------------- topologies
class LTTopology:
    """``k: Omega -> Omega`` given per object as a map on sieve indices."""

    def __init__(self, om: Omega, comps: Sequence, name: str = "k"):
        self.om = om
        self.comps = tuple(np.asarray(c, dtype=np.int64) for c in comps)
        self.name = name

    @property
    def morphism(self) -> PresheafMorphism:
        return PresheafMorphism(self.om.presheaf, self.om.presheaf, self.comps, name=self.name)

    def key(self) -> tuple:
        return tuple(tuple(c.tolist()) for c in self.comps)

    def __eq__(self, other) -> bool:
        return isinstance(other, LTTopology) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def close(self, A: Presheaf, masks) -> tuple[np.ndarray, ...]:
        """``c(S)``: elements whose classifying sieve becomes maximal under ``k``."""
        chi = char_masks(self.om, A, masks)
        return tuple(self.comps[c][chi.components[c]] == self.om.top[c] for c in range(len(masks)))

    def covering(self, c: int) -> list[frozenset]:
        """Sieves ``S`` on ``c`` with ``k(S)`` maximal."""
        return [S for i, S in enumerate(self.om.sieves[c]) if self.comps[c][i] == self.om.top[c]]

    def describe(self) -> str:
        B = self.om.B
        parts = []
        for c in range(B.n_obj):
            labs = self.om.presheaf.labels[c]
            parts.append(f"{B.objects[c]}: " + ", ".join(f"{labs[i]}->{labs[j]}" for i, j in enumerate(self.comps[c])))
        return f"{self.name} [" + "; ".join(parts) + "]"

    def __repr__(self) -> str:
        return f"LTTopology({self.name}, {self.key()})"


def check_lt_laws(k: LTTopology) -> ValidationReport:
    """``k true = true``, ``k k = k`` and ``k meet = meet (k x k)``, plus naturality."""
    om = k.om
    rep = ValidationReport(subject=f"topology {k.name}")
    if not k.morphism.is_natural():
        rep.add("naturality", k.name)
    for c in range(om.B.n_obj):
        if k.comps[c][om.top[c]] != om.top[c]:
            rep.add("k o true = true", om.B.objects[c])
        if not np.array_equal(k.comps[c][k.comps[c]], k.comps[c]):
            rep.add("k o k = k", om.B.objects[c])
        t = om.meet_table[c]
        lhs = k.comps[c][t]
        rhs = t[np.ix_(k.comps[c], k.comps[c])]
        if not np.array_equal(lhs, rhs):
            rep.add("k o meet = meet o (k x k)", om.B.objects[c])
    return rep


def enumerate_lt(B: FinCategory, om: Omega | None = None) -> list[LTTopology]:
    """All topologies on presheaves over ``B``: natural endomaps of Omega obeying the laws."""
    om = om or Omega(B)
    P = om.presheaf
    out = []
    for row in nat_homs(P, P):
        comps = [row[P.offsets[c]:P.offsets[c + 1]] - P.offsets[c] for c in range(B.n_obj)]
        k = LTTopology(om, comps)
        if check_lt_laws(k).ok:
            out.append(k)
    for i, k in enumerate(out):
        k.name = f"k{i}"
    return out


def identity_topology(om: Omega) -> LTTopology:
    return LTTopology(om, [np.arange(n) for n in om.presheaf.sizes], name="id")


def top_topology(om: Omega) -> LTTopology:
    return LTTopology(om, [np.full(n, t) for n, t in zip(om.presheaf.sizes, om.top)], name="top")


# ----------------------------------------------------- Grothendieck oracle
def enumerate_grothendieck(B: FinCategory, om: Omega | None = None) -> list[dict[int, frozenset]]:
    """Covering-sieve assignments with maximality, stability and transitivity.

    Independent of the Omega-endomap enumeration: works with sieves as sets of
    morphisms and never builds a natural transformation.
    """
    om = om or Omega(B)
    per_obj = []
    for c in range(B.n_obj):
        ss = om.sieves[c]
        top = ss[-1]
        others = ss[:-1]
        opts = []
        for bits in itertools.product([False, True], repeat=len(others)):
            opts.append(frozenset([top] + [s for s, b in zip(others, bits) if b]))
        per_obj.append(opts)
    out = []
    for choice in itertools.product(*per_obj):
        J = dict(enumerate(choice))
        if _is_grothendieck(B, om, J):
            out.append(J)
    return out


def _is_grothendieck(B: FinCategory, om: Omega, J: dict[int, frozenset]) -> bool:
    for c, cov in J.items():
        for S in cov:
            for f in B.homs_to(c):
                if pull_sieve(B, S, int(f)) not in J[int(B.dom[f])]:
                    return False
    for c, cov in J.items():
        for S in cov:
            for R in om.sieves[c]:
                if R in cov:
                    continue
                if all(pull_sieve(B, R, f) in J[int(B.dom[f])] for f in S):
                    return False
    return True


def lt_from_grothendieck(om: Omega, J: dict[int, frozenset], name: str = "k") -> LTTopology:
    """``k_c(S) = {f: d -> c | f* S covers d}``."""
    B = om.B
    comps = []
    for c in range(B.n_obj):
        vals = []
        for S in om.sieves[c]:
            T = frozenset(int(f) for f in B.homs_to(c) if pull_sieve(B, S, int(f)) in J[int(B.dom[f])])
            vals.append(om.index[c][T])
        comps.append(vals)
    return LTTopology(om, comps, name=name)


# ----------------------------------------------------------- closure operators
class ClosureOperator:
    """Universal closure operator; acts on masks of any presheaf."""

    def __init__(self, om: Omega, fn, name: str = "c"):
        self.om = om
        self.fn = fn
        self.name = name

    def __call__(self, A: Presheaf, masks) -> tuple[np.ndarray, ...]:
        return tuple(np.asarray(m, dtype=bool) for m in self.fn(A, masks))


def closure_of(k: LTTopology) -> ClosureOperator:
    """``c(m) = (k char m)^* true``."""
    return ClosureOperator(k.om, k.close, name=f"c_{k.name}")


def topology_of_closure(c: ClosureOperator, name: str = "k") -> LTTopology:
    """``k = char(c(true))``: close the top subobject of Omega, then classify it."""
    om = c.om
    true_masks = tuple(np.arange(n) == t for n, t in zip(om.presheaf.sizes, om.top))
    closed = c(om.presheaf, true_masks)
    chi = char_masks(om, om.presheaf, closed)
    return LTTopology(om, chi.components, name=name)


def check_closure_axioms(c: ClosureOperator, presheaves: Sequence[Presheaf],
                         morphisms: Sequence[PresheafMorphism] = ()) -> ValidationReport:
    """Inflationary, idempotent, meet preserving and stable under pullback."""
    rep = ValidationReport(subject=f"closure {c.name}")
    for A in presheaves:
        subs = all_submasks(A)
        closed = {}
        for S in subs:
            cS = c(A, S)
            closed[_mkey(S)] = cS
            if not all((s <= t).all() for s, t in zip(S, cS)):
                rep.add("inflationary", A.short())
            if not all(np.array_equal(a, b) for a, b in zip(c(A, cS), cS)):
                rep.add("idempotent", A.short())
        for S in subs:
            for T in subs:
                meet = tuple(a & b for a, b in zip(S, T))
                lhs = c(A, meet)
                rhs = tuple(a & b for a, b in zip(closed[_mkey(S)], closed[_mkey(T)]))
                if not all(np.array_equal(a, b) for a, b in zip(lhs, rhs)):
                    rep.add("meet preserving", A.short())
    for f in morphisms:
        for S in all_submasks(f.target):
            lhs = c(f.source, preimage_masks(f, S))
            rhs = preimage_masks(f, c(f.target, S))
            if not all(np.array_equal(a, b) for a, b in zip(lhs, rhs)):
                rep.add("stable under pullback", repr(f))
    return rep


def _mkey(masks) -> bytes:
    return b"|".join(np.asarray(m, dtype=bool).tobytes() for m in masks)


def is_dense_masks(k: LTTopology, A: Presheaf, masks) -> bool:
    return all(m.all() for m in k.close(A, masks))


def is_closed_masks(k: LTTopology, A: Presheaf, masks) -> bool:
    return all(np.array_equal(a, np.asarray(b, dtype=bool)) for a, b in zip(k.close(A, masks), masks))


def is_dense(k: LTTopology, m: PresheafMorphism) -> bool:
    if not m.is_mono():
        raise NotMono(repr(m))
    return is_dense_masks(k, m.target, m.image_masks())


def is_closed(k: LTTopology, m: PresheafMorphism) -> bool:
    if not m.is_mono():
        raise NotMono(repr(m))
    return is_closed_masks(k, m.target, m.image_masks())


def dense_closed_factor(k: LTTopology, m: PresheafMorphism) -> tuple[PresheafMorphism, PresheafMorphism]:
    """``m = closed o dense`` through the closure of ``m``."""
    from .presheaf import subpresheaf
    if not m.is_mono():
        raise NotMono(repr(m))
    cl = k.close(m.target, m.image_masks())
    S, inc = subpresheaf(m.target, cl)
    comps = []
    for c, comp in enumerate(m.components):
        index = np.full(m.target.sizes[c], -1, dtype=np.int64)
        index[inc.components[c]] = np.arange(S.sizes[c])
        comps.append(index[comp])
    return PresheafMorphism(m.source, S, comps), inc


def compare_closure_masks(k1: LTTopology, k2: LTTopology, presheaves: Sequence[Presheaf]) -> bool:
    """``c1(S) <= c2(S)`` for every subobject of every listed presheaf."""
    for A in presheaves:
        for S in all_submasks(A):
            if not all((a <= b).all() for a, b in zip(k1.close(A, S), k2.close(A, S))):
                return False
    return True


def lt_leq(k1: LTTopology, k2: LTTopology) -> bool:
    """Pointwise order: ``k1(S) <= k2(S)`` as sieves."""
    om = k1.om
    for c in range(om.B.n_obj):
        for a, b in zip(k1.comps[c], k2.comps[c]):
            if not om.sieves[c][a] <= om.sieves[c][b]:
                return False
    return True
