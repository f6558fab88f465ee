"""Sheaves for a topology, decided with covering sieves and matching families.

For a topology ``k`` the covering sieves on ``c`` are those sent to the
maximal sieve.  A matching family for a sieve ``S`` on ``c`` picks
``x_g in P(dom g)`` for every ``g in S`` with ``P(h)(x_g) = x_{g o h}``.
``P`` is a sheaf when every matching family for a covering sieve has exactly
one amalgamation, and separated when it has at most one.

Sheafification is the plus construction applied twice.  ``P+(c)`` is the set
of pairs ``(S, family)`` with ``S`` covering, modulo agreement on some
covering sieve contained in both; equivalence classes come from a
disjoint-set structure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from ..errors import BoundExceeded
from ..fincat import FinCategory, max_mor
from ..report import ValidationReport
from .omega import LTTopology, pull_sieve
from .presheaf import Presheaf, PresheafMorphism, image_factor


def matching_families(P: Presheaf, S: frozenset, limit: int | None = None) -> list[dict[int, int]]:
    """All matching families for ``S``, as ``{g: element of P(dom g)}``."""
    B = P.base
    members = sorted(S)
    limit = max_mor() * 10 if limit is None else limit
    fams: list[dict[int, int]] = [{}]
    for g in members:
        d = int(B.dom[g])
        nxt = []
        for fam in fams:
            for x in range(P.sizes[d]):
                nxt.append({**fam, g: x})
        fams = nxt
        if len(fams) > limit:
            raise BoundExceeded(f"matching families on {len(S)} arrows", len(fams), limit)
        # prune with compatibility among assigned arrows
        fams = [f for f in fams if _compatible(P, f, g)]
    return fams


def _compatible(P: Presheaf, fam: dict[int, int], g: int) -> bool:
    B = P.base
    xg = fam[g]
    for h in B.homs_to(int(B.dom[g])):
        gh = B.compose(g, int(h))
        if gh in fam and P.restrict[int(h)][xg] != fam[gh]:
            return False
    for g2, x2 in fam.items():
        # g = g2 o h for some h
        for h in B.hom(int(B.dom[g]), int(B.dom[g2])):
            if B.compose(g2, int(h)) == g and P.restrict[int(h)][x2] != xg:
                return False
    return True


def amalgamations(P: Presheaf, c: int, fam: dict[int, int]) -> list[int]:
    return [x for x in range(P.sizes[c]) if all(P.restrict[g][x] == v for g, v in fam.items())]


def sheaf_stats(k: LTTopology, P: Presheaf) -> tuple[bool, bool]:
    """``(separated, sheaf)`` by the covering-sieve criterion."""
    B = P.base
    sep = sheaf = True
    for c in range(B.n_obj):
        for S in k.covering(c):
            for fam in matching_families(P, S):
                n = len(amalgamations(P, c, fam))
                if n > 1:
                    sep = sheaf = False
                elif n == 0:
                    sheaf = False
                if not sep:
                    return sep, sheaf
    return sep, sheaf


def is_sheaf(k: LTTopology, P: Presheaf) -> bool:
    return sheaf_stats(k, P)[1]


def is_separated(k: LTTopology, P: Presheaf) -> bool:
    return sheaf_stats(k, P)[0]


def _restrict_family(B: FinCategory, fam: dict[int, int], f: int) -> dict[int, int]:
    """Family for ``f* S``: ``x'_h = x_{f o h}``."""
    out = {}
    for h in B.homs_to(int(B.dom[f])):
        fh = B.compose(f, int(h))
        if fh in fam:
            out[int(h)] = fam[fh]
    return out


def plus(k: LTTopology, P: Presheaf) -> tuple[Presheaf, PresheafMorphism]:
    """One plus-construction step with its canonical map ``P -> P+``."""
    B = P.base
    elems: list[list[tuple[frozenset, tuple]]] = []
    classes: list[list[int]] = []
    reps: list[list[tuple[frozenset, dict]]] = []
    for c in range(B.n_obj):
        pairs = []
        for S in k.covering(c):
            for fam in matching_families(P, S):
                pairs.append((S, fam))
        ds = DisjointSet(range(len(pairs)))
        cov = k.covering(c)
        for i, j in itertools.combinations(range(len(pairs)), 2):
            (S, x), (T, y) = pairs[i], pairs[j]
            common = S & T
            for R in cov:
                if R <= common and all(x[g] == y[g] for g in R):
                    ds.merge(i, j)
                    break
        roots = sorted({min(s) for s in ds.subsets()})
        root_of = {}
        for s in ds.subsets():
            r = min(s)
            for i in s:
                root_of[i] = roots.index(r)
        classes.append([root_of[i] for i in range(len(pairs))])
        reps.append([pairs[r] for r in roots])
        elems.append(pairs)
    sizes = [len(r) for r in reps]
    if sum(sizes) > max_mor():
        raise BoundExceeded("plus construction", sum(sizes), max_mor())
    lookup = []
    for c in range(B.n_obj):
        d = {}
        for i, (S, fam) in enumerate(elems[c]):
            d[(S, tuple(sorted(fam.items())))] = classes[c][i]
        lookup.append(d)
    res = []
    for m in range(B.n_mor):
        x, y = int(B.dom[m]), int(B.cod[m])
        arr = np.empty(sizes[y], dtype=np.int64)
        for i, (S, fam) in enumerate(reps[y]):
            S2 = pull_sieve(B, S, m)
            fam2 = _restrict_family(B, fam, m)
            arr[i] = lookup[x][(S2, tuple(sorted(fam2.items())))]
        res.append(arr)
    labels = [tuple(f"[{len(S)}:{','.join(str(v) for _, v in sorted(fam.items()))}]" for S, fam in reps[c])
              for c in range(B.n_obj)]
    Q = Presheaf(B, sizes, res, labels=labels, name=f"{P.short()}+")
    comps = []
    for c in range(B.n_obj):
        top = k.om.sieves[c][-1]
        arr = np.empty(P.sizes[c], dtype=np.int64)
        for x in range(P.sizes[c]):
            fam = {int(g): int(P.restrict[int(g)][x]) for g in top}
            arr[x] = lookup[c][(top, tuple(sorted(fam.items())))]
        comps.append(arr)
    return Q, PresheafMorphism(P, Q, comps)


@dataclass
class Sheafification:
    sheaf: Presheaf
    unit: PresheafMorphism
    separated: Presheaf          # image of the unit
    to_separated: PresheafMorphism  # epi part
    into_sheaf: PresheafMorphism    # mono part


def sheafify(k: LTTopology, P: Presheaf) -> Sheafification:
    """``a(P) = P++`` with the unit factored as epi then mono through its image."""
    Q, u1 = plus(k, P)
    R, u2 = plus(k, Q)
    unit = u2 @ u1
    e, m = image_factor(unit)
    return Sheafification(R, unit, e.target, e, m)


def check_sheafification(k: LTTopology, P: Presheaf) -> ValidationReport:
    """``a(P)`` is a sheaf, the unit is epi then dense mono, and ``a(a(P)) = a(P)``."""
    from .omega import is_dense
    from .presheaf import isomorphism
    rep = ValidationReport(subject=f"sheafification of {P.name or P.short()} for {k.name}")
    s = sheafify(k, P)
    rep.check("sizes", list(s.sheaf.sizes))
    if not rep.check("a(P) is a sheaf", is_sheaf(k, s.sheaf)):
        rep.add("a(P) is a sheaf", s.sheaf.short())
    if not rep.check("unit natural", s.unit.is_natural()):
        rep.add("unit natural")
    if not rep.check("epi part is epi", s.to_separated.is_epi()):
        rep.add("epi part is epi")
    if not rep.check("mono part is mono", s.into_sheaf.is_mono()):
        rep.add("mono part is mono")
    elif not rep.check("mono part is dense", is_dense(k, s.into_sheaf)):
        rep.add("mono part is dense")
    if not rep.check("a(P) separated image", is_separated(k, s.separated)):
        rep.add("image of the unit is separated")
    again = sheafify(k, s.sheaf)
    if not rep.check("a(a(P)) = a(P)", isomorphism(again.sheaf, s.sheaf) is not None and again.unit.is_iso()):
        rep.add("a(a(P)) = a(P)", s.sheaf.short())
    return rep
