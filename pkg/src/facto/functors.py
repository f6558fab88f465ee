"""Functors, natural transformations and adjunctions between finite categories.

A functor may be partial (entries ``-1``) when it is only materialized on the
part of its source whose images fit the target window.  Checks on partial
functors quantify over the defined part and say so in their notes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .fincat import FinCategory
from .report import ValidationReport


class Functor:
    def __init__(self, source: FinCategory, target: FinCategory, obj_map, mor_map, name: str = "F"):
        self.source = source
        self.target = target
        self.obj_map = np.asarray(obj_map, dtype=np.int64)
        self.mor_map = np.asarray(mor_map, dtype=np.int64)
        self.name = name

    @classmethod
    def from_names(cls, source: FinCategory, target: FinCategory, obj: Mapping[str, str],
                   mor: Mapping[str, str], name: str = "F") -> "Functor":
        """Build from label maps; identities map to identities unless listed."""
        om = np.array([target.obj(obj[o]) for o in source.objects], dtype=np.int64)
        mm = np.full(source.n_mor, -1, dtype=np.int64)
        for x in range(source.n_obj):
            mm[source.ident[x]] = target.ident[om[x]]
        for a, b in mor.items():
            mm[source.mor(a)] = target.mor(b)
        return cls(source, target, om, mm, name=name)

    @property
    def partial(self) -> bool:
        return bool((self.obj_map < 0).any() or (self.mor_map < 0).any())

    def defined_mask(self) -> np.ndarray:
        return self.mor_map >= 0

    def __call__(self, m: int) -> int:
        return int(self.mor_map[m])

    def on_obj(self, x: int) -> int:
        return int(self.obj_map[x])

    def image(self, ids) -> np.ndarray:
        ids = np.asarray(list(ids), dtype=np.int64)
        out = self.mor_map[ids]
        return out[out >= 0]

    def __repr__(self) -> str:
        return f"Functor({self.name}: {self.source.name} -> {self.target.name})"


def identity_functor(C: FinCategory) -> Functor:
    return Functor(C, C, np.arange(C.n_obj), np.arange(C.n_mor), name=f"1_{C.name}")


def compose_functors(G: Functor, F: Functor, name: str | None = None) -> Functor:
    """``G o F``; undefined wherever either is undefined."""
    om = np.where(F.obj_map >= 0, G.obj_map[np.maximum(F.obj_map, 0)], -1)
    mm = np.where(F.mor_map >= 0, G.mor_map[np.maximum(F.mor_map, 0)], -1)
    return Functor(F.source, G.target, om, mm, name=name or f"{G.name}{F.name}")


def validate_functor(F: Functor) -> ValidationReport:
    """Typing, identity preservation and composition preservation."""
    C, D = F.source, F.target
    rep = ValidationReport(subject=f"functor {F.name}")
    if F.partial:
        rep.note(f"{F.name} is partial; laws checked where defined")
    for m in range(C.n_mor):
        fm = F.mor_map[m]
        if fm < 0:
            continue
        x, y = F.obj_map[C.dom[m]], F.obj_map[C.cod[m]]
        if x < 0 or y < 0 or D.dom[fm] != x or D.cod[fm] != y:
            rep.add("functor typing", C.names[m])
    for x in range(C.n_obj):
        if F.obj_map[x] >= 0 and F.mor_map[C.ident[x]] != D.ident[F.obj_map[x]]:
            rep.add("functor identity", C.objects[x])
    if rep.n_violations:
        return rep
    for x, y, z in itertools.product(range(C.n_obj), repeat=3):
        blk = C.block(x, y, z)
        if blk.size == 0 or min(F.obj_map[[x, y, z]]) < 0:
            continue
        fx, fy, fz = (int(F.obj_map[t]) for t in (x, y, z))
        g_ids, f_ids = C.hom(y, z), C.hom(x, y)
        Fg, Ff, Fgf = F.mor_map[g_ids], F.mor_map[f_ids], F.mor_map[blk]
        ok_g, ok_f = Fg >= 0, Ff >= 0
        if not ok_g.any() or not ok_f.any():
            continue
        dblk = D.block(fx, fy, fz)
        want = dblk[np.ix_(D.loc[Fg[ok_g]], D.loc[Ff[ok_f]])]
        got = Fgf[np.ix_(ok_g, ok_f)]
        for i, j in np.argwhere(want != got):
            rep.add("functor composition", C.names[g_ids[ok_g][i]], C.names[f_ids[ok_f][j]])
    return rep


@dataclass
class NatTrans:
    """Natural transformation ``alpha: F => G`` with components in the target."""

    source: Functor
    target: Functor
    components: np.ndarray
    name: str = "alpha"

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=np.int64)

    def __getitem__(self, x: int) -> int:
        return int(self.components[x])


def validate_nat(alpha: NatTrans) -> ValidationReport:
    F, G = alpha.source, alpha.target
    C, D = F.source, F.target
    rep = ValidationReport(subject=f"natural transformation {alpha.name}")
    for x in range(C.n_obj):
        c = alpha.components[x]
        if c < 0:
            continue
        if D.dom[c] != F.obj_map[x] or D.cod[c] != G.obj_map[x]:
            rep.add("component typing", C.objects[x])
    if rep.n_violations:
        return rep
    for f in range(C.n_mor):
        x, y = C.dom[f], C.cod[f]
        ax, ay, Ff, Gf = alpha.components[x], alpha.components[y], F.mor_map[f], G.mor_map[f]
        if min(ax, ay, Ff, Gf) < 0:
            continue
        if D.compose(Gf, ax) != D.compose(ay, Ff):
            rep.add("naturality", C.names[f])
    return rep


@dataclass
class Adjunction:
    """``left -| right`` with unit ``1 => right.left`` and counit ``left.right => 1``."""

    left: Functor
    right: Functor
    unit: np.ndarray
    counit: np.ndarray
    name: str = "adj"
    notes: list = field(default_factory=list)

    def __post_init__(self):
        self.unit = np.asarray(self.unit, dtype=np.int64)
        self.counit = np.asarray(self.counit, dtype=np.int64)


def validate_adjunction(adj: Adjunction) -> ValidationReport:
    """Functor laws, naturality of unit and counit, and both triangle identities."""
    F, G = adj.left, adj.right
    C, D = F.source, F.target
    rep = ValidationReport(subject=f"adjunction {adj.name}")
    rep.merge(validate_functor(F), "left: ")
    rep.merge(validate_functor(G), "right: ")
    GF = compose_functors(G, F)
    FG = compose_functors(F, G)
    rep.merge(validate_nat(NatTrans(_identity_like(C), GF, adj.unit, "unit")), "unit: ")
    rep.merge(validate_nat(NatTrans(FG, _identity_like(D), adj.counit, "counit")), "counit: ")
    if rep.n_violations:
        return rep
    for x in range(C.n_obj):
        fx = F.obj_map[x]
        eta = adj.unit[x]
        if fx < 0 or eta < 0 or adj.counit[fx] < 0 or F.mor_map[eta] < 0:
            continue
        if D.compose(adj.counit[fx], F.mor_map[eta]) != D.ident[fx]:
            rep.add("triangle identity (left)", C.objects[x])
    for y in range(D.n_obj):
        gy = G.obj_map[y]
        eps = adj.counit[y]
        if gy < 0 or eps < 0 or adj.unit[gy] < 0 or G.mor_map[eps] < 0:
            continue
        if C.compose(G.mor_map[eps], adj.unit[gy]) != C.ident[gy]:
            rep.add("triangle identity (right)", D.objects[y])
    return rep


def _identity_like(C: FinCategory) -> Functor:
    return identity_functor(C)


def is_full(F: Functor) -> bool:
    C, D = F.source, F.target
    for x in range(C.n_obj):
        for y in range(C.n_obj):
            img = set(F.mor_map[C.hom(x, y)].tolist())
            if len(img) != len(D.hom(F.obj_map[x], F.obj_map[y])):
                return False
    return True


def is_faithful(F: Functor) -> bool:
    C = F.source
    for x in range(C.n_obj):
        for y in range(C.n_obj):
            img = F.mor_map[C.hom(x, y)]
            if len(np.unique(img)) != len(img):
                return False
    return True


def is_essentially_surjective(F: Functor) -> bool:
    from .fincat import isos_between
    D = F.target
    hit = set(F.obj_map.tolist())
    for d in range(D.n_obj):
        if not any(len(isos_between(D, int(x), d)) for x in hit if x >= 0):
            return False
    return True


def is_equivalence(F: Functor) -> bool:
    return is_full(F) and is_faithful(F) and is_essentially_surjective(F)
