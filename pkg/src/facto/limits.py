"""Limits and colimits of finite diagrams by exhaustive cone search.

A cone over ``D`` with apex ``X`` is a tuple of legs ``X -> D(j)``, one per
object of the shape, commuting with every shape morphism.  A cone is a
limit when for every object ``Y`` the map ``H(Y, X) -> Cones(Y)`` given by
postcomposition is a bijection.  Among all limit cones the lexicographically
least ``(apex, legs)`` is returned so results are canonical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fincat import FinCategory, opposite
from .functors import Functor


@dataclass(frozen=True)
class Cone:
    apex: int
    legs: tuple[int, ...]


class Diagram:
    """A functor from a small shape category into ``C``."""

    def __init__(self, shape: FinCategory, functor: Functor):
        self.shape = shape
        self.functor = functor
        self.C = functor.target

    @classmethod
    def build(cls, C: FinCategory, objects: list[int], arrows: list[tuple[int, int, int]], name: str = "D"
              ) -> "Diagram":
        """Diagram from object images and ``(i, j, morphism)`` arrows between them.

        The shape is the free category on the given arrows, which must not
        compose (every arrow is a generator and no path has length > 1).
        """
        shape = FinCategory.from_table([f"j{i}" for i in range(len(objects))],
                                       [(f"a{k}", f"j{i}", f"j{j}") for k, (i, j, _) in enumerate(arrows)],
                                       name=f"{name}-shape")
        mm = np.zeros(shape.n_mor, dtype=np.int64)
        for i, o in enumerate(objects):
            mm[i] = C.ident[o]
        for k, (_, _, m) in enumerate(arrows):
            mm[len(objects) + k] = m
        return cls(shape, Functor(shape, C, np.asarray(objects), mm, name=name))

    def op(self) -> "Diagram":
        S, F = self.shape, self.functor
        return Diagram(opposite(S), Functor(opposite(S), opposite(F.target), F.obj_map, F.mor_map, F.name))


def cones(C: FinCategory, D: Diagram, apex: int) -> np.ndarray:
    """All cones with the given apex, shape ``(n, n_shape_objects)``."""
    S, F = D.shape, D.functor
    k = S.n_obj
    cur = np.zeros((1, 0), dtype=np.int64)
    arrows = [a for a in range(S.n_mor) if not S.is_identity(a)]
    for j in range(k):
        cand = C.hom(apex, int(F.obj_map[j]))
        if len(cand) == 0 or len(cur) == 0:
            return np.zeros((0, k), dtype=np.int64)
        cur = np.concatenate([np.repeat(cur, len(cand), axis=0), np.tile(cand, len(cur))[:, None]], axis=1)
        keep = np.ones(len(cur), dtype=bool)
        for a in arrows:
            s, t = int(S.dom[a]), int(S.cod[a])
            if max(s, t) != j:
                continue
            fa = int(F.mor_map[a])
            blk = C.block(apex, int(F.obj_map[s]), int(F.obj_map[t]))
            keep &= blk[C.loc[fa], C.loc[cur[:, s]]] == cur[:, t]
        cur = cur[keep]
    return cur


def _row_keys(rows: np.ndarray, base: int) -> np.ndarray:
    if rows.shape[1] == 0:
        return np.zeros(len(rows), dtype=np.int64)
    keys = np.zeros(len(rows), dtype=object if base ** rows.shape[1] >= 2**62 else np.int64)
    for c in range(rows.shape[1]):
        keys = keys * base + rows[:, c]
    return keys


def all_limits(C: FinCategory, D: Diagram) -> list[Cone]:
    """Every limit cone, in lexicographic order of ``(apex, legs)``."""
    counts = np.array([len(cones(C, D, y)) for y in range(C.n_obj)])
    out = []
    for x in range(C.n_obj):
        if any(len(C.hom(y, x)) != counts[y] for y in range(C.n_obj)):
            continue
        for legs in cones(C, D, x):
            if _universal(C, D, x, legs):
                out.append(Cone(x, tuple(int(v) for v in legs)))
    return out


def _universal(C: FinCategory, D: Diagram, x: int, legs: np.ndarray) -> bool:
    F = D.functor
    for y in range(C.n_obj):
        hs = C.hom(y, x)
        if len(hs) < 2:
            continue
        cols = [C.block(y, x, int(F.obj_map[j]))[C.loc[legs[j]], C.loc[hs]] for j in range(len(legs))]
        if not cols:
            return False  # empty diagram: more than one arrow into the apex
        rows = np.stack(cols, axis=1)
        if len(np.unique(rows, axis=0)) != len(hs):
            return False
    return True


def is_limit_cone(C: FinCategory, D: Diagram, x: int, legs) -> bool:
    """``legs`` form a cone over ``D`` with apex ``x`` through which every cone factors uniquely."""
    legs = np.asarray(legs, dtype=np.int64)
    S, F = D.shape, D.functor
    for a in range(S.n_mor):
        s, t = int(S.dom[a]), int(S.cod[a])
        if C.compose(int(F.mor_map[a]), int(legs[s])) != legs[t]:
            return False
    if any(len(C.hom(y, x)) != len(cones(C, D, y)) for y in range(C.n_obj)):
        return False
    return _universal(C, D, x, legs)


def compute_limit(C: FinCategory, D: Diagram) -> Cone | None:
    """The canonical limit cone, or None when the window has no limit."""
    counts = np.array([len(cones(C, D, y)) for y in range(C.n_obj)])
    for x in range(C.n_obj):
        if any(len(C.hom(y, x)) != counts[y] for y in range(C.n_obj)):
            continue
        for legs in cones(C, D, x):
            if _universal(C, D, x, legs):
                return Cone(x, tuple(int(v) for v in legs))
    return None


def compute_colimit(C: FinCategory, D: Diagram) -> Cone | None:
    """Canonical colimit cocone; legs run ``D(j) -> apex``."""
    return compute_limit(opposite(C), D.op())


def mediating(C: FinCategory, D: Diagram, limit: Cone, cone_apex: int, cone_legs) -> int | None:
    """The unique ``h: cone_apex -> limit.apex`` with ``limit.legs[j] o h = cone_legs[j]``."""
    for h in C.hom(cone_apex, limit.apex):
        if all(C.compose(l, int(h)) == int(c) for l, c in zip(limit.legs, cone_legs)):
            return int(h)
    return None


# ---------------------------------------------------------------- shortcuts
def terminal_object(C: FinCategory) -> int | None:
    for x in range(C.n_obj):
        if all(len(C.hom(y, x)) == 1 for y in range(C.n_obj)):
            return x
    return None


def initial_object(C: FinCategory) -> int | None:
    for x in range(C.n_obj):
        if all(len(C.hom(x, y)) == 1 for y in range(C.n_obj)):
            return x
    return None


def product(C: FinCategory, a: int, b: int) -> Cone | None:
    return compute_limit(C, Diagram.build(C, [a, b], []))


def coproduct(C: FinCategory, a: int, b: int) -> Cone | None:
    return compute_colimit(C, Diagram.build(C, [a, b], []))


def pullback(C: FinCategory, f: int, g: int) -> Cone | None:
    """Limit of ``A --f--> Z <--g-- B``; legs are ``(to A, to B, to Z)``."""
    if C.cod[f] != C.cod[g]:
        raise ValueError("pullback of arrows with different codomains")
    D = Diagram.build(C, [int(C.dom[f]), int(C.dom[g]), int(C.cod[f])], [(0, 2, f), (1, 2, g)])
    return compute_limit(C, D)


def pushout(C: FinCategory, f: int, g: int) -> Cone | None:
    if C.dom[f] != C.dom[g]:
        raise ValueError("pushout of arrows with different domains")
    D = Diagram.build(C, [int(C.cod[f]), int(C.cod[g]), int(C.dom[f])], [(2, 0, f), (2, 1, g)])
    return compute_colimit(C, D)


def equalizer(C: FinCategory, f: int, g: int) -> Cone | None:
    D = Diagram.build(C, [int(C.dom[f]), int(C.cod[f])], [(0, 1, f), (0, 1, g)])
    return compute_limit(C, D)


def coequalizer(C: FinCategory, f: int, g: int) -> Cone | None:
    D = Diagram.build(C, [int(C.dom[f]), int(C.cod[f])], [(0, 1, f), (0, 1, g)])
    return compute_colimit(C, D)
