"""Finite windows of a presheaf topos.

A window is the full subcategory on finitely many presheaves (one per iso
class).  Claims about the topos are checked inside the window, and every
report names the window it ran on.  Pullbacks, closures and classifying maps
are computed concretely on presheaves and then located back in the window;
results that fall outside are counted as truncations.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..fincat import FinCategory, epi_mask, iso_mask, mono_mask
from ..ortho import Dfs, MorphismClass, factorize_dfs
from .omega import LTTopology, Omega, char_masks
from .presheaf import (Presheaf, PresheafMorphism, isomorphism, nat_homs, pullback, representable,
                       subobject_closure, subpresheaf, terminal_presheaf)


class Window:
    def __init__(self, base: FinCategory, presheaves: Sequence[Presheaf], name: str = "W"):
        self.base = base
        reps: list[Presheaf] = []
        self._by_key: dict = {}
        for P in presheaves:
            k = P.canonical[0]
            if k in self._by_key:
                continue
            self._by_key[k] = len(reps)
            reps.append(P)
        self.presheaves = reps
        self._invariants = {P.invariant for P in reps}
        labels = []
        counts: dict = {}
        for P in reps:
            lab = P.name or P.short()
            counts[lab] = counts.get(lab, 0) + 1
            labels.append(lab if counts[lab] == 1 else f"{lab}#{counts[lab] - 1}")
        homs = {(i, j): nat_homs(P, Q) for i, P in enumerate(reps) for j, Q in enumerate(reps)}
        self.C = FinCategory.concrete(labels, [P.total for P in reps], homs, name=name, obj_data=reps)
        self.name = name
        self._locate_cache: dict = {}

    def __repr__(self) -> str:
        return f"Window({self.name}: {self.C.n_obj} objects, {self.C.n_mor} morphisms)"

    def describe(self) -> str:
        return f"{self.name}: objects [{', '.join(self.C.objects)}], {self.C.n_mor} morphisms"

    def with_representatives(self, preferred: Sequence[Presheaf]) -> "Window":
        """Same window, but using the given presheaves as class representatives."""
        reps = list(self.presheaves)
        changed = False
        for P in preferred:
            i = self.index(P)
            if i is not None and reps[i].key() != P.key():
                reps[i] = P
                changed = True
        return Window(self.base, reps, self.name) if changed else self

    def index(self, P: Presheaf) -> int | None:
        if P.invariant not in self._invariants:
            return None
        return self._by_key.get(P.canonical[0])

    def locate(self, P: Presheaf) -> tuple[int, PresheafMorphism] | None:
        """Window object isomorphic to ``P`` and an iso ``P -> object``."""
        i = self.index(P)
        if i is None:
            return None
        iso = isomorphism(P, self.presheaves[i])
        return i, iso

    def morphism(self, m: int) -> PresheafMorphism:
        C = self.C
        return PresheafMorphism.from_row(self.presheaves[C.dom[m]], self.presheaves[C.cod[m]], C.row(m))

    def find(self, f: PresheafMorphism) -> int | None:
        """Window id of a morphism between window presheaves (matched by identity of objects)."""
        i, j = self.index(f.source), self.index(f.target)
        if i is None or j is None:
            return None
        a = isomorphism(self.presheaves[i], f.source)
        b = isomorphism(f.target, self.presheaves[j])
        g = b @ f @ a
        return self.C.find_row(i, j, g.row())

    def id_of(self, i: int, j: int, f: PresheafMorphism) -> int | None:
        """Window id of ``f`` whose source and target are exactly objects ``i`` and ``j``."""
        return self.C.find_row(i, j, f.row())


def default_window(B: FinCategory, extra: Sequence[Presheaf] = (), name: str | None = None) -> Window:
    """Subobject closure of Omega, 1, the representables and ``extra``."""
    om = Omega(B)
    seeds = [om.presheaf, terminal_presheaf(B)] + [representable(B, c) for c in range(B.n_obj)] + list(extra)
    return Window(B, subobject_closure(seeds), name=name or f"PSh({B.name})")


class PresheafTopos:
    """A presheaf topos seen through a window that contains Omega and 1."""

    def __init__(self, base: FinCategory, window: Window | None = None):
        self.B = base
        self.om = Omega(base)
        window = window or default_window(base)
        self.window = window.with_representatives([self.om.presheaf, terminal_presheaf(base)])
        self.C = self.window.C
        loc = self.window.locate(self.om.presheaf)
        if loc is None:
            raise ValueError("window must contain Omega")
        self.omega_idx = loc[0]
        if self.window.presheaves[self.omega_idx] != self.om.presheaf:
            # keep the window's copy as Omega to avoid relabeling everywhere
            raise ValueError("window must contain Omega in canonical labelling")
        self.one_idx = self.window.index(terminal_presheaf(base))
        if self.one_idx is None:
            raise ValueError("window must contain the terminal presheaf")
        self.true_id = self.window.id_of(self.one_idx, self.omega_idx,
                                         PresheafMorphism(self.window.presheaves[self.one_idx], self.om.presheaf,
                                                          [[t] for t in self.om.top]))
        self._pb_cache: dict = {}
        self.truncations = 0
        self._masks: dict[int, tuple] = {}

    def __repr__(self) -> str:
        return f"PresheafTopos({self.B.name}, {self.window})"

    # ------------------------------------------------------ classes
    def epi(self) -> MorphismClass:
        return MorphismClass(self.C, epi_mask(self.C), "Epi")

    def mono(self) -> MorphismClass:
        return MorphismClass(self.C, mono_mask(self.C), "Mono")

    def iso(self) -> MorphismClass:
        return MorphismClass(self.C, iso_mask(self.C), "Iso")

    def image_masks(self, m: int) -> tuple:
        r = self._masks.get(m)
        if r is None:
            r = self.window.morphism(m).image_masks()
            self._masks[m] = r
        return r

    def dense(self, k: LTTopology) -> MorphismClass:
        mono = mono_mask(self.C)
        out = np.zeros(self.C.n_mor, dtype=bool)
        for m in np.flatnonzero(mono):
            P = self.window.presheaves[self.C.cod[m]]
            out[m] = all(x.all() for x in k.close(P, self.image_masks(int(m))))
        return MorphismClass(self.C, out, f"DnsMono_{k.name}")

    def closed(self, k: LTTopology) -> MorphismClass:
        mono = mono_mask(self.C)
        out = np.zeros(self.C.n_mor, dtype=bool)
        for m in np.flatnonzero(mono):
            P = self.window.presheaves[self.C.cod[m]]
            S = self.image_masks(int(m))
            out[m] = all(np.array_equal(a, b) for a, b in zip(k.close(P, S), S))
        return MorphismClass(self.C, out, f"ClsMono_{k.name}")

    def dfs_of(self, k: LTTopology) -> Dfs:
        return Dfs(self.epi(), self.dense(k), self.closed(k), name=f"(Epi, DnsMono_{k.name}, ClsMono_{k.name})")

    # ------------------------------------------------------ Omega side
    def char(self, m: int) -> int:
        """Window id of the classifying map of the window mono ``m``."""
        P = self.window.presheaves[self.C.cod[m]]
        chi = char_masks(self.om, P, self.image_masks(m))
        return self.window.id_of(int(self.C.cod[m]), self.omega_idx, chi)

    def topology_id(self, k: LTTopology) -> int:
        return self.window.id_of(self.omega_idx, self.omega_idx, k.morphism)

    # ------------------------------------------------------ pullbacks
    def pullback(self, f: int, g: int) -> tuple[int, int, int] | None:
        """Pullback of ``f: A -> C`` and ``g: B -> C``: ``(P, to A, to B)`` as window ids."""
        key = (f, g)
        if key in self._pb_cache:
            return self._pb_cache[key]
        F, G = self.window.morphism(f), self.window.morphism(g)
        P, p1, p2 = pullback(F, G)
        loc = self.window.locate(P)
        if loc is None:
            self._pb_cache[key] = None
            return None
        i, iso = loc
        inv = PresheafMorphism(iso.target, iso.source, [np.argsort(c) for c in iso.components])
        a = self.window.id_of(i, int(self.C.dom[f]), p1 @ inv)
        b = self.window.id_of(i, int(self.C.dom[g]), p2 @ inv)
        out = (i, a, b)
        self._pb_cache[key] = out
        return out

    def pullback_along(self, e: int, g: int) -> int | None:
        """The pullback of ``e`` along ``g`` (an arrow into ``dom g``)."""
        r = self.pullback(e, g)
        return None if r is None else r[2]

    def subobject_id(self, i: int, masks) -> int | None:
        """Window id of the inclusion of the sub-presheaf of object ``i`` cut out by ``masks``."""
        S, inc = subpresheaf(self.window.presheaves[i], masks)
        loc = self.window.locate(S)
        if loc is None:
            return None
        j, iso = loc
        inv = PresheafMorphism(iso.target, iso.source, [np.argsort(c) for c in iso.components])
        return self.window.id_of(j, i, inc @ inv)

    def closure_id(self, k: LTTopology, m: int) -> int | None:
        """Window id of the ``k``-closure of the image of ``m``."""
        y = int(self.C.cod[m])
        return self.subobject_id(y, k.close(self.window.presheaves[y], self.image_masks(m)))

    def factor_true(self, dfs: Dfs) -> tuple[int, int, int]:
        return factorize_dfs(self.C, self.true_id, dfs.E, dfs.J, dfs.M)


def window_report_note(topos: PresheafTopos) -> str:
    return f"window {topos.window.describe()}"
