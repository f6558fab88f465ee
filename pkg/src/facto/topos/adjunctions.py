"""Functors between presheaf windows and the continuity conditions for an adjunction.

A functor between windows is given by what it does to presheaves and to
presheaf morphisms; images are located back in the target window through
the canonical-form isomorphisms.  The unit and counit of an adjunction
between two window functors are found by universal-arrow search, so the
adjunction itself is checked rather than assumed.

For a Quillen adjunction ``F -| G`` between toposes with cartesian dfs's
generating ``k1`` and ``k2``, four conditions on ``G`` are evaluated
independently: ``G(J2.E2) in J1.E1``; ``G`` preserves closures; ``G``
enlarges closures at most (continuity); and ``k1 tau = tau G(k2)`` with
``tau`` classifying ``G(true)``.  They must share one truth value.  When
``F`` preserves finite limits, ``G`` must carry sheaves (and separated
objects) to sheaves (and separated objects).
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import NotMono
from ..fincat import FinCategory, mono_mask, terminal_category, walking_arrow
from ..functors import Adjunction, Functor, identity_functor, validate_adjunction
from ..ortho import Dfs, class_compose, quillen_report
from ..report import ValidationReport
from .cartesian import dfs_to_lt, is_cartesian_dfs
from .omega import LTTopology, enumerate_lt
from .presheaf import (Presheaf, PresheafMorphism, constant_presheaf, nat_homs, representable,
                       terminal_presheaf)
from .sheaves import sheaf_stats
from .window import PresheafTopos, Window, default_window


def _inverse(iso: PresheafMorphism) -> PresheafMorphism:
    return PresheafMorphism(iso.target, iso.source, [np.argsort(c) for c in iso.components])


def window_functor(src: Window, tgt: Window, obj_fn: Callable[[Presheaf], Presheaf],
                   mor_fn: Callable[[PresheafMorphism], PresheafMorphism], name: str = "F",
                   return_isos: bool = False):
    """Functor ``src.C -> tgt.C``; objects whose image leaves ``tgt`` map to ``-1``.

    With ``return_isos`` also returns, per source object, the iso from the raw
    image presheaf to its window representative.
    """
    C, D = src.C, tgt.C
    obj = np.full(C.n_obj, -1, dtype=np.int64)
    isos: list = [None] * C.n_obj
    for i, P in enumerate(src.presheaves):
        loc = tgt.locate(obj_fn(P))
        if loc is not None:
            obj[i], isos[i] = loc
    mor = np.full(C.n_mor, -1, dtype=np.int64)
    for m in range(C.n_mor):
        x, y = int(C.dom[m]), int(C.cod[m])
        if obj[x] < 0 or obj[y] < 0:
            continue
        Fm = mor_fn(src.morphism(m))
        g = isos[y] @ Fm @ _inverse(isos[x])
        r = tgt.id_of(int(obj[x]), int(obj[y]), g)
        if r is None:
            raise ValueError(f"{name}: image of {C.names[m]} is not natural")
        mor[m] = r
    F = Functor(C, D, obj, mor, name=name)
    return (F, isos) if return_isos else F


def find_adjunction(F: Functor, G: Functor, name: str | None = None) -> Adjunction | None:
    """Unit and counit for ``F -| G`` by universal-arrow search, or None if ``F`` is not left adjoint to ``G``."""
    C, D = F.source, F.target
    unit = np.full(C.n_obj, -1, dtype=np.int64)
    for x in range(C.n_obj):
        fx = int(F.obj_map[x])
        gfx = int(G.obj_map[fx]) if fx >= 0 else -1
        if gfx < 0:
            continue
        for eta in C.hom(x, gfx):
            if all(_transposes_bijectively(F, G, x, int(eta), y) for y in range(D.n_obj) if G.obj_map[y] >= 0):
                unit[x] = int(eta)
                break
        else:
            return None
    counit = np.full(D.n_obj, -1, dtype=np.int64)
    for y in range(D.n_obj):
        gy = int(G.obj_map[y])
        if gy < 0 or unit[gy] < 0:
            continue
        fgy = int(F.obj_map[gy])
        # the counit is the transpose of the identity of G y
        for eps in D.hom(fgy, y):
            if C.compose(int(G.mor_map[eps]), int(unit[gy])) == C.ident[gy]:
                counit[y] = int(eps)
                break
    return Adjunction(F, G, unit, counit, name=name or f"{F.name} -| {G.name}")


def _transposes_bijectively(F: Functor, G: Functor, x: int, eta: int, y: int) -> bool:
    C, D = F.source, F.target
    fx, gy = int(F.obj_map[x]), int(G.obj_map[y])
    hs = D.hom(fx, y)
    target = C.hom(x, gy)
    if len(hs) != len(target):
        return False
    got = {C.compose(int(G.mor_map[g]), eta) for g in hs}
    return len(got) == len(target)


# ------------------------------------------------------- continuity
def continuity_conditions(G: Functor, T2: PresheafTopos, k2: LTTopology, dfs2: Dfs,
                          T1: PresheafTopos, k1: LTTopology, dfs1: Dfs) -> tuple[dict, dict]:
    """The four conditions on ``G: T2 -> T1`` and a witness for each one that fails."""
    C1, C2 = T1.C, T2.C
    witnesses: dict = {}
    je1 = class_compose(C1, dfs1.J, dfs1.E)
    je2 = class_compose(C2, dfs2.J, dfs2.E)
    bad = [int(m) for m in je2 if G.mor_map[m] >= 0 and not je1.mask[G.mor_map[m]]]
    cond_je = not bad
    if bad:
        witnesses["G(J.E) in J.E"] = C2.names[bad[0]]
    preserving = continuous = True
    undefined = 0
    for f in range(C2.n_mor):
        gf = int(G.mor_map[f])
        c2 = T2.closure_id(k2, f)
        if gf < 0 or c2 is None or G.mor_map[c2] < 0:
            undefined += 1
            continue
        lhs = T1.image_masks(int(G.mor_map[c2]))
        y = int(C1.cod[gf])
        rhs = k1.close(T1.window.presheaves[y], T1.image_masks(gf))
        eq = all(np.array_equal(a, b) for a, b in zip(lhs, rhs))
        le = all(not (a & ~b).any() for a, b in zip(lhs, rhs))
        if not eq and preserving:
            preserving = False
            witnesses["G preserves closures"] = C2.names[f]
        if not le and continuous:
            continuous = False
            witnesses["G continuous for closures"] = C2.names[f]
    gtrue = int(G.mor_map[T2.true_id])
    if gtrue < 0 or not mono_mask(C1)[gtrue]:
        raise NotMono(f"G(true) = {C1.names[gtrue] if gtrue >= 0 else 'undefined'}")
    tau = T1.char(gtrue)
    gk2 = int(G.mor_map[T2.topology_id(k2)])
    k1_id = T1.topology_id(k1)
    cond_tau = C1.compose(k1_id, tau) == C1.compose(tau, gk2)
    if not cond_tau:
        witnesses["k1 tau = tau G(k2)"] = C1.names[tau]
    conds = {"G(J.E) in J.E": cond_je, "G preserves closures": preserving,
             "G continuous for closures": continuous, "k1 tau = tau G(k2)": cond_tau}
    if undefined:
        witnesses["_undefined"] = undefined
    return conds, witnesses


def check_continuity(adj: Adjunction, T1: PresheafTopos, dfs1: Dfs, T2: PresheafTopos, dfs2: Dfs) -> ValidationReport:
    """Sheaf transfer along ``G`` and agreement of the four continuity conditions."""
    F, G = adj.left, adj.right
    rep = ValidationReport(subject=f"continuity of {G.name} for {dfs2.name} -> {dfs1.name}")
    rep.note(f"source window {T1.window.describe()}")
    rep.note(f"target window {T2.window.describe()}")
    va = validate_adjunction(adj)
    if not va.ok:
        rep.fail_hypothesis("adjunction valid", va.violations[0])
        return rep
    for lab, T, d in (("first", T1, dfs1), ("second", T2, dfs2)):
        cart = is_cartesian_dfs(T, d)
        if not cart.checks.get("cartesian"):
            rep.fail_hypothesis(f"{lab} dfs cartesian", cart.violations[0] if cart.violations else None)
            return rep
    q = quillen_report(adj, dfs1, dfs2)
    if not q.ok:
        rep.fail_hypothesis("Quillen adjunction", q.violations[0] if q.violations else None)
        return rep
    k1, _ = dfs_to_lt(T1, dfs1, check=False)
    k2, _ = dfs_to_lt(T2, dfs2, check=False)
    conds, wit = continuity_conditions(G, T2, k2, dfs2, T1, k1, dfs1)
    for name, v in conds.items():
        rep.check(name, v)
    if len(set(conds.values())) != 1:
        rep.add("continuity conditions disagree", *[f"{k}={v}" for k, v in conds.items()])
    rep.check("continuity verdict", next(iter(conds.values())))
    for k, v in wit.items():
        if k == "_undefined":
            rep.note(f"closure conditions verified on truncated domain ({v} morphisms leave the window)")
        else:
            rep.note(f"{k} fails at {v}")
    from ..algebra import preserves_finite_limits
    lim = preserves_finite_limits(F)
    rep.check("F preserves finite limits", lim.ok)
    if lim.ok:
        n_sh = n_sep = 0
        for i, P in enumerate(T2.window.presheaves):
            gi = int(G.obj_map[i])
            if gi < 0:
                continue
            sep2, sh2 = sheaf_stats(k2, P)
            sep1, sh1 = sheaf_stats(k1, T1.window.presheaves[gi])
            if sh2:
                n_sh += 1
                if not sh1:
                    rep.add("G maps sheaves to sheaves", T2.C.objects[i])
            if sep2:
                n_sep += 1
                if not sep1:
                    rep.add("G maps separated objects to separated objects", T2.C.objects[i])
        rep.check("sheaves swept", n_sh)
        rep.check("separated objects swept", n_sep)
    else:
        rep.note("F does not preserve finite limits; sheaf transfer not asserted")
    return rep


# ------------------------------------------------------- instances
def sets_topos(n: int) -> PresheafTopos:
    """Presheaves on the terminal category, i.e. sets, with window ``0..n``."""
    B = terminal_category()
    W = Window(B, [constant_presheaf(B, k, name=str(k)) for k in range(n + 1)], name=f"Set<={n}")
    return PresheafTopos(B, W)


def global_sections(P: Presheaf, terminal_base: FinCategory) -> Presheaf:
    """``Gamma P = Nat(1, P)`` as a presheaf on the terminal category."""
    n = len(nat_homs(terminal_presheaf(P.base), P))
    return constant_presheaf(terminal_base, n)


def constant_limit_instance(n: int = 3, base: FinCategory | None = None):
    """``Delta -| Gamma`` between sets (window ``0..n``) and presheaves on ``base`` (walking arrow by default).

    Returns ``(adj, T1, T2)`` with ``T1`` the sets topos and ``T2`` the presheaf topos.
    """
    B2 = base or walking_arrow()
    T1 = sets_topos(n)
    B1 = T1.B
    extra = [representable(B2, c) for c in range(B2.n_obj)] + \
            [constant_presheaf(B2, k, name=f"D{k}") for k in range(n + 1)]
    W2 = default_window(B2, extra, name=f"PSh({B2.name}) with constants <= {n}")
    T2 = PresheafTopos(B2, W2)
    one2 = terminal_presheaf(B2)

    def delta_obj(P: Presheaf) -> Presheaf:
        return constant_presheaf(B2, P.sizes[0])

    def delta_mor(f: PresheafMorphism) -> PresheafMorphism:
        return PresheafMorphism(delta_obj(f.source), delta_obj(f.target), [f.components[0]] * B2.n_obj)

    def gamma_obj(P: Presheaf) -> Presheaf:
        return global_sections(P, B1)

    def gamma_mor(f: PresheafMorphism) -> PresheafMorphism:
        src = nat_homs(one2, f.source)
        tgt = nat_homs(one2, f.target)
        index = {r.tobytes(): i for i, r in enumerate(tgt)}
        comp = []
        for r in src:
            x = PresheafMorphism.from_row(one2, f.source, r)
            comp.append(index[(f @ x).row().tobytes()])
        return PresheafMorphism(gamma_obj(f.source), gamma_obj(f.target), [np.array(comp, dtype=np.int64)])

    F = window_functor(T1.window, T2.window, delta_obj, delta_mor, name="Delta")
    G = window_functor(T2.window, T1.window, gamma_obj, gamma_mor, name="Gamma")
    adj = find_adjunction(F, G)
    if adj is None:
        raise ValueError("Delta is not left adjoint to Gamma on these windows")
    return adj, T1, T2


def identity_instance(T: PresheafTopos) -> Adjunction:
    I = identity_functor(T.C)
    return Adjunction(I, I, T.C.ident.copy(), T.C.ident.copy(), name="1 -| 1")


def continuity_sweep(adj: Adjunction, T1: PresheafTopos, T2: PresheafTopos) -> list[dict]:
    """Run the continuity check for every pair of topology dfs's ``(Epi, DnsMono_k, ClsMono_k)``."""
    out = []
    for i, k1 in enumerate(enumerate_lt(T1.B, T1.om)):
        for j, k2 in enumerate(enumerate_lt(T2.B, T2.om)):
            r = check_continuity(adj, T1, T1.dfs_of(k1), T2, T2.dfs_of(k2))
            out.append({"i": i, "j": j, "k1": k1, "k2": k2, "report": r})
    return out
