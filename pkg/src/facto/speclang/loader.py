"""Resolve a parsed document into library objects, validating each declaration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..algebra import (Comonad, GroupActionMonad, Group, Monad, cyclic_group, em_category, identity_monad,
                       validate_comonad, validate_monad)
from ..coalgebra import identity_window_comonad, product_comonad, restriction_image_comonad
from ..errors import FactoError, LoadError
from ..fincat import (FinCategory, chain_category, discrete_category, finset, opposite, preorder_spaces,
                      terminal_category, validate_category, walking_arrow)
from ..functors import Adjunction, Functor, NatTrans, validate_adjunction, validate_functor, validate_nat
from ..ortho import (Dfs, MorphismClass, Qfs, all_class, bim_class, box_left, box_right, class_compose,
                     empty_class, epi_class, ex_epi_class, ex_mono_class, iso_class, mono_class, perp_left,
                     perp_right, reg_epi_class, reg_mono_class, str_epi_class, str_mono_class)
from ..topos.adjunctions import constant_limit_instance, find_adjunction, identity_instance
from ..topos.omega import LTTopology, Omega, enumerate_lt
from ..topos.presheaf import Presheaf, constant_presheaf, product, representable, terminal_presheaf
from ..topos.window import PresheafTopos, default_window
from .syntax import Call, Decl, NameSet, SpecDocument, Tup, parse

VALIDATE_LIMIT = 3000      # categories larger than this are trusted to their builder

CLASS_BUILDERS = {"epi": epi_class, "mono": mono_class, "iso": iso_class, "all": all_class, "none": empty_class,
                  "bim": bim_class, "reg_epi": reg_epi_class, "reg_mono": reg_mono_class,
                  "ex_epi": ex_epi_class, "ex_mono": ex_mono_class, "str_epi": str_epi_class,
                  "str_mono": str_mono_class}
CLASS_OPS = {"perp_right": perp_right, "perp_left": perp_left, "box_right": box_right, "box_left": box_left}


@dataclass
class Entity:
    kind: str
    value: Any
    decl: Decl
    topos: PresheafTopos | None = None     # set when the entity lives in a window
    extra: dict = field(default_factory=dict)


@dataclass
class AdjunctionInstance:
    adj: Adjunction
    source: PresheafTopos | None = None
    target: PresheafTopos | None = None


class Environment:
    """Named entities of a loaded document, in declaration order."""

    def __init__(self, doc: SpecDocument, source: str = "<document>"):
        self.doc = doc
        self.source = source
        self.entities: dict[str, Entity] = {}
        self._lt: dict[int, list[LTTopology]] = {}

    # ------------------------------------------------------------ lookup
    def get(self, name: str, kinds: tuple[str, ...] | None = None, line: int | None = None) -> Entity:
        ent = self.entities.get(name)
        if ent is None:
            raise LoadError(f"unresolved reference {name!r}", line)
        if kinds and ent.kind not in kinds:
            raise LoadError(f"{name!r} is a {ent.kind}, expected " + " or ".join(kinds), line)
        return ent

    def category(self, name: str, line: int | None = None) -> FinCategory:
        ent = self.get(name, ("category", "window"), line)
        return ent.value.C if ent.kind == "window" else ent.value

    def topos(self, name: str, line: int | None = None) -> PresheafTopos:
        return self.get(name, ("window",), line).value

    def base_of(self, name: str, line: int | None = None) -> tuple[FinCategory, Omega]:
        """A presheaf base: a category, or the base of a window."""
        ent = self.get(name, ("category", "window"), line)
        if ent.kind == "window":
            return ent.value.B, ent.value.om
        om = ent.extra.get("omega")
        if om is None:
            om = ent.extra["omega"] = Omega(ent.value)
        return ent.value, om

    def topologies(self, name: str) -> list[LTTopology]:
        B, om = self.base_of(name)
        key = id(om)
        if key not in self._lt:
            ks = enumerate_lt(B, om)
            for i, k in enumerate(ks):
                k.name = f"k{i}"
            self._lt[key] = ks
        return self._lt[key]

    def topology(self, name: str, index, line: int | None = None) -> LTTopology:
        ks = self.topologies(name)
        i = _int(index, line)
        if not 0 <= i < len(ks):
            raise LoadError(f"topology index {i} out of range (0..{len(ks) - 1})", line)
        return ks[i]

    def window_name(self, T: PresheafTopos) -> str:
        for n, ent in self.entities.items():
            if ent.kind == "window" and ent.value is T:
                return n
        raise LoadError("window not declared")

    def names(self, kind: str) -> list[str]:
        return [n for n, e in self.entities.items() if e.kind == kind]


def _int(x, line=None) -> int:
    try:
        return int(x)
    except (TypeError, ValueError):
        raise LoadError(f"expected an integer, got {x!r}", line) from None


def _check(rep, what: str, line: int) -> None:
    if rep.n_violations:
        v = rep.violations[0]
        w = ", ".join(str(x) for x in v.witness)
        msg = f"{what} failed validation: {v.law}" + (f" ({w})" if w else "") + (f": {v.detail}" if v.detail else "")
        raise LoadError(msg, line)


# ------------------------------------------------------------ builders
def _category(env: Environment, d: Decl) -> Entity:
    if d.expr is not None:
        e = d.expr
        if isinstance(e, str):
            e = Call(e)
        if not isinstance(e, Call):
            raise LoadError("expected a category constructor", d.line)
        fn, args = e.fn, e.args
        simple = {"finset": finset, "chain": chain_category, "discrete": discrete_category,
                  "preorder_spaces": preorder_spaces}
        if fn in simple:
            if len(args) != 1:
                raise LoadError(f"{fn} takes one integer", d.line)
            C = simple[fn](_int(args[0], d.line))
        elif fn == "walking_arrow":
            C = walking_arrow()
        elif fn == "terminal":
            C = terminal_category()
        elif fn == "opposite":
            C = opposite(env.category(args[0], d.line))
        elif fn == "algebras":
            C = _em(env, args[0], d.line).category
        elif fn == "base":
            C = env.get(args[0], ("monad",), d.line).value.base
        else:
            raise LoadError(f"unknown category constructor {fn!r}", d.line)
        if fn != "base":
            C.name = d.name
        if C.n_mor <= VALIDATE_LIMIT and C.mode != "over":
            _check(validate_category(C), f"category {d.name}", d.line)
        return Entity("category", C, d)
    objects, mors, comp, idents = [], [], {}, {}
    for s in d.body:
        if s[0] == "objects":
            objects.extend(s[1:])
        elif s[0] == "mor":
            mors.append((s[1], s[2], s[3]))
        elif s[0] == "compose":
            comp[(s[1], s[2])] = s[3]
        else:
            idents[s[1]] = s[2]
    seen = set(objects)
    if len(seen) != len(objects):
        raise LoadError(f"category {d.name}: duplicate object", d.line)
    for (m, a, b) in mors:
        for o in (a, b):
            if o not in seen:
                raise LoadError(f"category {d.name}: morphism {m} uses unknown object {o!r}", d.line)
    names = [idents.get(o, f"id_{o}") for o in objects] + [m for m, _, _ in mors]
    if len(set(names)) != len(names):
        raise LoadError(f"category {d.name}: duplicate morphism name", d.line)
    known = set(names)
    for (g, f), h in comp.items():
        for x in (g, f, h):
            if x not in known:
                raise LoadError(f"category {d.name}: compose {g}.{f} names unknown morphism {x!r}", d.line)
    C = FinCategory.from_table(objects, mors, comp, idents, name=d.name)
    rep = validate_category(C)
    if rep.n_violations:
        v = rep.violations[0]
        if v.law == "missing composite":
            raise LoadError(f"category {d.name}: missing composition entry for the pair {v.witness[0]}.{v.witness[1]}",
                            d.line)
        _check(rep, f"category {d.name}", d.line)
    return Entity("category", C, d)


def _functor(env: Environment, d: Decl) -> Entity:
    C = env.category(d.head[0], d.line)
    D = env.category(d.head[1], d.line)
    obj = {s[1]: s[2] for s in d.body if s[0] == "obj"}
    mor = {s[1]: s[2] for s in d.body if s[0] == "mor"}
    missing = [o for o in C.objects if o not in obj]
    if missing:
        raise LoadError(f"functor {d.name}: no image for object {missing[0]!r}", d.line)
    try:
        F = Functor.from_names(C, D, obj, mor, name=d.name)
    except KeyError as exc:
        raise LoadError(f"functor {d.name}: unknown name {exc.args[0]!r}", d.line) from None
    undefined = [C.names[m] for m in np.flatnonzero(F.mor_map < 0)]
    if undefined:
        raise LoadError(f"functor {d.name}: no image for morphism {undefined[0]!r}", d.line)
    _check(validate_functor(F), f"functor {d.name}", d.line)
    return Entity("functor", F, d)


def _components(C: FinCategory, pairs, what: str, line: int) -> np.ndarray:
    comp = np.full(C.n_obj, -1, dtype=np.int64)
    for a, f in pairs:
        try:
            comp[C.obj(a)] = C.mor(f)
        except KeyError as exc:
            raise LoadError(f"{what}: unknown name {exc.args[0]!r}", line) from None
    if (comp < 0).any():
        raise LoadError(f"{what}: no component at {C.objects[int(np.flatnonzero(comp < 0)[0])]!r}", line)
    return comp


def _nattrans(env: Environment, d: Decl) -> Entity:
    F = env.get(d.head[0], ("functor",), d.line).value
    G = env.get(d.head[1], ("functor",), d.line).value
    alpha = NatTrans(F, G, _reindex(F.source, F.target, d), d.name)
    _check(validate_nat(alpha), f"nattrans {d.name}", d.line)
    return Entity("nattrans", alpha, d)


def _reindex(C: FinCategory, D: FinCategory, d: Decl) -> np.ndarray:
    comp = np.full(C.n_obj, -1, dtype=np.int64)
    for s in d.body:
        try:
            comp[C.obj(s[1])] = D.mor(s[2])
        except KeyError as exc:
            raise LoadError(f"nattrans {d.name}: unknown name {exc.args[0]!r}", d.line) from None
    if (comp < 0).any():
        raise LoadError(f"nattrans {d.name}: no component at {C.objects[int(np.flatnonzero(comp < 0)[0])]!r}",
                        d.line)
    return comp


def _adjunction(env: Environment, d: Decl) -> Entity:
    if d.expr is not None:
        e = d.expr
        if not isinstance(e, Call):
            raise LoadError("expected F -| G or an adjunction constructor", d.line)
        if e.fn == "constant_limit":
            n = _int(e.args[0], d.line) if e.args else 3
            base = env.category(e.args[1], d.line) if len(e.args) > 1 else None
            adj, T1, T2 = constant_limit_instance(n, base)
            return Entity("adjunction", AdjunctionInstance(adj, T1, T2), d)
        if e.fn == "identity":
            T = env.topos(e.args[0], d.line)
            return Entity("adjunction", AdjunctionInstance(identity_instance(T), T, T), d)
        raise LoadError(f"unknown adjunction constructor {e.fn!r}", d.line)
    F = env.get(d.head[0], ("functor",), d.line).value
    G = env.get(d.head[1], ("functor",), d.line).value
    if d.body:
        unit = _reindex_pairs(F.source, G.target, [(s[1], s[2]) for s in d.body if s[0] == "unit"], d, "unit")
        counit = _reindex_pairs(F.target, F.target, [(s[1], s[2]) for s in d.body if s[0] == "counit"], d, "counit")
        adj = Adjunction(F, G, unit, counit, name=d.name)
    else:
        adj = find_adjunction(F, G, name=d.name)
        if adj is None:
            raise LoadError(f"adjunction {d.name}: {F.name} is not left adjoint to {G.name}", d.line)
    _check(validate_adjunction(adj), f"adjunction {d.name}", d.line)
    return Entity("adjunction", AdjunctionInstance(adj), d)


def _reindex_pairs(C: FinCategory, D: FinCategory, pairs, d: Decl, what: str) -> np.ndarray:
    comp = np.full(C.n_obj, -1, dtype=np.int64)
    for a, f in pairs:
        try:
            comp[C.obj(a)] = D.mor(f)
        except KeyError as exc:
            raise LoadError(f"adjunction {d.name}: unknown name {exc.args[0]!r} in {what}", d.line) from None
    if (comp < 0).any():
        raise LoadError(f"adjunction {d.name}: no {what} component at {C.objects[int(np.flatnonzero(comp < 0)[0])]!r}",
                        d.line)
    return comp


def _monad(env: Environment, d: Decl) -> Entity:
    if d.expr is not None:
        e = d.expr
        fn, args = (e, ()) if isinstance(e, str) else (e.fn, e.args) if isinstance(e, Call) else (None, ())
        if fn == "action":
            G = env.get(args[0], ("group",), d.line).value
            bound = _int(args[1], d.line) if len(args) > 1 else 4
            return Entity("monad", GroupActionMonad(G, bound, name=d.name), d)
        if fn == "identity":
            C = env.category(d.head[0] if d.head else args[0], d.line)
            return Entity("monad", identity_monad(C), d)
        raise LoadError("expected action(GROUP, BOUND) or identity", d.line)
    C = env.category(d.head[0], d.line)
    T, unit, mult = _monad_body(env, d, C, "T", "unit", "mult")
    M = Monad(T, unit, mult, name=d.name)
    _check(validate_monad(M), f"monad {d.name}", d.line)
    return Entity("monad", M, d)


def _monad_body(env: Environment, d: Decl, C: FinCategory, fw: str, uw: str, mw: str):
    T = unit = mult = None
    for s in d.body:
        if s[0] == fw:
            T = env.get(s[1], ("functor",), d.line).value
        elif s[0] == uw:
            unit = _components(C, s[1:], f"{d.kind} {d.name} {uw}", d.line)
        elif s[0] == mw:
            mult = _components(C, s[1:], f"{d.kind} {d.name} {mw}", d.line)
    if T is None or unit is None or mult is None:
        raise LoadError(f"{d.kind} {d.name}: needs {fw}, {uw} and {mw}", d.line)
    if T.source is not C or T.target is not C:
        raise LoadError(f"{d.kind} {d.name}: {T.name} is not an endofunctor of {C.name}", d.line)
    return T, unit, mult


def _comonad(env: Environment, d: Decl) -> Entity:
    if d.expr is not None:
        e = d.expr
        fn = e if isinstance(e, str) else e.fn if isinstance(e, Call) else None
        if not d.head:
            raise LoadError("comonad constructors need 'on WINDOW'", d.line)
        T = env.topos(d.head[0], d.line)
        if fn == "identity":
            wc = identity_window_comonad(T)
        elif fn == "restriction_image":
            try:
                wc = restriction_image_comonad(T)
            except ValueError as exc:
                raise LoadError(f"comonad {d.name}: {exc}", d.line) from None
        else:
            raise LoadError("expected identity or restriction_image", d.line)
        wc.name = d.name
        return Entity("comonad", wc, d, topos=T)
    C = env.category(d.head[0], d.line)
    G, counit, comult = _monad_body(env, d, C, "G", "counit", "comult")
    Cm = Comonad(G, counit, comult, name=d.name)
    _check(validate_comonad(Cm), f"comonad {d.name}", d.line)
    return Entity("comonad", Cm, d)


def _comonad_product(env: Environment, d: Decl) -> Entity:
    T = env.topos(d.head[0], d.line)
    P = _presheaf_expr(env, d.expr, d.line)
    if P.base is not T.B:
        raise LoadError(f"comonad-product {d.name}: presheaf lives over another base", d.line)
    try:
        wc = product_comonad(T, P, name=d.name)
    except (FactoError, ValueError) as exc:
        raise LoadError(f"comonad-product {d.name}: {exc}", d.line) from None
    return Entity("comonad", wc, d, topos=T)


def _class_expr(env: Environment, C: FinCategory, T: PresheafTopos | None, e, line: int, ctx: str) -> MorphismClass:
    if isinstance(e, NameSet):
        try:
            return MorphismClass.of(C, [C.mor(x) for x in e.items], "{" + " ".join(e.items) + "}")
        except KeyError as exc:
            raise LoadError(f"{ctx}: unknown morphism {exc.args[0]!r}", line) from None
    if isinstance(e, str):
        ent = env.get(e, ("class",), line)
        if ent.value.C is not C:
            raise LoadError(f"{ctx}: class {e} lives in another category", line)
        return ent.value
    if not isinstance(e, Call):
        raise LoadError(f"{ctx}: expected a class expression", line)
    fn, args = e.fn, e.args
    if fn in CLASS_BUILDERS:
        if args:
            D = env.category(args[0], line)
            if D is not C:
                raise LoadError(f"{ctx}: {fn}({args[0]}) is not over {C.name}", line)
        return CLASS_BUILDERS[fn](C).renamed(_label(fn))
    if fn in CLASS_OPS:
        K = _class_expr(env, C, T, args[0], line, ctx)
        return CLASS_OPS[fn](C, K)
    if fn == "compose":
        if len(args) != 2:
            raise LoadError(f"{ctx}: compose takes two classes", line)
        A = _class_expr(env, C, T, args[0], line, ctx)
        B = _class_expr(env, C, T, args[1], line, ctx)
        return class_compose(C, A, B).renamed(f"{A.name}.{B.name}")
    if fn in ("intersect", "union", "minus"):
        A = _class_expr(env, C, T, args[0], line, ctx)
        B = _class_expr(env, C, T, args[1], line, ctx)
        return A & B if fn == "intersect" else A | B if fn == "union" else A - B
    if fn in ("dense", "closed"):
        if T is None:
            raise LoadError(f"{ctx}: {fn}(k) needs a window", line)
        k = env.topology(env.window_name(T), args[0], line)
        return T.dense(k) if fn == "dense" else T.closed(k)
    raise LoadError(f"{ctx}: unknown class constructor {fn!r}", line)


def _label(fn: str) -> str:
    return {"epi": "Epi", "mono": "Mono", "iso": "Iso", "all": "All", "none": "None", "bim": "Bim",
            "reg_epi": "RegEpi", "reg_mono": "RegMono", "ex_epi": "ExEpi", "ex_mono": "ExMono",
            "str_epi": "StrEpi", "str_mono": "StrMono"}[fn]


def _context(env: Environment, d: Decl) -> tuple[FinCategory, PresheafTopos | None]:
    ent = env.get(d.head[0], ("category", "window"), d.line)
    if ent.kind == "window":
        return ent.value.C, ent.value
    return ent.value, None


def _class(env: Environment, d: Decl) -> Entity:
    C, T = _context(env, d)
    K = _class_expr(env, C, T, d.expr, d.line, f"class {d.name}").renamed(d.name)
    return Entity("class", K, d, topos=T)


def _dfs(env: Environment, d: Decl) -> Entity:
    C, T = _context(env, d)
    e = d.expr
    if isinstance(e, Call) and e.fn == "topology":
        if T is None:
            raise LoadError(f"dfs {d.name}: topology(k) needs a window", d.line)
        k = env.topology(d.head[0], e.args[0], d.line)
        dfs = T.dfs_of(k)
        dfs.name = d.name
        return Entity("dfs", dfs, d, topos=T, extra={"k": k})
    if not isinstance(e, Tup) or len(e.items) != 3:
        raise LoadError(f"dfs {d.name}: expected (E, J, M) or topology(k)", d.line)
    E, J, M = (_class_expr(env, C, T, x, d.line, f"dfs {d.name}") for x in e.items)
    return Entity("dfs", Dfs(E, J, M, name=d.name), d, topos=T)


def _qfs(env: Environment, d: Decl) -> Entity:
    C, T = _context(env, d)
    e = d.expr
    if isinstance(e, Call) and e.fn == "from_dfs":
        dfs = env.get(e.args[0], ("dfs",), d.line).value
        if dfs.C is not C:
            raise LoadError(f"qfs {d.name}: dfs {e.args[0]} lives in another category", d.line)
        return Entity("qfs", Qfs(dfs.cof(), dfs.weq(), dfs.fib(), name=d.name), d, topos=T)
    if not isinstance(e, Tup) or len(e.items) != 3:
        raise LoadError(f"qfs {d.name}: expected (Cof, W, Fib) or from_dfs(D)", d.line)
    Cof, W, Fib = (_class_expr(env, C, T, x, d.line, f"qfs {d.name}") for x in e.items)
    return Entity("qfs", Qfs(Cof, W, Fib, name=d.name), d, topos=T)


def _presheaf_expr(env: Environment, e, line: int) -> Presheaf:
    if isinstance(e, str):
        return env.get(e, ("presheaf",), line).value
    if not isinstance(e, Call):
        raise LoadError("expected a presheaf expression", line)
    fn, args = e.fn, e.args
    if fn == "product":
        P = _presheaf_expr(env, args[0], line)
        Q = _presheaf_expr(env, args[1], line)
        return product(P, Q)[0]
    B, om = env.base_of(args[0], line)
    if fn == "representable":
        try:
            return representable(B, B.obj(args[1]))
        except KeyError:
            raise LoadError(f"unknown object {args[1]!r}", line) from None
    if fn == "constant":
        return constant_presheaf(B, _int(args[1], line))
    if fn == "terminal":
        return terminal_presheaf(B)
    if fn == "omega":
        return om.presheaf
    raise LoadError(f"unknown presheaf constructor {fn!r}", line)


def _presheaf(env: Environment, d: Decl) -> Entity:
    if d.expr is not None:
        P = _presheaf_expr(env, d.expr, d.line)
        P = Presheaf(P.base, P.sizes, P.restrict, P.labels, name=d.name)
    else:
        B, _ = env.base_of(d.head[0], d.line)
        at, restrict = {}, {}
        for s in d.body:
            if s[0] == "at":
                if s[1] not in B.objects:
                    raise LoadError(f"presheaf {d.name}: unknown object {s[1]!r}", d.line)
                at[s[1]] = list(s[2:])
            else:
                try:
                    B.mor(s[1])
                except KeyError:
                    raise LoadError(f"presheaf {d.name}: unknown morphism {s[1]!r}", d.line) from None
                restrict[s[1]] = dict(s[2:])
        try:
            P = Presheaf.from_labels(B, at, restrict, name=d.name)
        except KeyError as exc:
            raise LoadError(f"presheaf {d.name}: unknown element {exc.args[0]!r}", d.line) from None
        except ValueError as exc:
            raise LoadError(str(exc), d.line) from None
    _check(P.validate(), f"presheaf {d.name}", d.line)
    return Entity("presheaf", P, d)


def _group(env: Environment, d: Decl) -> Entity:
    if d.expr is not None:
        e = d.expr
        if isinstance(e, Call) and e.fn == "cyclic":
            G = cyclic_group(_int(e.args[0], d.line))
            G.name = d.name
            return Entity("group", G, d)
        raise LoadError("expected cyclic(n)", d.line)
    elements = [x for s in d.body if s[0] == "elements" for x in s[1:]]
    idx = {x: i for i, x in enumerate(elements)}
    n = len(elements)
    table = np.full((n, n), -1, dtype=np.int64)
    for s in d.body:
        if s[0] == "table":
            try:
                table[idx[s[1]], idx[s[2]]] = idx[s[3]]
            except KeyError as exc:
                raise LoadError(f"group {d.name}: unknown element {exc.args[0]!r}", d.line) from None
    # the first element is the identity; its row and column may be omitted
    if n:
        table[0, :] = np.where(table[0, :] < 0, np.arange(n), table[0, :])
        table[:, 0] = np.where(table[:, 0] < 0, np.arange(n), table[:, 0])
    if (table < 0).any():
        a, b = np.argwhere(table < 0)[0]
        raise LoadError(f"group {d.name}: missing table entry {elements[a]}*{elements[b]}", d.line)
    G = Group(elements, table, 0, name=d.name)
    _check(G.validate(), f"group {d.name}", d.line)
    return Entity("group", G, d)


def _window(env: Environment, d: Decl) -> Entity:
    B = env.get(d.head[0], ("category",), d.line).value
    e = d.expr
    if isinstance(e, str) and e == "default":
        e = Call("default")
    if not isinstance(e, Call) or e.fn != "default":
        raise LoadError("expected default(P, ...)", d.line)
    extra = [_presheaf_expr(env, a, d.line) for a in e.args]
    for P in extra:
        if P.base is not B:
            raise LoadError(f"window {d.name}: presheaf over another base", d.line)
    W = default_window(B, extra, name=d.name)
    T = PresheafTopos(B, W)
    return Entity("window", T, d, topos=T)


def _em(env: Environment, name: str, line: int):
    ent = env.get(name, ("monad",), line)
    if "em" not in ent.extra:
        M = ent.value
        ent.extra["em"] = M.em_category() if isinstance(M, GroupActionMonad) else em_category(M)
    return ent.extra["em"]


BUILDERS = {"category": _category, "functor": _functor, "nattrans": _nattrans, "adjunction": _adjunction,
            "monad": _monad, "comonad": _comonad, "class": _class, "dfs": _dfs, "qfs": _qfs,
            "presheaf": _presheaf, "group": _group, "comonad-product": _comonad_product, "window": _window}


def load(doc: SpecDocument | str, source: str = "<document>") -> Environment:
    if isinstance(doc, str):
        doc = parse(doc)
    env = Environment(doc, source)
    for d in doc.decls:
        if d.name in env.entities:
            raise LoadError(f"duplicate name {d.name!r}", d.line)
        try:
            env.entities[d.name] = BUILDERS[d.kind](env, d)
        except LoadError as exc:
            if exc.line is None:
                raise LoadError(exc.msg, d.line) from None
            raise
        except FactoError as exc:
            raise LoadError(f"{d.kind} {d.name}: {exc}", d.line) from None
    return env


def em_of(env: Environment, name: str):
    return _em(env, name, None)
