"""Command implementations: each turns a loaded document and arguments into a ``Report``."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from ..algebra import (check_left_induced, check_lifted_adjunction, check_right_induced,
                       coem_category, lift_factorization, support_inclusion_instance)
from ..coalgebra import (WindowComonad, build_coalgebra_topos, check_cartesian_comonad, check_induced_topology,
                         compare_with_base, extend_lt)
from ..errors import (HypothesisFailed, LoadError, NoFactorization, NotCartesian)
from ..fincat import FinCategory
from ..functors import validate_adjunction
from ..ortho import (Dfs, MorphismClass, bad_ladder, box_left, box_right, check_bousfield, check_diagonal,
                     check_locality, dfs_qfs_roundtrip, factorizations_dfs, factorizations_fs, fs_comparisons,
                     local_objects, perp_left, perp_right, quillen_report, separating_objects,
                     verify_dfs, verify_qfs, verify_wfs)
from ..report import ValidationReport
from ..topos.adjunctions import continuity_sweep
from ..topos.cartesian import compare_lt, dfs_to_lt, is_cartesian_dfs
from ..topos.omega import (check_closure_axioms, check_lt_laws, closure_of, compare_closure_masks,
                           enumerate_grothendieck, topology_of_closure)
from ..topos.sheaves import check_sheafification, sheaf_stats
from ..topos.window import PresheafTopos
from .loader import AdjunctionInstance, Entity, Environment, em_of, load
from .report import Report
from .syntax import parse

MODES = {
    "factorize": ("fs", "dfs"),
    "verify": ("wfs", "fs", "dfs", "qfs", "roundtrip"),
    "em": ("build", "prop1", "prop2", "lemma2", "cor2"),
    "lt": ("enumerate", "compare", "from-dfs", "closure"),
    "sheaf": ("check", "sheafify"),
    "coalg": ("build", "extend", "prop4"),
}
DOC_COMMANDS = ("validate", "factorize", "verify", "perp", "local", "lemma1", "lemma3", "quillen", "bousfield",
                "em", "lt", "sheaf", "cartesian", "thm7", "coalg")


class UsageError(Exception):
    pass


# ------------------------------------------------------------ documents
_ENV_CACHE: dict[str, Environment] = {}


def read_document(ref: str) -> str:
    if ref.startswith("corpus:"):
        from .corpus import DOCUMENTS
        name = ref.split(":", 1)[1]
        if name not in DOCUMENTS:
            raise UsageError(f"no corpus document {name!r}")
        return DOCUMENTS[name]
    try:
        return Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {ref}: {exc.strerror}") from None


def load_document(ref: str, cache: bool = True) -> Environment:
    if cache and ref in _ENV_CACHE:
        return _ENV_CACHE[ref]
    env = load(parse(read_document(ref)), source=ref)
    if cache:
        _ENV_CACHE[ref] = env
    return env


# ------------------------------------------------------------ helpers
@dataclass
class Ctx:
    env: Environment
    report: Report
    names: list[str]
    ns: argparse.Namespace


def _arity(ctx: Ctx, lo: int, hi: int | None = None, usage: str = "") -> list[str]:
    n = len(ctx.names)
    hi = lo if hi is None else hi
    if not lo <= n <= hi:
        raise UsageError(f"{ctx.report.command[0]}: expected {usage}")
    return ctx.names


def _class(env: Environment, name: str) -> MorphismClass:
    return env.get(name, ("class",)).value


def _dfs(env: Environment, name: str) -> Entity:
    return env.get(name, ("dfs",))


def _mor(C: FinCategory, name: str) -> int:
    try:
        return C.mor(name)
    except KeyError:
        raise LoadError(f"unknown morphism {name!r} in {C.name}") from None


def _describe_category(C: FinCategory) -> str:
    return f"{C.name}: {C.n_obj} objects, {C.n_mor} morphisms"


def _window_of(ent: Entity, C: FinCategory | None = None) -> str:
    if ent.topos is not None:
        return ent.topos.window.describe()
    return _describe_category(C) if C is not None else ""


def _attach_ids(report: Report, C: FinCategory, start: int = 0) -> None:
    idx = C.mor_index_map()
    for w in report.witnesses[start:]:
        if "ids" not in w:
            ids = [idx.get(n) for n in w.get("names", [])]
            if ids and all(i is not None for i in ids):
                w["ids"] = [int(i) for i in ids]


def _square_witnesses(report: Report, start: int, ref: dict) -> None:
    for w in report.witnesses[start:]:
        if w["law"].endswith("class lifting") and len(w.get("names", [])) == 4 and "ids" in w:
            w["kind"] = "square"
            w["replay"] = dict(ref)


def _ladder_witnesses(report: Report, C: FinCategory, dfs: Dfs, start: int, ref: dict) -> None:
    for w in report.witnesses[start:]:
        if w["law"] != "ladder filler" or "ids" not in w:
            continue
        e, j, jp, m = w["ids"][:4]
        bad = bad_ladder(C, e, j, jp, m)
        w["kind"] = "ladder"
        w["replay"] = dict(ref)
        if bad is None:
            continue
        u, v, st = bad
        w["ids"] = [e, j, jp, m, u, v]
        w["names"] = [C.names[x] for x in w["ids"]]
        w["fillers"] = [[C.names[s], C.names[t]] for s, t in st]
        w["filler_status"] = "missing" if not st else "extra"


def _pair_witnesses(report: Report, start: int, ref: dict) -> None:
    for w in report.witnesses[start:]:
        if w["law"].endswith("2-out-of-3") and len(w.get("ids", [])) == 2:
            w["kind"] = "pair"
            w["replay"] = dict(ref)


def _absorb(ctx: Ctx, rep: ValidationReport, C: FinCategory | None = None, prefix: str = "") -> int:
    start = len(ctx.report.witnesses)
    ctx.report.absorb(rep, prefix)
    if C is not None:
        _attach_ids(ctx.report, C, start)
    return start


def _fail(ctx: Ctx, law: str, *names, detail: str = "") -> None:
    ctx.report.witnesses.append({"law": law, "names": [str(n) for n in names], "detail": detail})
    ctx.report.n_violations += 1


# ------------------------------------------------------------ commands
def cmd_validate(ctx: Ctx) -> None:
    _arity(ctx, 0, 0, "no arguments")
    decls = []
    for name, ent in ctx.env.entities.items():
        item = {"kind": ent.kind, "name": name}
        v = ent.value
        if isinstance(v, FinCategory):
            item["size"] = [v.n_obj, v.n_mor]
        elif isinstance(v, PresheafTopos):
            item["size"] = [v.C.n_obj, v.C.n_mor]
        elif isinstance(v, MorphismClass):
            item["size"] = len(v)
        decls.append(item)
    ctx.report.result = {"declarations": decls}
    ctx.report.checks["declarations"] = len(decls)


def cmd_factorize(ctx: Ctx) -> None:
    env, mode = ctx.env, ctx.ns.mode
    if mode == "fs":
        Ln, Rn, fn = _arity(ctx, 3, 3, "L R MORPHISM")
        L, R = _class(env, Ln), _class(env, Rn)
        C = L.C
        f = _mor(C, fn)
        facs = factorizations_fs(C, f, L, R)
        ctx.report.window = _window_of(env.get(Ln), C)
        if not facs:
            _fail(ctx, "factorization", C.names[f], detail="no (L, R) factorization")
            return
        e, m = facs[0]
        comps = [len(fs_comparisons(C, facs[0], other)) for other in facs]
        ctx.report.result = {"left": C.names[e], "right": C.names[m], "middle": C.objects[C.cod[e]],
                             "factorizations": len(facs), "comparison_isos": comps}
        if any(c != 1 for c in comps):
            _fail(ctx, "unique comparison iso", C.names[f], detail=f"comparison counts {comps}")
    else:
        Dn, fn = _arity(ctx, 2, 2, "DFS MORPHISM")
        ent = _dfs(env, Dn)
        d = ent.value
        C = d.C
        f = _mor(C, fn)
        facs = factorizations_dfs(C, f, d.E, d.J, d.M)
        ctx.report.window = _window_of(ent, C)
        if not facs:
            _fail(ctx, "factorization", C.names[f], detail="no (E, J, M) factorization")
            return
        e, j, m = facs[0]
        ctx.report.result = {"e": C.names[e], "j": C.names[j], "m": C.names[m], "factorizations": len(facs)}


def cmd_verify(ctx: Ctx) -> None:
    env, mode = ctx.env, ctx.ns.mode
    if mode in ("wfs", "fs"):
        Ln, Rn = _arity(ctx, 2, 2, "L R")
        L, R = _class(env, Ln), _class(env, Rn)
        if L.C is not R.C:
            raise LoadError(f"{Ln} and {Rn} live in different categories")
        ctx.report.window = _window_of(env.get(Ln), L.C)
        start = _absorb(ctx, verify_wfs(L.C, L, R, unique=(mode == "fs")), L.C)
        _square_witnesses(ctx.report, start, {"left": Ln, "right": Rn, "unique": mode == "fs"})
    elif mode == "dfs":
        (Dn,) = _arity(ctx, 1, 1, "DFS")
        ent = _dfs(env, Dn)
        d = ent.value
        ctx.report.window = _window_of(ent, d.C)
        kw = {"mode": "sample", "sample_every": ctx.ns.sample} if ctx.ns.sample else {}
        start = _absorb(ctx, verify_dfs(d.C, d.E, d.J, d.M, **kw), d.C)
        _ladder_witnesses(ctx.report, d.C, d, start, {"dfs": Dn})
    elif mode == "roundtrip":
        (Xn,) = _arity(ctx, 1, 1, "DFS or QFS")
        ent = env.get(Xn, ("dfs", "qfs"))
        C = ent.value.C
        ctx.report.window = _window_of(ent, C)
        start = _absorb(ctx, dfs_qfs_roundtrip(C, ent.value), C)
        _pair_witnesses(ctx.report, start, {ent.kind: Xn})
    else:
        (Qn,) = _arity(ctx, 1, 1, "QFS")
        ent = env.get(Qn, ("qfs",))
        q = ent.value
        ctx.report.window = _window_of(ent, q.C)
        start = _absorb(ctx, verify_qfs(q.C, q.Cof, q.W, q.Fib), q.C)
        _pair_witnesses(ctx.report, start, {"qfs": Qn})
        _square_witnesses(ctx.report, start, {"qfs": Qn})


def cmd_perp(ctx: Ctx) -> None:
    (Kn,) = _arity(ctx, 1, 1, "CLASS")
    K = _class(ctx.env, Kn)
    C = K.C
    ops = {(False, True): perp_right, (True, True): perp_left, (False, False): box_right, (True, False): box_left}
    P = ops[(ctx.ns.left, not ctx.ns.weak)](C, K)
    ctx.report.window = _window_of(ctx.env.get(Kn), C)
    ctx.report.result = {"class": P.name, "size": len(P), "members": [C.names[m] for m in P]}


def cmd_local(ctx: Ctx) -> None:
    (Kn,) = _arity(ctx, 1, 1, "CLASS")
    K = _class(ctx.env, Kn)
    C = K.C
    ctx.report.window = _window_of(ctx.env.get(Kn), C)
    ctx.report.result = {"local": [C.objects[x] for x in local_objects(C, K)],
                         "separating": [C.objects[x] for x in separating_objects(C, K)]}


def cmd_lemma1(ctx: Ctx) -> None:
    (Dn,) = _arity(ctx, 1, 1, "DFS")
    ent = _dfs(ctx.env, Dn)
    d = ent.value
    ctx.report.window = _window_of(ent, d.C)
    _absorb(ctx, check_locality(d.C, d), d.C)


def cmd_lemma3(ctx: Ctx) -> None:
    Dn, On = _arity(ctx, 2, 2, "DFS OBJECT")
    ent = _dfs(ctx.env, Dn)
    d = ent.value
    C = d.C
    try:
        a = C.obj(On)
    except KeyError:
        raise LoadError(f"unknown object {On!r} in {C.name}") from None
    ctx.report.window = _window_of(ent, C)
    res = check_diagonal(C, d, a)
    ctx.report.result = res
    if not res["applicable"]:
        ctx.report.verdict = "not-applicable"
        ctx.report.notes.append(f"the product {On} x {On} is not in {C.name}")
        return
    ctx.report.checks.update(res)
    for law in ("local_implies_trivial_fibration", "trivial_fibration_implies_separating"):
        if not res[law]:
            _fail(ctx, law.replace("_", " "), On)


def cmd_quillen(ctx: Ctx) -> None:
    An, D1, D2 = _arity(ctx, 3, 3, "ADJUNCTION DFS_SOURCE DFS_TARGET")
    inst = ctx.env.get(An, ("adjunction",)).value
    d1, d2 = _dfs(ctx.env, D1).value, _dfs(ctx.env, D2).value
    ctx.report.window = _describe_category(inst.adj.left.source) + "; " + _describe_category(inst.adj.left.target)
    _absorb(ctx, quillen_report(inst.adj, d1, d2))


def cmd_bousfield(ctx: Ctx) -> None:
    D1, D2 = _arity(ctx, 2, 2, "DFS1 DFS2")
    e1, e2 = _dfs(ctx.env, D1), _dfs(ctx.env, D2)
    if e1.value.C is not e2.value.C:
        raise LoadError(f"{D1} and {D2} live in different categories")
    ok = check_bousfield(e1.value.C, e1.value, e2.value)
    ctx.report.window = _window_of(e1, e1.value.C)
    ctx.report.checks["Bousfield localization"] = ok
    if not ok:
        _fail(ctx, "Bousfield localization", D1, D2)


def cmd_em(ctx: Ctx) -> None:
    env, mode = ctx.env, ctx.ns.mode
    if mode == "cor2":
        (Gn,) = _arity(ctx, 1, 1, "GROUP")
        G = env.get(Gn, ("group",)).value
        em_t, em_h, adj, Q, dc, dd = support_inclusion_instance(G, ctx.ns.bound)
        ctx.report.window = f"{_describe_category(em_t.category)}; {_describe_category(em_h.category)}"
        _absorb(ctx, check_lifted_adjunction(em_t, em_h, adj, Q, dc, dd))
        return
    if mode == "prop2":
        Cn, Dn = _arity(ctx, 2, 2, "COMONAD DFS")
        cem = coem_category(env.get(Cn, ("comonad",)).value)
        d = _dfs(env, Dn).value
        ctx.report.window = _describe_category(cem.category)
        _absorb(ctx, check_left_induced(cem, d), cem.category)
        return
    Tn = ctx.names[0] if ctx.names else None
    if Tn is None:
        raise UsageError("em: expected a monad name")
    em = em_of(env, Tn)
    EM = em.category
    ctx.report.window = _describe_category(EM)
    if mode == "build":
        _arity(ctx, 1, 1, "MONAD")
        carriers = {}
        for a in em.algebras:
            k = em.base.objects[a.carrier]
            carriers[k] = carriers.get(k, 0) + 1
        ctx.report.result = {"algebras": len(em.algebras), "morphisms": EM.n_mor, "by_carrier": carriers}
        _absorb(ctx, validate_adjunction(em.adjunction()), prefix="free -| forgetful: ")
        for n in em.notes:
            ctx.report.notes.append(n)
    elif mode == "prop1":
        _, Dn = _arity(ctx, 2, 2, "MONAD DFS")
        d = _dfs(env, Dn).value
        if d.C is not em.base:
            raise LoadError(f"dfs {Dn} is not over the base of {Tn}")
        _absorb(ctx, check_right_induced(em, d), EM)
    else:
        _, Ln, Rn = _arity(ctx, 3, 3, "MONAD L R")
        L, R = _class(env, Ln), _class(env, Rn)
        if L.C is not em.base or R.C is not em.base:
            raise LoadError(f"classes {Ln}, {Rn} must live in the base of {Tn}")
        lifted = agree = 0
        for f in range(EM.n_mor):
            try:
                res = lift_factorization(em, f, L, R)
            except HypothesisFailed as exc:
                ctx.report.hypothesis = exc.which
                ctx.report.hypothesis_witness = None if exc.witness is None else str(exc.witness)
                ctx.report.settle()
                return
            lifted += 1
            agree += int(res.report.ok)
            _absorb(ctx, res.report, EM)
        ctx.report.checks = {"morphisms lifted": lifted, "agree with generic factorization": agree}
        ctx.report.notes = sorted(set(ctx.report.notes))


def _topos_for(env: Environment, name: str) -> PresheafTopos:
    ent = env.get(name, ("category", "window"))
    if ent.kind == "window":
        return ent.value
    if "topos" not in ent.extra:
        B, om = env.base_of(name)
        ent.extra["topos"] = PresheafTopos(B)
        ent.extra["omega"] = ent.extra["topos"].om
        env._lt.pop(id(om), None)
    return ent.extra["topos"]


def cmd_lt(ctx: Ctx) -> None:
    env, mode = ctx.env, ctx.ns.mode
    if mode == "enumerate":
        (Bn,) = _arity(ctx, 1, 1, "BASE")
        B, om = env.base_of(Bn)
        ks = env.topologies(Bn)
        groth = enumerate_grothendieck(B, om)
        ctx.report.window = f"base {B.name}: {B.n_obj} objects, {B.n_mor} morphisms"
        rows = []
        for i, k in enumerate(ks):
            law = check_lt_laws(k)
            _absorb(ctx, law, prefix=f"k{i}: ")
            rows.append({"index": i, "describe": k.describe(),
                         "covering": {B.objects[c]: len(k.covering(c)) for c in range(B.n_obj)}})
        ctx.report.checks = {"topologies": len(ks), "Grothendieck topologies": len(groth)}
        if len(ks) != len(groth):
            _fail(ctx, "count agrees with Grothendieck oracle", str(len(ks)), str(len(groth)))
        ctx.report.result = {"count": len(ks), "topologies": rows}
    elif mode == "compare":
        Bn, i, j = _arity(ctx, 3, 3, "BASE I J")
        T = _topos_for(env, Bn)
        k1, k2 = env.topology(Bn, i), env.topology(Bn, j)
        ctx.report.window = T.window.describe()
        ctx.report.result = compare_lt(T, k1, k2)
    elif mode == "from-dfs":
        (Dn,) = _arity(ctx, 1, 1, "DFS")
        ent = _dfs(env, Dn)
        if ent.topos is None:
            raise LoadError(f"dfs {Dn} must be declared in a window")
        T = ent.topos
        ctx.report.window = T.window.describe()
        k, rep = dfs_to_lt(T, ent.value)
        _absorb(ctx, rep, T.C)
        ks = env.topologies(env.window_name(T))
        match = [i for i, k2 in enumerate(ks) if k2 == k]
        ctx.report.result = {"topology": k.describe(), "matches": match}
        expect = ent.extra.get("k")
        if expect is not None:
            ctx.report.checks["round trip"] = k == expect
            if k != expect:
                _fail(ctx, "dfs_to_lt round trip", Dn, detail=f"got {k.describe()}, declared {expect.describe()}")
    else:
        (Bn,) = _arity(ctx, 1, 1, "BASE")
        T = _topos_for(env, Bn)
        ctx.report.window = T.window.describe()
        pres = T.window.presheaves
        mors = [T.window.morphism(m) for m in range(T.C.n_mor)]
        for i, k in enumerate(env.topologies(Bn)):
            c = closure_of(k)
            back = topology_of_closure(c, name=k.name)
            ctx.report.checks[f"k{i}: k -> c -> k"] = back == k
            if back != k:
                _fail(ctx, "k -> closure -> k", k.name)
            same = compare_closure_masks(k, back, pres) and compare_closure_masks(back, k, pres)
            ctx.report.checks[f"k{i}: c -> k -> c"] = same
            if not same:
                _fail(ctx, "closure -> k -> closure", k.name)
            _absorb(ctx, check_closure_axioms(c, pres, mors), prefix=f"k{i}: ")


def cmd_sheaf(ctx: Ctx) -> None:
    env = ctx.env
    Wn, *rest = _arity(ctx, 1, 3, "BASE [PRESHEAF [K]]")
    B, _ = env.base_of(Wn)
    if rest:
        P = env.get(rest[0], ("presheaf",)).value
        if P.base is not B:
            raise LoadError(f"presheaf {rest[0]} is not over the base of {Wn}")
        targets = [(rest[0], P)]
        ctx.report.window = f"base {B.name}; presheaf {rest[0]} sizes {list(P.sizes)}"
    else:
        T = env.topos(Wn)
        targets = list(zip(T.C.objects, T.window.presheaves))
        ctx.report.window = T.window.describe()
    ks = env.topologies(Wn)
    idx = [int(rest[1])] if len(rest) > 1 else list(range(len(ks)))
    rows = {}
    for i in idx:
        k = env.topology(Wn, i)
        for label, P in targets:
            key = f"k{i} {label}"
            if ctx.ns.mode == "check":
                sep, sh = sheaf_stats(k, P)
                rows[key] = {"sheaf": sh, "separated": sep}
            else:
                rep = check_sheafification(k, P)
                rows[key] = {"sizes": rep.checks.pop("sizes")}
                _absorb(ctx, rep, prefix=f"{key}: ")
    ctx.report.result = rows


def cmd_cartesian(ctx: Ctx) -> None:
    (Xn,) = _arity(ctx, 1, 1, "DFS or COMONAD")
    ent = ctx.env.get(Xn, ("dfs", "comonad"))
    if ent.kind == "dfs":
        if ent.topos is None:
            raise LoadError(f"dfs {Xn} must be declared in a window")
        ctx.report.window = ent.topos.window.describe()
        _absorb(ctx, is_cartesian_dfs(ent.topos, ent.value), ent.topos.C)
    else:
        wc = ent.value
        if not isinstance(wc, WindowComonad):
            raise LoadError(f"comonad {Xn} must be declared on a window")
        ctx.report.window = wc.T.window.describe()
        rep = check_cartesian_comonad(wc)
        _absorb(ctx, rep, wc.T.C)
        if not rep.checks.get("cartesian", False) and not ctx.report.witnesses:
            _fail(ctx, "cartesian", Xn)


def cmd_thm7(ctx: Ctx) -> None:
    An, *rest = _arity(ctx, 1, 3, "ADJUNCTION [I J]")
    inst: AdjunctionInstance = ctx.env.get(An, ("adjunction",)).value
    if inst.source is None or inst.target is None:
        raise LoadError(f"adjunction {An} must be between windows")
    T1, T2 = inst.source, inst.target
    ctx.report.window = f"{T1.window.describe()}; {T2.window.describe()}"
    rows, applicable, skipped = [], 0, None
    for row in continuity_sweep(inst.adj, T1, T2):
        rep = row["report"]
        if rest and (str(row["i"]), str(row["j"])) != tuple(rest):
            continue
        conds = {k: v for k, v in rep.checks.items() if k in _CONTINUITY}
        rows.append({"i": row["i"], "j": row["j"], "verdict": rep.verdict, "conditions": conds,
                     "continuous": rep.checks.get("continuity verdict"),
                     "hypothesis": rep.hypothesis})
        if rep.hypothesis:
            # pairs outside the hypotheses are listed but do not decide the verdict
            skipped = skipped or rep
            continue
        applicable += 1
        _absorb(ctx, rep, prefix=f"({row['i']},{row['j']}) ")
        ctx.report.checks.pop(f"({row['i']},{row['j']}) sheaves swept", None)
    if rest and not rows:
        raise UsageError(f"no topology pair ({rest[0]}, {rest[1]})")
    ctx.report.checks["pairs applicable"] = applicable
    ctx.report.checks["pairs outside hypotheses"] = len(rows) - applicable
    if not applicable and skipped is not None:
        ctx.report.hypothesis = skipped.hypothesis
        ctx.report.hypothesis_witness = skipped.hypothesis_witness
    ctx.report.result = rows


_CONTINUITY = ("G(J.E) in J.E", "G preserves closures", "G continuous for closures", "k1 tau = tau G(k2)")


def _coalgebra_topos(ctx: Ctx, name: str):
    ent = ctx.env.get(name, ("comonad",))
    wc = ent.value
    if not isinstance(wc, WindowComonad):
        raise LoadError(f"comonad {name} must be declared on a window")
    if "topos" not in ent.extra:
        ent.extra["topos"] = build_coalgebra_topos(wc.T, wc)
    return ent, ent.extra["topos"]


def cmd_coalg(ctx: Ctx) -> None:
    env, mode = ctx.env, ctx.ns.mode
    Gn, *rest = _arity(ctx, 1, 2, "COMONAD [K]")
    ent, CT = _coalgebra_topos(ctx, Gn)
    T = CT.T
    Wn = env.window_name(T)
    ctx.report.window = CT.window.describe() + f"; base window {T.window.describe()}"
    ks = env.topologies(Wn)
    idx = [int(rest[0])] if rest else list(range(len(ks)))
    if mode == "build":
        _absorb(ctx, CT.report, CT.C)
        om = CT.em.algebras[CT.omega_idx]
        ctx.report.result = {"coalgebras": CT.C.n_obj, "morphisms": CT.C.n_mor,
                             "omega_G carrier": T.C.objects[om.carrier]}
    elif mode == "extend":
        rows = {}
        for i in idx:
            ext = extend_lt(CT, env.topology(Wn, i))
            _absorb(ctx, ext.report, CT.C, prefix=f"k{i}: ")
            if T.B.n_obj and int(CT.wc.G.obj_map[T.one_idx]) == T.one_idx and ext.kt is not None:
                _absorb(ctx, compare_with_base(CT, ext), CT.C, prefix=f"k{i}: ")
            rows[f"k{i}"] = {"verdict": ext.report.verdict}
        ctx.report.result = rows
    else:
        rows = {}
        for i in idx:
            rep = check_induced_topology(CT, T.dfs_of(env.topology(Wn, i)))
            _absorb(ctx, rep, CT.C, prefix=f"k{i}: ")
            rows[f"k{i}"] = {"verdict": rep.verdict, "k_G = k~": rep.checks.get("k_G = k~")}
        ctx.report.result = rows


COMMANDS = {"validate": cmd_validate, "factorize": cmd_factorize, "verify": cmd_verify, "perp": cmd_perp,
            "local": cmd_local, "lemma1": cmd_lemma1, "lemma3": cmd_lemma3, "quillen": cmd_quillen,
            "bousfield": cmd_bousfield, "em": cmd_em, "lt": cmd_lt, "sheaf": cmd_sheaf,
            "cartesian": cmd_cartesian, "thm7": cmd_thm7, "coalg": cmd_coalg}


# ------------------------------------------------------------ parser
def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text"), default="json", help="report format")
    p.add_argument("--out", help="write the report to this path instead of stdout")
    p.add_argument("--stable", action="store_true", help="omit timing so reports are byte-stable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facto", description="Finite factorization-system checker.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name in DOC_COMMANDS:
        p = sub.add_parser(name)
        _common(p)
        if name in MODES:
            g = p.add_mutually_exclusive_group(required=True)
            for m in MODES[name]:
                g.add_argument(f"--{m}", dest="mode", action="store_const", const=m)
        p.add_argument("document", help="document path, or corpus:NAME")
        p.add_argument("names", nargs="*", help="names declared in the document")
        if name == "verify":
            p.add_argument("--sample", type=int, default=0, help="check every Nth ladder pair only")
        if name == "perp":
            p.add_argument("--left", action="store_true", help="left complement instead of right")
            p.add_argument("--weak", action="store_true", help="weak lifting instead of unique lifting")
        if name == "em":
            p.add_argument("--bound", type=int, default=4, help="carrier bound for the group instance")
    p = sub.add_parser("corpus")
    _common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true", help="run every corpus check")
    g.add_argument("--list", action="store_true", help="list corpus documents and checks")
    g.add_argument("--show", metavar="NAME", help="print a corpus document")
    g.add_argument("--run", metavar="CHECK", help="run one corpus check by name")
    p = sub.add_parser("replay")
    _common(p)
    p.add_argument("report", help="a machine report produced by facto")
    p = sub.add_parser("generate-compose")
    p.add_argument("--out", help="write the document here")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--poset", nargs="+", metavar="REL", help="relations x<y; transitive closure is taken")
    g.add_argument("--finset", type=int, metavar="N", help="all maps between {0..k-1}, k <= N")
    g.add_argument("--builtin", metavar="EXPR", help="a builtin category expression such as chain(3)")
    p.add_argument("--name", default="C", help="name of the generated category")
    return parser


def command_echo(ns: argparse.Namespace) -> list[str]:
    out = [ns.command]
    mode = getattr(ns, "mode", None)
    if mode:
        out.append(f"--{mode}")
    if getattr(ns, "sample", 0):
        out += ["--sample", str(ns.sample)]
    for flag in ("left", "weak"):
        if getattr(ns, flag, False):
            out.append(f"--{flag}")
    if ns.command == "em" and mode == "cor2":
        out += ["--bound", str(ns.bound)]
    out.append(ns.document)
    out += list(ns.names)
    return out


def run_namespace(ns: argparse.Namespace, stable: bool | None = None) -> Report:
    """Run a parsed document command; usage and load problems raise."""
    echo = command_echo(ns)
    report = Report(command=echo, document=ns.document)
    t0 = time.perf_counter()
    env = load_document(ns.document)
    ctx = Ctx(env, report, list(ns.names), ns)
    try:
        COMMANDS[ns.command](ctx)
    except HypothesisFailed as exc:
        report.hypothesis = exc.which
        report.hypothesis_witness = None if exc.witness is None else str(exc.witness)
    except NotCartesian as exc:
        report.hypothesis = "comonad cartesian"
        report.hypothesis_witness = exc.reason
    except NoFactorization as exc:
        report.witnesses.append({"law": "factorization", "names": [str(exc.morphism)], "detail": str(exc)})
        report.n_violations += 1
    report.settle()
    stable = ns.stable if stable is None else stable
    report.timing_ms = None if stable else int(round((time.perf_counter() - t0) * 1000))
    return report


def run(argv: list[str], stable: bool = True) -> Report:
    """Parse and run one document command given as an argument list."""
    ns = build_parser().parse_args(argv)
    if ns.command not in COMMANDS:
        raise UsageError(f"{ns.command} does not produce a single report")
    return run_namespace(ns, stable)
