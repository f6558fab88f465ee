"""Lifting, orthogonality and factorization systems on finite categories.

Square convention: ``f: A -> B`` on the left, ``g: X -> Y`` on the right,
``u: A -> X`` on top and ``v: B -> Y`` at the bottom, commuting when
``v o f == g o u``.  A filler is ``h: B -> X`` with ``h o f == u`` and
``g o h == v``.

Exhaustive checks avoid looping over squares.  For fixed ``f`` and ``g`` the
map ``h -> (h o f, g o h)`` from ``H(B, X)`` lands in the commuting squares;
``f`` has the lifting property against ``g`` iff it is onto, and ``f`` is
orthogonal to ``g`` iff it is a bijection.  Counting commuting squares is a
join on ``H(A, Y)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import HypothesisFailed, NoFactorization, NonCommutingSquare
from .fincat import FinCategory, epi_mask, iso_mask, mono_mask, opposite
from .functors import Adjunction, Functor
from .limits import product, terminal_object
from .report import ValidationReport


class MorphismClass:
    """An extensional set of morphisms of one category."""

    def __init__(self, C: FinCategory, mask, name: str = "K"):
        self.C = C
        self.mask = np.asarray(mask, dtype=bool).copy()
        if self.mask.shape != (C.n_mor,):
            raise ValueError("class mask has the wrong length")
        self.name = name

    @classmethod
    def of(cls, C: FinCategory, ids: Iterable[int], name: str = "K") -> "MorphismClass":
        return cls(C, C.mask(ids), name)

    @property
    def ids(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __contains__(self, m) -> bool:
        return bool(self.mask[int(m)])

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __iter__(self):
        return iter(int(i) for i in self.ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, MorphismClass) and other.C is self.C and bool((other.mask == self.mask).all())

    def __hash__(self):
        return hash(self.mask.tobytes())

    def __and__(self, other: "MorphismClass") -> "MorphismClass":
        return MorphismClass(self.C, self.mask & other.mask, f"({self.name}&{other.name})")

    def __or__(self, other: "MorphismClass") -> "MorphismClass":
        return MorphismClass(self.C, self.mask | other.mask, f"({self.name}|{other.name})")

    def __sub__(self, other: "MorphismClass") -> "MorphismClass":
        return MorphismClass(self.C, self.mask & ~other.mask, f"({self.name}-{other.name})")

    def __le__(self, other: "MorphismClass") -> bool:
        return bool((self.mask <= other.mask).all())

    def in_hom(self, x: int, y: int) -> np.ndarray:
        h = self.C.hom(x, y)
        return h[self.mask[h]]

    def renamed(self, name: str) -> "MorphismClass":
        return MorphismClass(self.C, self.mask, name)

    def describe(self, limit: int = 20) -> str:
        ids = self.ids
        s = ", ".join(self.C.names[i] for i in ids[:limit])
        return f"{self.name} = {{{s}{', ...' if len(ids) > limit else ''}}} ({len(ids)})"

    def __repr__(self) -> str:
        return f"MorphismClass({self.name}, {len(self)} of {self.C.n_mor})"


def all_class(C: FinCategory) -> MorphismClass:
    return MorphismClass(C, np.ones(C.n_mor, dtype=bool), "Mor")


def empty_class(C: FinCategory) -> MorphismClass:
    return MorphismClass(C, np.zeros(C.n_mor, dtype=bool), "0")


def iso_class(C: FinCategory) -> MorphismClass:
    return MorphismClass(C, iso_mask(C), "Iso")


def epi_class(C: FinCategory) -> MorphismClass:
    return MorphismClass(C, epi_mask(C), "Epi")


def mono_class(C: FinCategory) -> MorphismClass:
    return MorphismClass(C, mono_mask(C), "Mono")


def bim_class(C: FinCategory) -> MorphismClass:
    return MorphismClass(C, mono_mask(C) & epi_mask(C), "Bim")


def _in(C: FinCategory, K: MorphismClass) -> MorphismClass:
    return MorphismClass(C, K.mask, K.name)


def ex_epi_class(C: FinCategory) -> MorphismClass:
    """Epis ``e`` such that ``e = m o g`` with ``m`` mono forces ``m`` iso."""
    epi, mono, iso = epi_mask(C), mono_mask(C), iso_mask(C)
    out = epi.copy()
    for a, z, b in itertools.product(range(C.n_obj), repeat=3):
        blk = C.block(a, z, b)
        if blk.size == 0:
            continue
        ms = C.hom(z, b)
        bad_m = mono[ms] & ~iso[ms]
        if not bad_m.any():
            continue
        hits = np.unique(blk[bad_m, :])
        out[hits] = False
    return MorphismClass(C, out, "ExEpi")


def ex_mono_class(C: FinCategory) -> MorphismClass:
    return _in(C, ex_epi_class(opposite(C))).renamed("ExMono")


def str_epi_class(C: FinCategory) -> MorphismClass:
    """Epis with the left lifting property against every mono."""
    return MorphismClass(C, epi_mask(C) & box_left(C, mono_class(C)).mask, "StrEpi")


def str_mono_class(C: FinCategory) -> MorphismClass:
    return _in(C, str_epi_class(opposite(C))).renamed("StrMono")


def reg_epi_class(C: FinCategory) -> MorphismClass:
    """Morphisms that are the coequalizer of some parallel pair."""
    epi = epi_mask(C)
    out = np.zeros(C.n_mor, dtype=bool)
    n = C.n_obj
    for b in range(n):
        # count vectors cnt[(pair)][y] = #{g: B->y | g x = g y}
        pair_counts, pairs = [], []
        for a in range(n):
            hab = C.hom(a, b)
            if not len(hab):
                continue
            for i, x in enumerate(hab):
                for y in hab[i:]:
                    cnt = np.zeros(n, dtype=np.int64)
                    for t in range(n):
                        blk = C.block(a, b, t)
                        if blk.shape[0]:
                            cnt[t] = int((blk[:, C.loc[x]] == blk[:, C.loc[y]]).sum())
                    pair_counts.append(cnt)
                    pairs.append((int(x), int(y)))
        for q in range(n):
            hq = np.array([len(C.hom(q, t)) for t in range(n)])
            for e in C.hom(b, q):
                if not epi[e]:
                    continue
                for (x, y), cnt in zip(pairs, pair_counts):
                    if np.array_equal(cnt, hq) and C.compose(int(e), x) == C.compose(int(e), y):
                        out[e] = True
                        break
    return MorphismClass(C, out, "RegEpi")


def reg_mono_class(C: FinCategory) -> MorphismClass:
    return _in(C, reg_epi_class(opposite(C))).renamed("RegMono")


# ---------------------------------------------------------------- lifting
@dataclass
class LiftReport:
    square: tuple[int, int, int, int]
    fillers: list[int] = field(default_factory=list)

    @property
    def exists(self) -> bool:
        return len(self.fillers) > 0

    @property
    def unique(self) -> bool:
        return len(self.fillers) == 1


def lift_fillers(C: FinCategory, f: int, g: int, u: int, v: int) -> LiftReport:
    """All diagonal fillers of the square ``(f, u, v, g)``, in id order."""
    if not (C.dom[u] == C.dom[f] and C.cod[u] == C.dom[g] and C.dom[v] == C.cod[f] and C.cod[v] == C.cod[g]):
        raise NonCommutingSquare((f, u, v, g), "square is ill-typed")
    if C.compose(v, f) != C.compose(g, u):
        raise NonCommutingSquare((C.names[f], C.names[u], C.names[v], C.names[g]))
    out = []
    for h in C.hom(int(C.cod[f]), int(C.dom[g])):
        if C.compose(int(h), f) == u and C.compose(g, int(h)) == v:
            out.append(int(h))
    return LiftReport((f, u, v, g), out)


def _lift_stats(C: FinCategory, f: int, x: int, y: int, g_ids: np.ndarray):
    """For each ``g`` in ``g_ids`` (all in ``H(x, y)``): squares, image size, injectivity."""
    a, b = int(C.dom[f]), int(C.cod[f])
    ng = len(g_ids)
    g_loc = C.loc[g_ids]
    n_ay = len(C.hom(a, y))
    # commuting squares: sum_z #{u: g u = z} * #{v: v f = z}
    n_sq = np.zeros(ng, dtype=np.int64)
    hu = C.hom(a, x)
    hv = C.hom(b, y)
    if n_ay and len(hu) and len(hv):
        gu = C.loc[C.block(a, x, y)[g_loc, :]]                  # (ng, nU)
        vf = C.loc[C.block(a, b, y)[:, C.loc[f]]]               # (nV,)
        cnt_v = np.bincount(vf, minlength=n_ay)
        n_sq = cnt_v[gu].sum(axis=1)
    hh = C.hom(b, x)
    if not len(hh):
        return n_sq, np.zeros(ng, dtype=np.int64), np.ones(ng, dtype=bool)
    hf = C.loc[C.block(a, b, x)[:, C.loc[f]]]                   # (nH,)
    gh = C.loc[C.block(b, x, y)[g_loc, :]]                      # (ng, nH)
    key = np.sort(hf[None, :] * max(len(hv), 1) + gh, axis=1)
    distinct = 1 + (np.diff(key, axis=1) != 0).sum(axis=1)
    injective = distinct == len(hh)
    return n_sq, distinct, injective


def has_llp(C: FinCategory, f: int, g: int) -> bool:
    n_sq, img, _ = _lift_stats(C, int(f), int(C.dom[g]), int(C.cod[g]), np.array([g]))
    return bool(img[0] == n_sq[0])


def is_orthogonal(C: FinCategory, f: int, g: int) -> bool:
    n_sq, img, inj = _lift_stats(C, int(f), int(C.dom[g]), int(C.cod[g]), np.array([g]))
    return bool(img[0] == n_sq[0] and inj[0])


def _lift_stats_many(C: FinCategory, fs: np.ndarray, x: int, y: int, g_ids: np.ndarray):
    """``_lift_stats`` for several ``f`` sharing domain and codomain; arrays of shape (nf, ng)."""
    a, b = int(C.dom[fs[0]]), int(C.cod[fs[0]])
    nf, ng = len(fs), len(g_ids)
    g_loc = C.loc[g_ids]
    n_ay = len(C.hom(a, y))
    n_sq = np.zeros((nf, ng), dtype=np.int64)
    hu, hv = C.hom(a, x), C.hom(b, y)
    if n_ay and len(hu) and len(hv):
        gu = C.loc[C.block(a, x, y)[g_loc, :]]                  # (ng, nU)
        vf = C.loc[C.block(a, b, y)[:, C.loc[fs]]].T            # (nf, nV)
        cnt_v = np.zeros((nf, n_ay), dtype=np.int64)
        np.add.at(cnt_v, (np.repeat(np.arange(nf), vf.shape[1]), vf.ravel()), 1)
        n_sq = cnt_v[:, gu].sum(axis=2)
    hh = C.hom(b, x)
    if not len(hh):
        return n_sq, np.zeros((nf, ng), dtype=np.int64), np.ones((nf, ng), dtype=bool)
    hf = C.loc[C.block(a, b, x)[:, C.loc[fs]]].T                # (nf, nH)
    gh = C.loc[C.block(b, x, y)[g_loc, :]]                      # (ng, nH)
    key = np.sort(hf[:, None, :] * max(len(hv), 1) + gh[None, :, :], axis=2)
    distinct = 1 + (np.diff(key, axis=2) != 0).sum(axis=2)
    return n_sq, distinct, distinct == len(hh)


def _right_complement(C: FinCategory, K: MorphismClass, unique: bool) -> np.ndarray:
    alive = np.ones(C.n_mor, dtype=bool)
    ids = K.ids
    groups: dict = {}
    for f in ids:
        groups.setdefault((int(C.dom[f]), int(C.cod[f])), []).append(int(f))
    for fs in groups.values():
        fs = np.array(fs)
        for x in range(C.n_obj):
            for y in range(C.n_obj):
                h = C.hom(x, y)
                h = h[alive[h]]
                if not len(h):
                    continue
                n_sq, img, inj = _lift_stats_many(C, fs, x, y, h)
                ok = img == n_sq
                if unique:
                    ok &= inj
                alive[h[~ok.all(axis=0)]] = False
    return alive


def perp_right(C: FinCategory, K: MorphismClass) -> MorphismClass:
    """``K^perp``: morphisms with unique fillers against every member of ``K``."""
    return MorphismClass(C, _right_complement(C, K, True), f"{K.name}^perp")


def perp_left(C: FinCategory, K: MorphismClass) -> MorphismClass:
    """``perp K``."""
    return MorphismClass(C, _right_complement(opposite(C), K, True), f"perp{K.name}")


def box_right(C: FinCategory, K: MorphismClass) -> MorphismClass:
    """Morphisms with the right lifting property against ``K``."""
    return MorphismClass(C, _right_complement(C, K, False), f"{K.name}^box")


def box_left(C: FinCategory, K: MorphismClass) -> MorphismClass:
    return MorphismClass(C, _right_complement(opposite(C), K, False), f"box{K.name}")


def find_bad_square(C: FinCategory, f: int, g: int, unique: bool = True):
    """A commuting square from ``f`` to ``g`` with no filler (or several), if any."""
    a, b, x, y = int(C.dom[f]), int(C.cod[f]), int(C.dom[g]), int(C.cod[g])
    for u in C.hom(a, x):
        gu = C.compose(g, int(u))
        for v in C.hom(b, y):
            if C.compose(int(v), f) != gu:
                continue
            rep = lift_fillers(C, f, g, int(u), int(v))
            if not rep.exists or (unique and not rep.unique):
                return (int(f), int(u), int(v), int(g)), rep.fillers
    return None


def class_compose(C: FinCategory, R: MorphismClass, L: MorphismClass) -> MorphismClass:
    """``R . L = {r o l}``."""
    out = np.zeros(C.n_mor, dtype=bool)
    for x, y, z in itertools.product(range(C.n_obj), repeat=3):
        ls = L.in_hom(x, y)
        if not len(ls):
            continue
        rs = R.in_hom(y, z)
        if not len(rs):
            continue
        out[C.block(x, y, z)[np.ix_(C.loc[rs], C.loc[ls])].ravel()] = True
    return MorphismClass(C, out, f"{R.name}.{L.name}")


# ---------------------------------------------------------- factorizations
def factorizations_fs(C: FinCategory, f: int, L: MorphismClass, R: MorphismClass) -> list[tuple[int, int]]:
    """All ``(l, r)`` with ``r o l == f``, sorted by ids."""
    a, b = int(C.dom[f]), int(C.cod[f])
    out = []
    for z in range(C.n_obj):
        ls, rs = L.in_hom(a, z), R.in_hom(z, b)
        if not len(ls) or not len(rs):
            continue
        blk = C.block(a, z, b)[np.ix_(C.loc[rs], C.loc[ls])]
        for i, j in np.argwhere(blk == f):
            out.append((int(ls[j]), int(rs[i])))
    return sorted(out)


def factorize_fs(C: FinCategory, f: int, L: MorphismClass, R: MorphismClass) -> tuple[int, int]:
    facs = factorizations_fs(C, f, L, R)
    if not facs:
        raise NoFactorization(C.names[f])
    return facs[0]


def factorizations_dfs(C: FinCategory, f: int, E: MorphismClass, J: MorphismClass, M: MorphismClass
                       ) -> list[tuple[int, int, int]]:
    a, b = int(C.dom[f]), int(C.cod[f])
    out = []
    for x in range(C.n_obj):
        es = E.in_hom(a, x)
        if not len(es):
            continue
        for y in range(C.n_obj):
            js, ms = J.in_hom(x, y), M.in_hom(y, b)
            if not len(js) or not len(ms):
                continue
            je = C.block(a, x, y)[np.ix_(C.loc[js], C.loc[es])]           # (nj, ne)
            mje = C.block(a, y, b)[np.ix_(C.loc[ms], C.loc[je.ravel()])]  # (nm, nj*ne)
            for i, k in np.argwhere(mje == f):
                jj, ee = divmod(int(k), len(es))
                out.append((int(es[ee]), int(js[jj]), int(ms[i])))
    return sorted(out)


def factorize_dfs(C: FinCategory, f: int, E: MorphismClass, J: MorphismClass, M: MorphismClass
                  ) -> tuple[int, int, int]:
    facs = factorizations_dfs(C, f, E, J, M)
    if not facs:
        raise NoFactorization(C.names[f])
    return facs[0]


def fs_comparisons(C: FinCategory, fac1: tuple[int, int], fac2: tuple[int, int]) -> list[int]:
    """Isos ``p`` with ``p o l1 == l2`` and ``r2 o p == r1``."""
    (l1, r1), (l2, r2) = fac1, fac2
    z1, z2 = int(C.cod[l1]), int(C.cod[l2])
    iso = iso_mask(C)
    return [int(p) for p in C.hom(z1, z2)
            if iso[p] and C.compose(int(p), l1) == l2 and C.compose(r2, int(p)) == r1]


def dfs_comparisons(C: FinCategory, fac1, fac2) -> list[tuple[int, int]]:
    """Iso pairs ``(p, q)`` with ``p e1 = e2``, ``q j1 = j2 p`` and ``m2 q = m1``."""
    (e1, j1, m1), (e2, j2, m2) = fac1, fac2
    iso = iso_mask(C)
    out = []
    for p in C.hom(int(C.cod[e1]), int(C.cod[e2])):
        if not iso[p] or C.compose(int(p), e1) != e2:
            continue
        for q in C.hom(int(C.cod[j1]), int(C.cod[j2])):
            if iso[q] and C.compose(int(q), j1) == C.compose(j2, int(p)) and C.compose(m2, int(q)) == m1:
                out.append((int(p), int(q)))
    return out


# ------------------------------------------------------------ systems
@dataclass
class Dfs:
    E: MorphismClass
    J: MorphismClass
    M: MorphismClass
    name: str = "dfs"

    @property
    def C(self) -> FinCategory:
        return self.E.C

    def cof(self) -> MorphismClass:
        return class_compose(self.C, self.J, self.E).renamed("Cof")

    def weq(self) -> MorphismClass:
        return class_compose(self.C, self.M, self.E).renamed("W")

    def fib(self) -> MorphismClass:
        return class_compose(self.C, self.M, self.J).renamed("Fib")


@dataclass
class Qfs:
    Cof: MorphismClass
    W: MorphismClass
    Fib: MorphismClass
    name: str = "qfs"

    @property
    def C(self) -> FinCategory:
        return self.Cof.C


def _class_diff(rep: ValidationReport, law: str, got: MorphismClass, want: MorphismClass) -> None:
    C = got.C
    for m in np.flatnonzero(got.mask != want.mask):
        side = "missing" if want.mask[m] else "extra"
        rep.add(law, C.names[m], detail=f"{side} {C.describe(int(m))}")


def verify_wfs(C: FinCategory, L: MorphismClass, R: MorphismClass, unique: bool = False) -> ValidationReport:
    kind = "fs" if unique else "wfs"
    rep = ValidationReport(subject=f"{kind} ({L.name}, {R.name}) in {C.name}")
    comp = class_compose(C, R, L)
    for m in np.flatnonzero(~comp.mask):
        rep.add("factorization", C.names[m], detail="no factorization")
    rep.check("factorization", bool(comp.mask.all()))
    left = MorphismClass(C, _right_complement(opposite(C), R, unique), "")
    right = MorphismClass(C, _right_complement(C, L, unique), "")
    rep.check("left class is the lifting complement", bool((left.mask == L.mask).all()))
    rep.check("right class is the lifting complement", bool((right.mask == R.mask).all()))
    for m in np.flatnonzero(L.mask & ~left.mask):
        w, n = _witness_square(C, int(m), R, unique, left_side=True)
        rep.add("left class lifting", *(w or (C.names[m],)),
                detail=f"member {C.names[m]} of L failing against R; square (f, u, v, g) has {n} fillers")
    for m in np.flatnonzero(~L.mask & left.mask):
        rep.add("left class lifting", C.names[m], detail="lifts against R but is not in L")
    for m in np.flatnonzero(R.mask & ~right.mask):
        w, n = _witness_square(C, int(m), L, unique, left_side=False)
        rep.add("right class lifting", *(w or (C.names[m],)),
                detail=f"member {C.names[m]} of R failing against L; square (f, u, v, g) has {n} fillers")
    for m in np.flatnonzero(~R.mask & right.mask):
        rep.add("right class lifting", C.names[m], detail="lifts against L but is not in R")
    return rep


def _witness_square(C: FinCategory, m: int, K: MorphismClass, unique: bool, left_side: bool) -> tuple:
    for k in K:
        sq = find_bad_square(C, m, k, unique) if left_side else find_bad_square(C, k, m, unique)
        if sq is not None:
            (f, u, v, g), fillers = sq
            return tuple(C.names[x] for x in (f, u, v, g)), len(fillers)
    return (), 0


def verify_fs(C: FinCategory, L: MorphismClass, R: MorphismClass) -> ValidationReport:
    return verify_wfs(C, L, R, unique=True)


def _ladder_ok_matrix(C: FinCategory, E: MorphismClass, J: MorphismClass, M: MorphismClass,
                      rep: ValidationReport, pairs: Iterable[tuple[int, int]] | None = None) -> int:
    """Check unique ladder fillers; returns the number of ``(j, j')`` pairs examined."""
    n = C.n_mor
    js = J.ids
    e_into = {}
    m_from = {}
    cv = {}
    for j in js:
        b, c = int(C.dom[j]), int(C.cod[j])
        if b not in e_into:
            e_into[b] = E.ids[C.cod[E.ids] == b]
        if c not in m_from:
            m_from[c] = M.ids[C.dom[M.ids] == c]
    # cv[j][e, z] = #{v: C -> F | v o j o e = z}
    for j in js:
        b, c = int(C.dom[j]), int(C.cod[j])
        es = e_into[b]
        rows, cols = [], []
        for i, e in enumerate(es):
            je = C.compose(int(j), int(e))
            a = int(C.dom[e])
            for fo in range(C.n_obj):
                hv = C.hom(c, fo)
                if len(hv):
                    z = C.block(a, c, fo)[:, C.loc[je]]
                    rows.append(np.full(len(z), i))
                    cols.append(z)
        cv[int(j)] = _count_matrix(rows, cols, len(es), n)
    # cu_all[z, col] = #{u: A -> D | m o j' o u = z}, one column per (j', m),
    # stacked side by side so each j needs a single sparse product
    col_of = {}
    rows_all, cols_all = [], []
    off = 0
    for jp in js:
        d, e_ = int(C.dom[jp]), int(C.cod[jp])
        ms = m_from[e_]
        for i, m in enumerate(ms):
            mj = C.compose(int(m), int(jp))
            fo = int(C.cod[m])
            for a in range(C.n_obj):
                if len(C.hom(a, d)):
                    z = C.block(a, d, fo)[C.loc[mj], :]
                    rows_all.append(z)
                    cols_all.append(np.full(len(z), off + i))
        col_of[int(jp)] = (off, off + len(ms))
        off += len(ms)
    cu_all = _count_matrix(rows_all, cols_all, n, max(off, 1))
    se_cache: dict = {}
    mt_cache: dict = {}

    def se_table(b: int, d: int) -> np.ndarray:
        key = (b, d)
        if key not in se_cache:
            es, hs = e_into[b], C.hom(b, d)
            t = np.empty((len(es), len(hs)), dtype=np.int64)
            for i, e in enumerate(es):
                t[i] = C.block(int(C.dom[e]), b, d)[:, C.loc[e]] if len(hs) else t[i]
            se_cache[key] = t
        return se_cache[key]

    def mt_table(c: int, e_: int) -> np.ndarray:
        key = (c, e_)
        if key not in mt_cache:
            ms, ht = m_from[e_], C.hom(c, e_)
            t = np.empty((len(ms), len(ht)), dtype=np.int64)
            for i, m in enumerate(ms):
                t[i] = C.block(c, e_, int(C.cod[m]))[C.loc[m], :] if len(ht) else t[i]
            mt_cache[key] = t
        return mt_cache[key]

    count = 0
    if pairs is None:
        pairs = ((int(j), int(jp)) for j in js for jp in js)
    cur_j, lad_j = None, None
    for j, jp in pairs:
        count += 1
        b, c = int(C.dom[j]), int(C.cod[j])
        d, e_ = int(C.dom[jp]), int(C.cod[jp])
        es, ms = e_into[b], m_from[e_]
        if not len(es) or not len(ms):
            continue
        if j != cur_j:
            cur_j, lad_j = j, (cv[j] @ cu_all).toarray()
        lo, hi = col_of[jp]
        ladders = lad_j[:, lo:hi]                                        # (ne, nm)
        hs, ht = C.hom(b, d), C.hom(c, e_)
        if len(hs) and len(ht):
            w_s = C.block(b, d, e_)[C.loc[jp], :]                       # j' s
            w_t = C.block(b, c, e_)[:, C.loc[j]]                        # t j
            si, ti = np.nonzero(w_s[:, None] == w_t[None, :])
        else:
            si = ti = np.zeros(0, dtype=np.int64)
        nr = len(si)
        if nr == 0:
            bad = ladders != 0
            for a_, b_ in np.argwhere(bad)[:3]:
                rep.add("ladder filler", C.names[es[a_]], C.names[j], C.names[jp], C.names[ms[b_]],
                        detail=f"{ladders[a_, b_]} ladders but no (s,t)")
            continue
        if nr == 1:
            if (ladders == 1).all():
                continue
            distinct = np.ones_like(ladders)
        else:
            se = se_table(b, d)[:, si]
            mt = mt_table(c, e_)[:, ti]
            # injective already when either coordinate alone separates the pairs
            inj_e = _rows_distinct(se)
            inj_m = _rows_distinct(mt)
            distinct = np.full_like(ladders, nr)
            pend = ~(inj_e[:, None] | inj_m[None, :])
            if pend.any():
                pa, pb = np.nonzero(pend)
                keys = np.sort(se[pa] * n + mt[pb], axis=1)
                distinct[pa, pb] = 1 + (np.diff(keys, axis=1) != 0).sum(axis=1)
        # (s,t) -> (se, mt) is a bijection onto ladders iff injective and counts match
        bad = (distinct != nr) | (ladders != nr)
        for a_, b_ in np.argwhere(bad)[:3]:
            rep.add("ladder filler", C.names[es[a_]], C.names[j], C.names[jp], C.names[ms[b_]],
                    detail=f"{ladders[a_, b_]} ladders, {nr} compatible (s,t), {distinct[a_, b_]} distinct images")
    return count


def _rows_distinct(a: np.ndarray) -> np.ndarray:
    """Whether each row of ``a`` has pairwise distinct entries."""
    if a.shape[1] < 2:
        return np.ones(a.shape[0], dtype=bool)
    k = np.sort(a, axis=1)
    return (k[:, 1:] != k[:, :-1]).all(axis=1)


def _count_matrix(rows, cols, n_rows, n_cols):
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
    else:
        r = c = np.zeros(0, dtype=np.int64)
    return sparse.csr_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(n_rows, n_cols))


def ladder_fillers_naive(C: FinCategory, E: MorphismClass, J: MorphismClass, M: MorphismClass):
    """Literal enumeration of every ladder and its ``(s, t)`` fillers.

    Yields ``(e, j, j', m, u, v, n_fillers)``; meant for small categories.
    """
    for e in E:
        b = int(C.cod[e])
        a = int(C.dom[e])
        for j in J.ids[C.dom[J.ids] == b]:
            c = int(C.cod[j])
            for jp in J:
                d, e_ = int(C.dom[jp]), int(C.cod[jp])
                for m in M.ids[C.dom[M.ids] == e_]:
                    f_ = int(C.cod[m])
                    for u in C.hom(a, d):
                        mjpu = C.chain(int(m), jp, int(u))
                        for v in C.hom(c, f_):
                            if C.chain(int(v), int(j), e) != mjpu:
                                continue
                            n = 0
                            for s in C.hom(b, d):
                                if C.compose(int(s), e) != u:
                                    continue
                                for t in C.hom(c, e_):
                                    if C.compose(jp, int(s)) == C.compose(int(t), int(j)) and \
                                            C.compose(int(m), int(t)) == v:
                                        n += 1
                            yield (e, int(j), jp, int(m), int(u), int(v), n)


def ladder_fillers(C: FinCategory, e: int, j: int, jp: int, m: int, u: int, v: int) -> list[tuple[int, int]]:
    """All ``(s, t)`` with ``s e = u``, ``j' s = t j`` and ``m t = v``; raises if the ladder does not commute."""
    a, b, c = int(C.dom[e]), int(C.cod[e]), int(C.cod[j])
    d, e_ = int(C.dom[jp]), int(C.cod[jp])
    typed = (C.dom[j] == b and C.dom[m] == e_ and C.dom[u] == a and C.cod[u] == d
             and C.dom[v] == c and C.cod[v] == C.cod[m])
    if not typed:
        raise NonCommutingSquare((e, j, jp, m, u, v), "ladder is ill-typed")
    if C.chain(m, jp, u) != C.chain(v, j, e):
        raise NonCommutingSquare(tuple(C.names[x] for x in (e, j, jp, m, u, v)), "ladder does not commute")
    out = []
    for s in C.hom(b, d):
        if C.compose(int(s), e) != u:
            continue
        for t in C.hom(c, e_):
            if C.compose(jp, int(s)) == C.compose(int(t), j) and C.compose(m, int(t)) == v:
                out.append((int(s), int(t)))
    return out


def bad_ladder(C: FinCategory, e: int, j: int, jp: int, m: int) -> tuple[int, int, list[tuple[int, int]]] | None:
    """First commuting ladder on ``(e, j, j', m)`` whose filler is missing or not unique."""
    a, c = int(C.dom[e]), int(C.cod[j])
    for u in C.hom(a, int(C.dom[jp])):
        mjpu = C.chain(m, jp, int(u))
        for v in C.hom(c, int(C.cod[m])):
            if C.chain(int(v), j, e) != mjpu:
                continue
            st = ladder_fillers(C, e, j, jp, m, int(u), int(v))
            if len(st) != 1:
                return int(u), int(v), st
    return None


def verify_dfs(C: FinCategory, E: MorphismClass, J: MorphismClass, M: MorphismClass,
               mode: str = "exhaustive", sample_every: int = 7, derived: bool = True) -> ValidationReport:
    """Iso stability, total factorization and unique ladder fillers.

    ``mode="sample"`` examines every ``sample_every``-th pair of middle
    arrows instead of all of them; the report notes it.
    """
    rep = ValidationReport(subject=f"dfs ({E.name}, {J.name}, {M.name}) in {C.name}")
    iso = iso_class(C)
    for law, got, cls in (("iso stability Iso.E", class_compose(C, iso, E), E),
                          ("iso stability Iso.J.Iso", class_compose(C, iso, class_compose(C, J, iso)), J),
                          ("iso stability M.Iso", class_compose(C, M, iso), M)):
        extra = got.mask & ~cls.mask
        rep.check(law, not extra.any())
        for m in np.flatnonzero(extra):
            rep.add(law, C.names[m])
    mje = class_compose(C, M, class_compose(C, J, E))
    rep.check("factorization", bool(mje.mask.all()))
    for m in np.flatnonzero(~mje.mask):
        rep.add("factorization", C.names[m], detail="no (E,J,M) factorization")
    if mode == "exhaustive":
        rep.check("ladders examined", _ladder_ok_matrix(C, E, J, M, rep))
    else:
        js = [int(j) for j in J]
        pairs = [(j, jp) for j in js for jp in js][::max(1, sample_every)]
        rep.check("ladders examined", _ladder_ok_matrix(C, E, J, M, rep, pairs))
        rep.note(f"sampled ladder check: every {sample_every}th pair of J-arrows")
    if derived and rep.ok:
        mj = class_compose(C, M, J)
        je = class_compose(C, J, E)
        _class_diff(rep, "derived identity E = perp(M.J)", perp_left(C, mj), E)
        _class_diff(rep, "derived identity J = perpM & E^perp", perp_left(C, M) & perp_right(C, E), J)
        _class_diff(rep, "derived identity M = (J.E)^perp", perp_right(C, je), M)
        if not (iso <= (E & J & M)):
            rep.add("derived identity Iso in E&J&M")
    return rep


def verify_qfs(C: FinCategory, Cof: MorphismClass, W: MorphismClass, Fib: MorphismClass) -> ValidationReport:
    rep = ValidationReport(subject=f"qfs ({Cof.name}, {W.name}, {Fib.name}) in {C.name}")
    rep.merge(verify_fs(C, W & Cof, Fib), "fs(W&Cof, Fib): ")
    rep.merge(verify_fs(C, Cof, W & Fib), "fs(Cof, W&Fib): ")
    bad = two_out_of_three_failures(C, W)
    rep.check("2-out-of-3", not bad)
    for f, g in bad:
        rep.add("2-out-of-3", C.names[f], C.names[g],
                detail=f"f in W: {f in W}, g in W: {g in W}, gf in W: {C.compose(g, f) in W}")
    return rep


def two_out_of_three_failures(C: FinCategory, W: MorphismClass, limit: int = 50) -> list[tuple[int, int]]:
    out = []
    for x, y, z in itertools.product(range(C.n_obj), repeat=3):
        blk = C.block(x, y, z)
        if blk.size == 0:
            continue
        fin = W.mask[C.hom(x, y)][None, :]
        gin = W.mask[C.hom(y, z)][:, None]
        gfin = W.mask[blk]
        total = fin.astype(int) + gin.astype(int) + gfin.astype(int)
        for i, j in np.argwhere(total == 2):
            out.append((int(C.hom(x, y)[j]), int(C.hom(y, z)[i])))
            if len(out) >= limit:
                return out
    return out


# ---------------------------------------------------------- dfs <-> qfs
def qfs_hypotheses(C: FinCategory, dfs: Dfs) -> ValidationReport:
    """The two side conditions under which a dfs yields a qfs."""
    E, J, M = dfs.E, dfs.J, dfs.M
    rep = ValidationReport(subject="dfs-to-qfs hypotheses")
    em = class_compose(C, E, M)
    me = class_compose(C, M, E)
    extra = em.mask & ~me.mask
    rep.check("(i) E.M in M.E", not extra.any())
    if extra.any():
        rep.fail_hypothesis("(i) E.M in M.E", C.names[int(np.flatnonzero(extra)[0])])
        return rep
    iso = iso_mask(C)
    for j in J:
        if iso[j]:
            continue
        y = int(C.cod[j])
        x = int(C.dom[j])
        # e o j in E for some e in E
        for z in range(C.n_obj):
            es = E.in_hom(y, z)
            if len(es) and E.mask[C.block(x, y, z)[C.loc[es], C.loc[j]]].any():
                rep.check("(ii) J-arrows cancelling E are isos", False)
                rep.fail_hypothesis("(ii) e o j in E with j not iso", C.names[j])
                return rep
            ms = M.in_hom(z, x)
            if len(ms) and M.mask[C.block(z, x, y)[C.loc[j], C.loc[ms]]].any():
                rep.check("(ii) J-arrows cancelling M are isos", False)
                rep.fail_hypothesis("(ii) j o m in M with j not iso", C.names[j])
                return rep
    rep.check("(ii) J-arrows cancelling E or M are isos", True)
    return rep


def dfs_to_qfs(C: FinCategory, dfs: Dfs, check: bool = True) -> Qfs:
    if check:
        rep = qfs_hypotheses(C, dfs)
        if not rep.ok:
            raise HypothesisFailed(rep.hypothesis, rep.hypothesis_witness)
    return Qfs(dfs.cof(), dfs.weq(), dfs.fib(), name=f"qfs({dfs.name})")


def qfs_to_dfs(C: FinCategory, qfs: Qfs) -> Dfs:
    return Dfs((qfs.Cof & qfs.W).renamed("E"), (qfs.Fib & qfs.Cof).renamed("Bif"),
               (qfs.Fib & qfs.W).renamed("M"), name=f"dfs({qfs.name})")


def dfs_qfs_roundtrip(C: FinCategory, system) -> ValidationReport:
    """dfs -> qfs -> dfs (or qfs -> dfs -> qfs) must return the same classes."""
    rep = ValidationReport(subject=f"dfs/qfs roundtrip in {C.name}")
    if isinstance(system, Dfs):
        hyp = qfs_hypotheses(C, system)
        rep.merge(hyp)
        if not hyp.ok:
            return rep
        q = dfs_to_qfs(C, system, check=False)
        rep.merge(verify_qfs(C, q.Cof, q.W, q.Fib), "image qfs: ")
        back = qfs_to_dfs(C, q)
        for nm, a, b in (("E", back.E, system.E), ("J", back.J, system.J), ("M", back.M, system.M)):
            _class_diff(rep, f"roundtrip {nm}", a, b)
    else:
        d = qfs_to_dfs(C, system)
        rep.merge(verify_dfs(C, d.E, d.J, d.M, derived=False), "image dfs: ")
        hyp = qfs_hypotheses(C, d)
        rep.merge(hyp, "image dfs: ")
        if not hyp.ok:
            return rep
        back = dfs_to_qfs(C, d, check=False)
        for nm, a, b in (("Cof", back.Cof, system.Cof), ("W", back.W, system.W), ("Fib", back.Fib, system.Fib)):
            _class_diff(rep, f"roundtrip {nm}", a, b)
    return rep


# ------------------------------------------------------------- locality
def _restriction_stats(C: FinCategory, x: int, m: int) -> tuple[bool, bool]:
    """(injective, bijective) for ``H(B, X) -> H(A, X), g -> g o m``."""
    a, b = int(C.dom[m]), int(C.cod[m])
    hb, ha = C.hom(b, x), C.hom(a, x)
    if not len(hb):
        return True, len(ha) == 0
    col = C.block(a, b, x)[:, C.loc[m]]
    inj = len(np.unique(col)) == len(col)
    return inj, inj and len(col) == len(ha)


def is_local(C: FinCategory, x: int, K: MorphismClass) -> bool:
    return all(_restriction_stats(C, x, int(m))[1] for m in K)


def is_separating(C: FinCategory, x: int, K: MorphismClass) -> bool:
    return all(_restriction_stats(C, x, int(m))[0] for m in K)


def local_objects(C: FinCategory, K: MorphismClass) -> list[int]:
    return [x for x in range(C.n_obj) if is_local(C, x, K)]


def separating_objects(C: FinCategory, K: MorphismClass) -> list[int]:
    return [x for x in range(C.n_obj) if is_separating(C, x, K)]


def reflection_unit(C: FinCategory, dfs: Dfs, x: int, terminal: int | None = None) -> tuple[int, int, int]:
    """Factor ``x -> 1`` as ``m j e``; returns ``(e, j, j o e)``."""
    t = terminal_object(C) if terminal is None else terminal
    bang = int(C.hom(x, t)[0])
    e, j, _ = factorize_dfs(C, bang, dfs.E, dfs.J, dfs.M)
    return e, j, C.compose(j, e)


def is_universal_arrow(C: FinCategory, eta: int, targets: Sequence[int]) -> bool:
    """``H(B, Y) -> H(X, Y), g -> g o eta`` bijective for every ``Y`` in ``targets``."""
    return all(_restriction_stats(C, int(y), eta)[1] for y in targets)


def check_locality(C: FinCategory, dfs: Dfs) -> ValidationReport:
    """Locality facts for a dfs: orthogonality vs locality, products of classes,
    fibrations between J-local objects, and the reflection onto J.E-locals."""
    E, J, M = dfs.E, dfs.J, dfs.M
    rep = ValidationReport(subject=f"locality facts for {dfs.name} in {C.name}")
    je = class_compose(C, J, E).renamed("J.E")
    mj = class_compose(C, M, J).renamed("M.J")
    # (i) for L in E, J, J.E: g with L-local codomain: g in L^perp <=> dom g L-local
    ok_i = True
    for L in (E, J, je):
        loc = np.array([is_local(C, x, L) for x in range(C.n_obj)])
        perp = perp_right(C, L)
        for g in range(C.n_mor):
            if not loc[C.cod[g]]:
                continue
            if bool(perp.mask[g]) != bool(loc[C.dom[g]]):
                ok_i = False
                rep.add("(i) orthogonality vs locality", L.name, C.names[g])
    rep.check("(i)", ok_i)
    # (ii) C_{R.L} = C_L & C_R whenever Iso in L & R
    iso = iso_class(C)
    ok_ii = True
    for L, R in ((E, J), (J, M), (E, M), (je, M), (E, mj)):
        if not (iso <= (L & R)):
            continue
        rl = class_compose(C, R, L)
        for x in range(C.n_obj):
            if is_local(C, x, rl) != (is_local(C, x, L) and is_local(C, x, R)):
                ok_ii = False
                rep.add("(ii) local objects of a composite class", f"{R.name}.{L.name}", C.objects[x])
    rep.check("(ii)", ok_ii)
    # (iii) between J-local objects, M.J and M agree
    jloc = np.array([is_local(C, x, J) for x in range(C.n_obj)])
    ok_iii = True
    for g in range(C.n_mor):
        if jloc[C.dom[g]] and jloc[C.cod[g]] and bool(mj.mask[g]) != bool(M.mask[g]):
            ok_iii = False
            rep.add("(iii) fibrations between J-local objects", C.names[g])
    rep.check("(iii)", ok_iii)
    # (iv) reflection
    t = terminal_object(C)
    if t is None:
        rep.check("(iv)", "not-applicable")
        rep.note("(iv) not applicable: no terminal object")
        return rep
    locals_ = local_objects(C, je)
    ok_iv = True
    for x in range(C.n_obj):
        e, j, eta = reflection_unit(C, dfs, x, t)
        b = int(C.cod[eta])
        if b not in locals_:
            ok_iv = False
            rep.add("(iv) reflection target not local", C.objects[x])
        elif not is_universal_arrow(C, eta, locals_):
            ok_iv = False
            rep.add("(iv) reflection not universal", C.objects[x])
    rep.check("(iv)", ok_iv)
    return rep


def diagonal(C: FinCategory, a: int):
    """``(A x A, Delta_A)`` or None when the product is missing."""
    p = product(C, a, a)
    if p is None:
        return None
    for d in C.hom(a, p.apex):
        if C.compose(p.legs[0], int(d)) == C.ident[a] and C.compose(p.legs[1], int(d)) == C.ident[a]:
            return p.apex, int(d)
    return None


def check_diagonal(C: FinCategory, dfs: Dfs, a: int) -> dict:
    """Diagonal of ``a`` against a dfs: local implies trivial fibration implies separating."""
    d = diagonal(C, a)
    if d is None:
        return {"applicable": False}
    _, delta = d
    je = class_compose(C, dfs.J, dfs.E)
    res = {"applicable": True, "trivial_fibration": bool(delta in dfs.M),
           "local": is_local(C, a, je), "separating": is_separating(C, a, je)}
    res["local_implies_trivial_fibration"] = (not res["local"]) or res["trivial_fibration"]
    res["trivial_fibration_implies_separating"] = (not res["trivial_fibration"]) or res["separating"]
    return res


# --------------------------------------------------------------- Quillen
def _image_inside(F: Functor, K: MorphismClass, target: MorphismClass) -> list[int]:
    bad = []
    for m in K:
        fm = F.mor_map[m]
        if fm >= 0 and not target.mask[fm]:
            bad.append(m)
    return bad


def is_left_quillen(F: Functor, dfs_c: Dfs, dfs_d: Dfs) -> bool:
    C, D = F.source, F.target
    return not _image_inside(F, class_compose(C, dfs_c.J, dfs_c.E), class_compose(D, dfs_d.J, dfs_d.E)) \
        and not _image_inside(F, dfs_c.E, dfs_d.E)


def is_right_quillen(G: Functor, dfs_d: Dfs, dfs_c: Dfs) -> bool:
    C, D = G.target, G.source
    return not _image_inside(G, class_compose(D, dfs_d.M, dfs_d.J), class_compose(C, dfs_c.M, dfs_c.J)) \
        and not _image_inside(G, dfs_d.M, dfs_c.M)


def quillen_report(adj: Adjunction, dfs_c: Dfs, dfs_d: Dfs) -> ValidationReport:
    from .functors import validate_adjunction
    rep = ValidationReport(subject=f"Quillen adjunction {adj.name}")
    rep.merge(validate_adjunction(adj), "adjunction: ")
    left = rep.check("left Quillen", is_left_quillen(adj.left, dfs_c, dfs_d))
    right = rep.check("right Quillen", is_right_quillen(adj.right, dfs_d, dfs_c))
    if left != right:
        rep.add("left/right Quillen disagreement", detail=f"left={left} right={right}")
    if not left:
        rep.add("left Quillen", adj.left.name)
    if adj.left.partial or adj.right.partial:
        rep.note("functors are partial; image sweeps cover the materialized part")
    return rep


def is_quillen_adjunction(adj: Adjunction, dfs_c: Dfs, dfs_d: Dfs) -> bool:
    return quillen_report(adj, dfs_c, dfs_d).ok


def check_bousfield(C: FinCategory, dfs1: Dfs, dfs2: Dfs) -> bool:
    """Same cofibrations and weak equivalences of the first inside those of the second."""
    c1 = class_compose(C, dfs1.J, dfs1.E)
    c2 = class_compose(C, dfs2.J, dfs2.E)
    w1 = class_compose(C, dfs1.M, dfs1.E)
    w2 = class_compose(C, dfs2.M, dfs2.E)
    return bool((c1.mask == c2.mask).all() and (w1 <= w2))
