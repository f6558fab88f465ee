"""Finite presheaves on a finite category and their morphisms.

A presheaf ``P`` on ``B`` stores ``sizes[c] = |P(c)|`` and, for every
morphism ``f: x -> y`` of ``B``, an integer array ``restrict[f]`` of length
``sizes[y]`` with values below ``sizes[x]``.  Elements are flattened by
concatenating objects in order, so a morphism of presheaves is a single
integer row, the same encoding used by concrete FinCategory instances.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from ..errors import BoundExceeded
from ..fincat import FinCategory, all_functions, max_mor
from ..report import ValidationReport


class Presheaf:
    def __init__(self, base: FinCategory, sizes: Sequence[int], restrict: Sequence, labels=None, name: str = ""):
        self.base = base
        self.sizes = tuple(int(s) for s in sizes)
        if len(restrict) != base.n_mor:
            raise ValueError("one restriction array per base morphism is required")
        self.restrict = tuple(np.asarray(r, dtype=np.int64).reshape(-1) for r in restrict)
        self.labels = tuple(tuple(l) for l in labels) if labels is not None else \
            tuple(tuple(range(n)) for n in self.sizes)
        self.name = name
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)
        self.total = int(self.offsets[-1])

    @classmethod
    def from_labels(cls, base: FinCategory, at: Mapping[str, Sequence], restrict: Mapping[str, Mapping],
                    name: str = "") -> "Presheaf":
        """``at[obj]`` lists element labels; ``restrict[mor][y_label] = x_label``."""
        labels = [tuple(at.get(o, ())) for o in base.objects]
        sizes = [len(l) for l in labels]
        idx = [{v: i for i, v in enumerate(l)} for l in labels]
        res = []
        for m in range(base.n_mor):
            x, y = int(base.dom[m]), int(base.cod[m])
            if base.is_identity(m):
                res.append(np.arange(sizes[y]))
                continue
            table = restrict.get(base.names[m])
            if table is None:
                res.append(None)
                continue
            res.append(np.array([idx[x][table[v]] for v in labels[y]], dtype=np.int64))
        # fill composites from generators when possible
        for _ in range(base.n_mor):
            changed = False
            for g in range(base.n_mor):
                for f in range(base.n_mor):
                    if base.cod[f] != base.dom[g]:
                        continue
                    h = base.compose(g, f)
                    if res[h] is None and res[f] is not None and res[g] is not None:
                        res[h] = res[f][res[g]]
                        changed = True
            if not changed:
                break
        missing = [base.names[m] for m in range(base.n_mor) if res[m] is None]
        if missing:
            raise ValueError(f"presheaf {name}: no restriction given for {', '.join(missing)}")
        return cls(base, sizes, res, labels=labels, name=name)

    # ------------------------------------------------------------ basics
    def at(self, c: int) -> int:
        return self.sizes[c]

    def flat(self, c: int, i) -> np.ndarray:
        return self.offsets[c] + np.asarray(i)

    def key(self) -> tuple:
        return (self.sizes, b"".join(r.tobytes() for r in self.restrict))

    def __eq__(self, other) -> bool:
        return isinstance(other, Presheaf) and other.base is self.base and other.key() == self.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self) -> str:
        inner = ", ".join(f"{o}:{n}" for o, n in zip(self.base.objects, self.sizes))
        return f"Presheaf({self.name + ' ' if self.name else ''}{inner})"

    def short(self) -> str:
        if self.name:
            return self.name
        return "(" + ",".join(str(s) for s in self.sizes) + ")"

    def validate(self) -> ValidationReport:
        B = self.base
        rep = ValidationReport(subject=f"presheaf {self.short()}")
        for m in range(B.n_mor):
            x, y = int(B.dom[m]), int(B.cod[m])
            r = self.restrict[m]
            if len(r) != self.sizes[y] or (len(r) and (r.min() < 0 or r.max() >= self.sizes[x])):
                rep.add("restriction typing", B.names[m])
        if rep.n_violations:
            return rep
        for c in range(B.n_obj):
            if not np.array_equal(self.restrict[B.ident[c]], np.arange(self.sizes[c])):
                rep.add("restriction of identity", B.objects[c])
        for g in range(B.n_mor):
            for f in range(B.n_mor):
                if B.cod[f] != B.dom[g]:
                    continue
                h = B.compose(g, f)
                # P(g o f) = P(f) o P(g)
                if not np.array_equal(self.restrict[h], self.restrict[f][self.restrict[g]]):
                    rep.add("contravariance", B.names[g], B.names[f])
        return rep

    @cached_property
    def invariant(self) -> tuple:
        """Cheap isomorphism invariant: sizes and fibre profiles of each restriction."""
        B = self.base
        parts = [tuple(self.sizes)]
        for m in range(B.n_mor):
            if B.is_identity(m):
                continue
            r = self.restrict[m]
            fib = np.bincount(r, minlength=self.sizes[int(B.dom[m])]) if len(r) else np.zeros(0, dtype=np.int64)
            parts.append(tuple(sorted(fib.tolist())))
        return tuple(parts)

    @cached_property
    def canonical(self) -> tuple[tuple, tuple]:
        """Least restriction key over per-object relabelings, with the relabeling.

        Returns ``(key, perms)`` where ``perms[c][old] = new``.
        """
        B = self.base
        arrows = [m for m in range(B.n_mor) if not B.is_identity(m)]
        best = None
        best_p = None
        for perms in itertools.product(*(itertools.permutations(range(n)) for n in self.sizes)):
            p = [np.array(q, dtype=np.int64) for q in perms]
            inv = [np.argsort(q) if len(q) else q for q in p]
            parts = []
            for m in arrows:
                x, y = int(B.dom[m]), int(B.cod[m])
                parts.append(tuple(p[x][self.restrict[m][inv[y]]].tolist()))
            k = tuple(parts)
            if best is None or k < best:
                best, best_p = k, p
        return (self.sizes, best), tuple(best_p)


class PresheafMorphism:
    def __init__(self, source: Presheaf, target: Presheaf, components: Sequence, name: str = ""):
        self.source = source
        self.target = target
        self.components = tuple(np.asarray(c, dtype=np.int64).reshape(-1) for c in components)
        self.name = name

    @classmethod
    def from_row(cls, source: Presheaf, target: Presheaf, row) -> "PresheafMorphism":
        row = np.asarray(row, dtype=np.int64)
        comps = [row[source.offsets[c]:source.offsets[c + 1]] - target.offsets[c]
                 for c in range(source.base.n_obj)]
        return cls(source, target, comps)

    def row(self) -> np.ndarray:
        if not self.components:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([self.components[c] + self.target.offsets[c]
                               for c in range(len(self.components))]).astype(np.int64)

    def is_natural(self) -> bool:
        B = self.source.base
        for m in range(B.n_mor):
            x, y = int(B.dom[m]), int(B.cod[m])
            if not np.array_equal(self.components[x][self.source.restrict[m]],
                                  self.target.restrict[m][self.components[y]]):
                return False
        return True

    def is_mono(self) -> bool:
        return all(len(np.unique(c)) == len(c) for c in self.components)

    def is_epi(self) -> bool:
        return all(len(np.unique(c)) == n for c, n in zip(self.components, self.target.sizes))

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def image_masks(self) -> tuple[np.ndarray, ...]:
        out = []
        for c, n in zip(self.components, self.target.sizes):
            m = np.zeros(n, dtype=bool)
            m[c] = True
            out.append(m)
        return tuple(out)

    def __matmul__(self, other: "PresheafMorphism") -> "PresheafMorphism":
        """``self @ other`` is ``self o other``."""
        return PresheafMorphism(other.source, self.target,
                                [s[o] for s, o in zip(self.components, other.components)])

    def __eq__(self, other) -> bool:
        return isinstance(other, PresheafMorphism) and all(
            np.array_equal(a, b) for a, b in zip(self.components, other.components))

    def __repr__(self) -> str:
        return f"PresheafMorphism({self.source.short()} -> {self.target.short()})"


def identity(P: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(P, P, [np.arange(n) for n in P.sizes])


def inverse_of(m: PresheafMorphism) -> PresheafMorphism:
    if not m.is_iso():
        raise ValueError("not an isomorphism")
    return PresheafMorphism(m.target, m.source, [np.argsort(c) for c in m.components])


# ----------------------------------------------------------------- homs
def nat_homs(P: Presheaf, Q: Presheaf, limit: int | None = None) -> np.ndarray:
    """Every natural transformation ``P -> Q`` as a flat row (lexicographic)."""
    B = P.base
    limit = max_mor() if limit is None else limit
    arrows = [m for m in range(B.n_mor) if not B.is_identity(m)]
    cur = np.zeros((1, 0), dtype=np.int64)
    for c in range(B.n_obj):
        cand = all_functions(P.sizes[c], Q.sizes[c])
        if len(cand) == 0 or len(cur) == 0:
            return np.zeros((0, P.total), dtype=np.int64)
        if len(cur) * len(cand) > 50 * limit:
            raise BoundExceeded(f"hom-set {P.short()} -> {Q.short()}", len(cur) * len(cand), 50 * limit)
        cur = np.concatenate([np.repeat(cur, len(cand), axis=0), np.tile(cand, (len(cur), 1))], axis=1)
        keep = np.ones(len(cur), dtype=bool)
        for m in arrows:
            x, y = int(B.dom[m]), int(B.cod[m])
            if max(x, y) != c:
                continue
            ax = cur[:, P.offsets[x]:P.offsets[x + 1]]
            ay = cur[:, P.offsets[y]:P.offsets[y + 1]]
            # alpha_x o P(m) == Q(m) o alpha_y
            keep &= (ax[:, P.restrict[m]] == Q.restrict[m][ay]).all(axis=1)
        cur = cur[keep]
    if len(cur) > limit:
        raise BoundExceeded(f"hom-set {P.short()} -> {Q.short()}", len(cur), limit)
    # shift to flat target indices
    shift = np.concatenate([np.full(n, Q.offsets[c]) for c, n in enumerate(P.sizes)]).astype(np.int64) \
        if P.total else np.zeros(0, dtype=np.int64)
    rows = cur + shift[None, :]
    if len(rows) > 1:
        rows = np.unique(rows, axis=0)
    return rows


def nat_hom_morphisms(P: Presheaf, Q: Presheaf) -> list[PresheafMorphism]:
    return [PresheafMorphism.from_row(P, Q, r) for r in nat_homs(P, Q)]


# ------------------------------------------------------------ constructions
def terminal_presheaf(B: FinCategory) -> Presheaf:
    return Presheaf(B, [1] * B.n_obj, [np.zeros(1, dtype=np.int64)] * B.n_mor, name="1")


def initial_presheaf(B: FinCategory) -> Presheaf:
    return Presheaf(B, [0] * B.n_obj, [np.zeros(0, dtype=np.int64)] * B.n_mor, name="0")


def constant_presheaf(B: FinCategory, n: int, name: str = "") -> Presheaf:
    return Presheaf(B, [n] * B.n_obj, [np.arange(n)] * B.n_mor, name=name or f"const{n}")


def representable(B: FinCategory, c: int) -> Presheaf:
    """``y(c) = H(-, c)`` with restriction by precomposition."""
    c = B.obj(c)
    labels = [tuple(B.names[h] for h in B.hom(x, c)) for x in range(B.n_obj)]
    res = []
    for m in range(B.n_mor):
        x, y = int(B.dom[m]), int(B.cod[m])
        hy = B.hom(y, c)
        res.append(B.loc[B.block(x, y, c)[:, B.loc[m]]] if len(hy) else np.zeros(0, dtype=np.int64))
    return Presheaf(B, [len(l) for l in labels], res, labels=labels, name=f"y({B.objects[c]})")


def product(P: Presheaf, Q: Presheaf) -> tuple[Presheaf, PresheafMorphism, PresheafMorphism]:
    """``P x Q`` with element ``(i, j)`` at index ``i * |Q(c)| + j``."""
    B = P.base
    sizes = [p * q for p, q in zip(P.sizes, Q.sizes)]
    res = []
    for m in range(B.n_mor):
        x, y = int(B.dom[m]), int(B.cod[m])
        i, j = np.divmod(np.arange(sizes[y]), max(Q.sizes[y], 1))
        res.append(P.restrict[m][i] * Q.sizes[x] + Q.restrict[m][j] if sizes[y] else np.zeros(0, dtype=np.int64))
    labels = [tuple((a, b) for a in P.labels[c] for b in Q.labels[c]) for c in range(B.n_obj)]
    X = Presheaf(B, sizes, res, labels=labels, name=f"{P.short()}x{Q.short()}")
    p1 = PresheafMorphism(X, P, [np.arange(s) // max(q, 1) for s, q in zip(sizes, Q.sizes)])
    p2 = PresheafMorphism(X, Q, [np.arange(s) % max(q, 1) for s, q in zip(sizes, Q.sizes)])
    return X, p1, p2


def pair(f: PresheafMorphism, g: PresheafMorphism, X: Presheaf | None = None) -> PresheafMorphism:
    """``<f, g>: A -> P x Q``."""
    if X is None:
        X = product(f.target, g.target)[0]
    comps = [a * q + b for a, b, q in zip(f.components, g.components, g.target.sizes)]
    return PresheafMorphism(f.source, X, comps)


def product_map(f: PresheafMorphism, g: PresheafMorphism) -> PresheafMorphism:
    """``f x g``."""
    S = product(f.source, g.source)
    T = product(f.target, g.target)[0]
    return pair(f @ S[1], g @ S[2], T)


def subpresheaf(P: Presheaf, masks: Sequence[np.ndarray], name: str = "") -> tuple[Presheaf, PresheafMorphism]:
    """Sub-presheaf on the masked elements, with its inclusion."""
    B = P.base
    keep = [np.flatnonzero(np.asarray(m, dtype=bool)) for m in masks]
    new_index = []
    for c in range(B.n_obj):
        a = np.full(P.sizes[c], -1, dtype=np.int64)
        a[keep[c]] = np.arange(len(keep[c]))
        new_index.append(a)
    res = []
    for m in range(B.n_mor):
        x, y = int(B.dom[m]), int(B.cod[m])
        r = new_index[x][P.restrict[m][keep[y]]]
        if (r < 0).any():
            raise ValueError("masks are not closed under restriction")
        res.append(r)
    labels = [tuple(P.labels[c][i] for i in keep[c]) for c in range(B.n_obj)]
    S = Presheaf(B, [len(k) for k in keep], res, labels=labels, name=name)
    return S, PresheafMorphism(S, P, keep)


def is_closed_masks(P: Presheaf, masks) -> bool:
    B = P.base
    for m in range(B.n_mor):
        x, y = int(B.dom[m]), int(B.cod[m])
        if not masks[x][P.restrict[m][masks[y]]].all():
            return False
    return True


def all_submasks(P: Presheaf) -> list[tuple[np.ndarray, ...]]:
    """Every sub-presheaf of ``P`` as pointwise masks, in a fixed order."""
    out = []
    per = [list(itertools.product([False, True], repeat=n)) for n in P.sizes]
    for choice in itertools.product(*per):
        masks = tuple(np.array(c, dtype=bool) for c in choice)
        if is_closed_masks(P, masks):
            out.append(masks)
    return out


def pullback(f: PresheafMorphism, g: PresheafMorphism) -> tuple[Presheaf, PresheafMorphism, PresheafMorphism]:
    """``A x_C B`` for ``f: A -> C`` and ``g: B -> C``, with both projections."""
    X, p1, p2 = product(f.source, g.source)
    masks = [f.components[c][p1.components[c]] == g.components[c][p2.components[c]]
             for c in range(len(X.sizes))]
    S, inc = subpresheaf(X, masks)
    return S, p1 @ inc, p2 @ inc


def preimage_masks(f: PresheafMorphism, masks) -> tuple[np.ndarray, ...]:
    return tuple(np.asarray(m, dtype=bool)[c] for m, c in zip(masks, f.components))


def image_factor(f: PresheafMorphism) -> tuple[PresheafMorphism, PresheafMorphism]:
    """``f = m o e`` with ``e`` pointwise onto and ``m`` the image inclusion."""
    S, m = subpresheaf(f.target, f.image_masks())
    comps = []
    for c, comp in enumerate(f.components):
        index = np.full(f.target.sizes[c], -1, dtype=np.int64)
        index[m.components[c]] = np.arange(S.sizes[c])
        comps.append(index[comp])
    return PresheafMorphism(f.source, S, comps), m


def isomorphism(P: Presheaf, Q: Presheaf) -> PresheafMorphism | None:
    """An isomorphism ``P -> Q`` from canonical forms, or None."""
    (kp, pp), (kq, pq) = P.canonical, Q.canonical
    if kp != kq:
        return None
    return PresheafMorphism(P, Q, [np.argsort(b)[a] if len(a) else a for a, b in zip(pp, pq)])


# ---------------------------------------------------------- enumeration
def enumerate_presheaves(B: FinCategory, bounds: Sequence[int]) -> list[Presheaf]:
    """One presheaf per iso class with ``|P(c)| <= bounds[c]``, canonically ordered."""
    arrows = [m for m in range(B.n_mor) if not B.is_identity(m)]
    seen = {}
    for sizes in itertools.product(*(range(b + 1) for b in bounds)):
        choices = [all_functions(sizes[int(B.cod[m])], sizes[int(B.dom[m])]) for m in arrows]
        if any(len(c) == 0 for c in choices):
            continue
        for pick in itertools.product(*(range(len(c)) for c in choices)):
            res = [np.arange(sizes[int(B.cod[m])]) if B.is_identity(m) else None for m in range(B.n_mor)]
            for m, k, c in zip(arrows, pick, choices):
                res[m] = c[k]
            P = Presheaf(B, sizes, res)
            if not P.validate().ok:
                continue
            key = P.canonical[0]
            if key not in seen:
                seen[key] = P
    return [canonical_form(seen[k]) for k in sorted(seen)]


def canonical_form(P: Presheaf) -> Presheaf:
    """The relabeled copy of ``P`` realizing its canonical key."""
    B = P.base
    _, perms = P.canonical
    inv = [np.argsort(p) if len(p) else p for p in perms]
    res = []
    for m in range(B.n_mor):
        x, y = int(B.dom[m]), int(B.cod[m])
        res.append(perms[x][P.restrict[m][inv[y]]] if P.sizes[y] else np.zeros(0, dtype=np.int64))
    labels = [tuple(P.labels[c][i] for i in inv[c]) for c in range(B.n_obj)]
    return Presheaf(B, P.sizes, res, labels=labels, name=P.name)


def subobject_closure(presheaves: Sequence[Presheaf]) -> list[Presheaf]:
    """The given presheaves together with all their sub-presheaves, up to iso."""
    seen: dict = {}
    order = []
    for P in presheaves:
        for masks in all_submasks(P):
            S, _ = subpresheaf(P, masks)
            k = S.canonical[0]
            if k not in seen:
                seen[k] = S
                order.append(k)
        k = P.canonical[0]
        seen[k] = P  # keep the named original as representative
    return [seen[k] if seen[k].name else canonical_form(seen[k]) for k in sorted(seen, key=lambda k: (sum(k[0]), k))]


# ---------------------------------------------------------- exponentials
def _yoneda_map(B: FinCategory, f: int) -> PresheafMorphism:
    """``y(f): y(x) -> y(c)`` for ``f: x -> c``, postcomposition with ``f``."""
    x, c = int(B.dom[f]), int(B.cod[f])
    Yx, Yc = representable(B, x), representable(B, c)
    comps = []
    for d in range(B.n_obj):
        if len(B.hom(d, x)):
            comps.append(B.loc[B.block(d, x, c)[B.loc[f], :]])
        else:
            comps.append(np.zeros(0, dtype=np.int64))
    return PresheafMorphism(Yx, Yc, comps)


class Exponential:
    """``Q^P`` with ``Q^P(c) = Nat(y(c) x P, Q)`` and its evaluation map.

    ``families[c]`` holds the natural transformations at ``c`` as flat rows.
    """

    def __init__(self, P: Presheaf, Q: Presheaf):
        B = P.base
        self.P, self.Q = P, Q
        self.families: list[np.ndarray] = []
        self.products: list[tuple] = []
        for c in range(B.n_obj):
            X = product(representable(B, c), P)
            self.products.append(X)
            self.families.append(nat_homs(X[0], Q))
        sizes = [len(f) for f in self.families]
        if sum(sizes) > max_mor():
            raise BoundExceeded(f"exponential {Q.short()}^{P.short()}", sum(sizes), max_mor())
        index = [{r.tobytes(): i for i, r in enumerate(f)} for f in self.families]
        res = []
        for m in range(B.n_mor):
            x, y = int(B.dom[m]), int(B.cod[m])
            # alpha at y restricts to alpha o (y(m) x P) at x
            pull = product_map(_yoneda_map(B, m), identity(P))
            flat = pull.row()
            arr = np.array([index[x][np.ascontiguousarray(a[flat]).tobytes()] for a in self.families[y]],
                           dtype=np.int64)
            res.append(arr.reshape(-1))
        self.presheaf = Presheaf(B, sizes, res, name=f"{Q.short()}^{P.short()}")
        self.index = index

    def evaluation(self) -> PresheafMorphism:
        """``ev: Q^P x P -> Q``, ``(alpha, p) -> alpha_c(id_c, p)``."""
        B, P, Q = self.P.base, self.P, self.Q
        E = self.presheaf
        X, _, _ = product(E, P)
        comps = []
        for c in range(B.n_obj):
            Yc = self.products[c][0]
            out = np.empty(X.sizes[c], dtype=np.int64)
            id_pos = int(B.loc[B.ident[c]])
            for i in range(E.sizes[c]):
                alpha = self.families[c][i]
                for p in range(P.sizes[c]):
                    flat = Yc.offsets[c] + id_pos * P.sizes[c] + p
                    out[i * P.sizes[c] + p] = alpha[flat] - Q.offsets[c]
            comps.append(out)
        return PresheafMorphism(X, Q, comps, name="ev")

    def curry(self, A: Presheaf, f: PresheafMorphism) -> PresheafMorphism:
        """Transpose ``f: A x P -> Q`` to ``A -> Q^P``: ``a -> ((h, p) -> f(A(h) a, p))``."""
        B, P = self.P.base, self.P
        comps = []
        for c in range(B.n_obj):
            Yc = self.products[c][0]
            out = np.empty(A.sizes[c], dtype=np.int64)
            for a in range(A.sizes[c]):
                row = np.empty(Yc.total, dtype=np.int64)
                for d in range(B.n_obj):
                    for hi, h in enumerate(B.hom(d, c)):
                        ad = int(A.restrict[int(h)][a])
                        for q in range(P.sizes[d]):
                            row[Yc.offsets[d] + hi * P.sizes[d] + q] = \
                                f.components[d][ad * P.sizes[d] + q] + self.Q.offsets[d]
                out[a] = self.index[c][row.tobytes()]
            comps.append(out)
        return PresheafMorphism(A, self.presheaf, comps)


def exponential(P: Presheaf, Q: Presheaf) -> Exponential:
    return Exponential(P, Q)


def power_object(P: Presheaf, omega: Presheaf) -> Presheaf:
    """``Omega^P``, the power object of ``P``."""
    return Exponential(P, omega).presheaf


def check_exponential(P: Presheaf, Q: Presheaf, tests: Sequence[Presheaf]) -> ValidationReport:
    """Currying is a bijection ``Nat(A x P, Q) -> Nat(A, Q^P)`` inverted by evaluation, for each ``A``."""
    ex = Exponential(P, Q)
    rep = ValidationReport(subject=f"exponential {ex.presheaf.short()}")
    rep.merge(ex.presheaf.validate())
    ev = ex.evaluation()
    rep.check("evaluation natural", ev.is_natural())
    for A in tests:
        AP = product(A, P)[0]
        lhs = nat_hom_morphisms(AP, Q)
        rhs = nat_homs(A, ex.presheaf)
        seen = set()
        for f in lhs:
            g = ex.curry(A, f)
            if not g.is_natural():
                rep.add("curried map natural", A.short())
                continue
            seen.add(g.row().tobytes())
            back = ev @ product_map(g, identity(P))
            if back != f:
                rep.add("ev o (curry f x P) = f", A.short())
        if len(seen) != len(lhs) or len(lhs) != len(rhs):
            rep.add("currying bijection", A.short(), detail=f"|Nat(AxP,Q)|={len(lhs)}, |Nat(A,Q^P)|={len(rhs)}")
    return rep
