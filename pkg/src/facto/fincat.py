"""Finite categories with dense integer ids.

Objects are ``0..n_obj-1`` and morphisms ``0..n_mor-1``.  Composition is
stored blockwise: ``block(x, y, z)`` is an integer array of shape
``(|H(y,z)|, |H(x,y)|)`` whose entry ``[i, j]`` is the global id of
``hom(y,z)[i] o hom(x,y)[j]``.  Blocks are built lazily, so categories whose
full composition table would be large stay cheap until queried.

Three storage modes exist:

* table: composites given explicitly (parsed specs, small examples),
* concrete: morphisms are element maps between finite sorted sets, and
  composition is array indexing (finite sets, presheaf windows),
* over: morphisms are a subset of another category's morphisms
  (subcategories, algebra and coalgebra categories, slices).
"""

from __future__ import annotations

import itertools
import os
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import BoundExceeded, MissingComposite, NotComposable
from .report import ValidationReport

_CODE_LIMIT = 2**62


def max_mor() -> int:
    """Morphism bound, overridable through ``FACTO_MAX_MOR``."""
    return int(os.environ.get("FACTO_MAX_MOR", "20000"))


def encode_rows(rows: np.ndarray, base: int) -> np.ndarray | None:
    """Encode integer rows as int64 codes (first entry most significant).

    Lexicographic order of rows equals numeric order of codes.  Returns None
    when the codes would overflow.
    """
    rows = np.asarray(rows)
    n = rows.shape[-1]
    if n == 0:
        return np.zeros(rows.shape[:-1], dtype=np.int64)
    if max(base, 1) ** n >= _CODE_LIMIT:
        return None
    code = np.zeros(rows.shape[:-1], dtype=np.int64)
    for i in range(n):
        code = code * base + rows[..., i]
    return code


class FinCategory:
    """A finite category."""

    def __init__(self, objects: Sequence, dom: np.ndarray, cod: np.ndarray, ident: np.ndarray,
                 names: Sequence[str], name: str = "C", obj_data: Sequence | None = None):
        self.name = name
        self.objects = tuple(str(o) for o in objects)
        self.n_obj = len(self.objects)
        self.dom = np.asarray(dom, dtype=np.int64)
        self.cod = np.asarray(cod, dtype=np.int64)
        self.ident = np.asarray(ident, dtype=np.int64)
        self.n_mor = len(self.dom)
        self.names = list(names)
        self.obj_data = list(obj_data) if obj_data is not None else None
        if self.n_mor > max_mor():
            raise BoundExceeded(f"category {name}", self.n_mor, max_mor())
        order = np.lexsort((np.arange(self.n_mor), self.cod, self.dom))
        self._homs: dict[tuple[int, int], np.ndarray] = {}
        self.loc = np.zeros(self.n_mor, dtype=np.int64)
        keys = self.dom[order] * max(self.n_obj, 1) + self.cod[order]
        if self.n_mor:
            cuts = np.flatnonzero(np.diff(keys)) + 1
            for chunk in np.split(order, cuts):
                x, y = int(self.dom[chunk[0]]), int(self.cod[chunk[0]])
                self._homs[(x, y)] = chunk.astype(np.int64)
                self.loc[chunk] = np.arange(len(chunk))
        self._empty = np.zeros(0, dtype=np.int64)
        self._blocks: dict[tuple[int, int, int], np.ndarray] = {}
        self._obj_index = {o: i for i, o in enumerate(self.objects)}
        self._mor_index: dict[str, int] | None = None
        self.mode = "abstract"
        self.op_of: FinCategory | None = None
        # concrete mode
        self.sizes: np.ndarray | None = None
        self._rows: dict[tuple[int, int], np.ndarray] = {}
        self._codes: dict[tuple[int, int], np.ndarray | None] = {}
        self._rowdict: dict[tuple[int, int], dict[bytes, int]] = {}
        # over mode
        self.base: FinCategory | None = None
        self.under_obj: np.ndarray | None = None
        self.underlying: np.ndarray | None = None
        self._table: dict[tuple[int, int], int] = {}
        self._block_fn: Callable[[int, int, int], np.ndarray] | None = None
        self.cache: dict = {}

    # ------------------------------------------------------------------ builders
    @classmethod
    def from_table(cls, objects: Sequence[str], morphisms: Sequence[tuple[str, str, str]],
                   compose: Mapping[tuple[str, str], str] | None = None,
                   identities: Mapping[str, str] | None = None, name: str = "C") -> "FinCategory":
        """Build from named morphisms and an explicit composition table.

        ``compose[(g, f)] = h`` means ``g o f = h``.  Identities are implicit
        and named ``id_<obj>`` unless ``identities`` says otherwise.  Unit
        composites are filled in unless the table rebinds them.
        """
        objects = list(objects)
        oi = {o: i for i, o in enumerate(objects)}
        identities = dict(identities or {})
        names, dom, cod = [], [], []
        for o in objects:
            names.append(identities.get(o, f"id_{o}"))
            dom.append(oi[o])
            cod.append(oi[o])
        for (m, a, b) in morphisms:
            names.append(m)
            dom.append(oi[a])
            cod.append(oi[b])
        C = cls(objects, np.array(dom), np.array(cod), np.arange(len(objects)), names, name=name)
        C.mode = "table"
        mi = C.mor_index_map()
        table: dict[tuple[int, int], int] = {}
        for f in range(C.n_mor):
            table[(f, int(C.ident[C.dom[f]]))] = f
            table[(int(C.ident[C.cod[f]]), f)] = f
        for (g, f), h in (compose or {}).items():
            table[(mi[g], mi[f])] = mi[h]
        C._table = table
        return C

    @classmethod
    def concrete(cls, objects: Sequence, sizes: Sequence[int], homs: Mapping[tuple[int, int], np.ndarray],
                 name: str = "C", obj_data: Sequence | None = None,
                 names: Callable[[int, int, int], str] | None = None) -> "FinCategory":
        """Build a category of element maps.

        ``sizes[x]`` is the number of elements of object ``x`` and
        ``homs[(x, y)]`` a 2-d array whose rows are the admitted maps.  Rows are
        sorted lexicographically; ids are contiguous per hom-set.
        """
        n = len(objects)
        sizes = np.asarray(sizes, dtype=np.int64)
        rows_by, dom, cod = {}, [], []
        total = 0
        for x in range(n):
            for y in range(n):
                r = homs.get((x, y))
                if r is None:
                    r = np.zeros((0, sizes[x]), dtype=np.int64)
                r = np.asarray(r, dtype=np.int64)
                if r.ndim != 2:
                    r = r.reshape(-1, int(sizes[x])) if sizes[x] else np.zeros((len(r), 0), dtype=np.int64)
                if len(r):
                    r = np.unique(r, axis=0)
                rows_by[(x, y)] = r
                total += len(r)
                if total > max_mor():
                    raise BoundExceeded(f"category {name}", total, max_mor())
                dom.extend([x] * len(r))
                cod.extend([y] * len(r))
        ident = np.zeros(n, dtype=np.int64)
        mnames = []
        start = 0
        for x in range(n):
            for y in range(n):
                r = rows_by[(x, y)]
                for i in range(len(r)):
                    mnames.append(names(x, y, i) if names else f"m{start + i}")
                if x == y:
                    idrow = np.arange(sizes[x])
                    hit = np.flatnonzero((r == idrow).all(axis=1)) if len(r) else []
                    if len(hit) != 1:
                        raise ValueError(f"identity missing on object {objects[x]}")
                    ident[x] = start + hit[0]
                start += len(r)
        C = cls(objects, np.array(dom, dtype=np.int64), np.array(cod, dtype=np.int64), ident, mnames,
                name=name, obj_data=obj_data)
        C.mode = "concrete"
        C.sizes = sizes
        C._rows = rows_by
        for (x, y), r in rows_by.items():
            C._codes[(x, y)] = encode_rows(r, int(sizes[y]))
        return C

    @classmethod
    def over(cls, base: "FinCategory", objects: Sequence, under_obj: Sequence[int],
             homs: Mapping[tuple[int, int], Sequence[int]], name: str = "C",
             obj_data: Sequence | None = None, names: Callable[[int, int, int, int], str] | None = None
             ) -> "FinCategory":
        """Category whose morphisms are selected morphisms of ``base``.

        ``homs[(x, y)]`` lists base morphisms ``under_obj[x] -> under_obj[y]``.
        The selection must be closed under composition and contain identities.
        """
        n = len(objects)
        under_obj = np.asarray(under_obj, dtype=np.int64)
        dom, cod, under, mnames = [], [], [], []
        for x in range(n):
            for y in range(n):
                r = np.unique(np.asarray(homs.get((x, y), []), dtype=np.int64))
                for i, b in enumerate(r):
                    mnames.append(names(x, y, i, int(b)) if names else base.names[b])
                dom.extend([x] * len(r))
                cod.extend([y] * len(r))
                under.extend(r.tolist())
                if len(dom) > max_mor():
                    raise BoundExceeded(f"category {name}", len(dom), max_mor())
        dom_a = np.array(dom, dtype=np.int64)
        cod_a = np.array(cod, dtype=np.int64)
        under_a = np.array(under, dtype=np.int64)
        ident = np.zeros(n, dtype=np.int64)
        for x in range(n):
            hit = np.flatnonzero((dom_a == x) & (cod_a == x) & (under_a == base.ident[under_obj[x]]))
            if len(hit) != 1:
                raise ValueError(f"identity missing on object {objects[x]}")
            ident[x] = hit[0]
        C = cls(objects, dom_a, cod_a, ident, mnames, name=name, obj_data=obj_data)
        C.mode = "over"
        C.base = base
        C.under_obj = under_obj
        C.underlying = under_a
        return C

    # ------------------------------------------------------------------ access
    def hom(self, x: int, y: int) -> np.ndarray:
        return self._homs.get((x, y), self._empty)

    def homs_from(self, x: int) -> np.ndarray:
        return np.flatnonzero(self.dom == x)

    def homs_to(self, y: int) -> np.ndarray:
        return np.flatnonzero(self.cod == y)

    def obj(self, label) -> int:
        if isinstance(label, (int, np.integer)):
            return int(label)
        return self._obj_index[label]

    def mor_index_map(self) -> dict[str, int]:
        if self._mor_index is None:
            self._mor_index = {}
            for i, nm in enumerate(self.names):
                self._mor_index.setdefault(nm, i)
        return self._mor_index

    def mor(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        return self.mor_index_map()[name]

    def is_identity(self, m: int) -> bool:
        return bool(self.ident[self.dom[m]] == m)

    def block(self, x: int, y: int, z: int) -> np.ndarray:
        key = (x, y, z)
        b = self._blocks.get(key)
        if b is None:
            b = self._build_block(x, y, z)
            self._blocks[key] = b
        return b

    def _build_block(self, x: int, y: int, z: int) -> np.ndarray:
        hxy, hyz, hxz = self.hom(x, y), self.hom(y, z), self.hom(x, z)
        shape = (len(hyz), len(hxy))
        if shape[0] == 0 or shape[1] == 0:
            return np.zeros(shape, dtype=np.int64)
        if self._block_fn is not None:
            return self._block_fn(x, y, z)
        if self.mode == "table":
            out = np.full(shape, -1, dtype=np.int64)
            for i, g in enumerate(hyz):
                for j, f in enumerate(hxy):
                    out[i, j] = self._table.get((int(g), int(f)), -1)
            return out
        if self.mode == "concrete":
            G = self._rows[(y, z)]
            F = self._rows[(x, y)]
            comp = G[:, F]  # (ng, nf, sx)
            return self._lookup_rows(x, z, comp)
        if self.mode == "over":
            B = self.base
            ux, uy, uz = (int(self.under_obj[t]) for t in (x, y, z))
            ub = B.block(ux, uy, uz)[np.ix_(B.loc[self.underlying[hyz]], B.loc[self.underlying[hxy]])]
            targets = self.underlying[hxz]
            order = np.argsort(targets)
            pos = np.searchsorted(targets[order], ub)
            pos = np.minimum(pos, len(targets) - 1) if len(targets) else pos
            ok = len(targets) > 0 and bool((targets[order][pos] == ub).all())
            if not ok:
                raise MissingComposite(f"selection in {self.name} not closed under composition at {(x, y, z)}")
            return hxz[order[pos]]
        if self.mode == "opposite":
            return self.op_of.block(z, y, x).T.copy()
        raise MissingComposite(f"no composition data for {(x, y, z)}")

    def _lookup_rows(self, x: int, z: int, comp: np.ndarray) -> np.ndarray:
        """Map element-map rows ``x -> z`` (any leading shape) to global ids."""
        base_ids = self.hom(x, z)
        codes = self._codes.get((x, z))
        lead = comp.shape[:-1]
        if codes is not None:
            c = encode_rows(comp, int(self.sizes[z]))
            pos = np.searchsorted(codes, c)
            pos = np.minimum(pos, max(len(codes) - 1, 0))
            if len(codes) == 0 or not (codes[pos] == c).all():
                raise MissingComposite(f"composite {x}->{z} missing from {self.name}")
            return base_ids[pos]
        d = self._rowdict.get((x, z))
        if d is None:
            d = {r.tobytes(): i for i, r in enumerate(self._rows[(x, z)])}
            self._rowdict[(x, z)] = d
        flat = comp.reshape(-1, comp.shape[-1]).astype(np.int64)
        out = np.empty(len(flat), dtype=np.int64)
        for i, r in enumerate(flat):
            j = d.get(r.tobytes())
            if j is None:
                raise MissingComposite(f"composite {x}->{z} missing from {self.name}")
            out[i] = base_ids[j]
        return out.reshape(lead)

    def compose(self, g: int, f: int) -> int:
        """``g o f``."""
        if self.cod[f] != self.dom[g]:
            raise NotComposable(f"{self.names[g]} o {self.names[f]}: {self.objects[self.cod[f]]} != "
                                f"{self.objects[self.dom[g]]}")
        x, y, z = int(self.dom[f]), int(self.cod[f]), int(self.cod[g])
        h = int(self.block(x, y, z)[self.loc[g], self.loc[f]])
        if h < 0:
            raise MissingComposite(f"{self.names[g]} o {self.names[f]} is not defined")
        return h

    def chain(self, *ms: int) -> int:
        """Compose right to left: ``chain(h, g, f) = h o g o f``."""
        out = ms[-1]
        for m in reversed(ms[:-1]):
            out = self.compose(m, out)
        return out

    # concrete helpers
    def row(self, m: int) -> np.ndarray:
        return self._rows[(int(self.dom[m]), int(self.cod[m]))][self.loc[m]]

    def find_row(self, x: int, y: int, row) -> int | None:
        r = np.asarray(row, dtype=np.int64)
        try:
            return int(self._lookup_rows(x, y, r[None, :])[0])
        except MissingComposite:
            return None

    def mask(self, ids: Iterable[int]) -> np.ndarray:
        out = np.zeros(self.n_mor, dtype=bool)
        ids = np.fromiter((int(i) for i in ids), dtype=np.int64)
        out[ids] = True
        return out

    def describe(self, m: int) -> str:
        return f"{self.names[m]}: {self.objects[self.dom[m]]} -> {self.objects[self.cod[m]]}"

    def __repr__(self) -> str:
        return f"FinCategory({self.name!r}, objects={self.n_obj}, morphisms={self.n_mor})"


# ---------------------------------------------------------------------- checks
def validate_category(C: FinCategory, max_witnesses: int = 50) -> ValidationReport:
    """Check totality, typing, unit laws and associativity."""
    rep = ValidationReport(subject=f"category {C.name}", max_witnesses=max_witnesses)
    n = C.n_obj
    for x in range(n):
        i = C.ident[x]
        if C.dom[i] != x or C.cod[i] != x:
            rep.add("identity typing", C.objects[x])
    unit_bad = set()
    for x in range(n):
        for y in range(n):
            h = C.hom(x, y)
            if not len(h):
                continue
            right = C.block(x, x, y)[:, C.loc[C.ident[x]]]
            left = C.block(x, y, y)[C.loc[C.ident[y]], :]
            for k in np.flatnonzero(right != h):
                unit_bad.add((int(h[k]), int(C.ident[x])))
                rep.add("identity law", C.names[h[k]], detail=f"{C.names[h[k]]} o id != {C.names[h[k]]}")
            for k in np.flatnonzero(left != h):
                unit_bad.add((int(C.ident[y]), int(h[k])))
                rep.add("identity law", C.names[h[k]], detail=f"id o {C.names[h[k]]} != {C.names[h[k]]}")
    typed = True
    for x, y, z in itertools.product(range(n), repeat=3):
        b = C.block(x, y, z)
        if b.size == 0:
            continue
        hxy, hyz = C.hom(x, y), C.hom(y, z)
        for i, j in np.argwhere(b < 0):
            rep.add("missing composite", C.names[hyz[i]], C.names[hxy[j]])
        good = b >= 0
        safe = np.where(good, b, 0)
        bad = good & ((C.dom[safe] != x) | (C.cod[safe] != z))
        for i, j in np.argwhere(bad):
            typed = False
            if (int(hyz[i]), int(hxy[j])) not in unit_bad:
                rep.add("composite typing", C.names[hyz[i]], C.names[hxy[j]])
    if rep.n_violations:
        rep.note("associativity check skipped for ill-typed, partial or non-unital tables")
        return rep
    rep.check("typed", typed)
    for w, x, y, z in itertools.product(range(n), repeat=4):
        if not (len(C.hom(w, x)) and len(C.hom(x, y)) and len(C.hom(y, z))):
            continue
        gf = C.loc[C.block(w, x, y)]            # (ng, nf) local in H(w,y)
        hg = C.loc[C.block(x, y, z)]            # (nh, ng) local in H(x,z)
        left = C.block(w, y, z)[:, gf]          # (nh, ng, nf)
        right = C.block(w, x, z)[hg, :]         # (nh, ng, nf)
        bad = np.argwhere(left != right)
        for a, b, c in bad[:max_witnesses]:
            rep.add("associativity", C.names[C.hom(y, z)[a]], C.names[C.hom(x, y)[b]], C.names[C.hom(w, x)[c]])
        if len(bad) > max_witnesses:
            rep.n_violations += len(bad) - max_witnesses
    return rep


def mono_mask(C: FinCategory) -> np.ndarray:
    """Boolean mask of monomorphisms (left cancellable)."""
    if "mono" in C.cache:
        return C.cache["mono"]
    out = np.ones(C.n_mor, dtype=bool)
    for x, a, b in itertools.product(range(C.n_obj), repeat=3):
        blk = C.block(x, a, b)
        if blk.shape[1] < 2 or blk.shape[0] == 0:
            continue
        s = np.sort(blk, axis=1)
        dup = (np.diff(s, axis=1) == 0).any(axis=1)
        out[C.hom(a, b)[dup]] = False
    C.cache["mono"] = out
    return out


def epi_mask(C: FinCategory) -> np.ndarray:
    """Boolean mask of epimorphisms (right cancellable)."""
    if "epi" in C.cache:
        return C.cache["epi"]
    out = np.ones(C.n_mor, dtype=bool)
    for a, b, y in itertools.product(range(C.n_obj), repeat=3):
        blk = C.block(a, b, y)
        if blk.shape[0] < 2 or blk.shape[1] == 0:
            continue
        s = np.sort(blk, axis=0)
        dup = (np.diff(s, axis=0) == 0).any(axis=0)
        out[C.hom(a, b)[dup]] = False
    C.cache["epi"] = out
    return out


def iso_mask(C: FinCategory) -> np.ndarray:
    if "iso" in C.cache:
        return C.cache["iso"]
    out = np.zeros(C.n_mor, dtype=bool)
    for a in range(C.n_obj):
        for b in range(C.n_obj):
            hab, hba = C.hom(a, b), C.hom(b, a)
            if not len(hab) or not len(hba):
                continue
            m1 = C.block(a, b, a) == C.ident[a]      # [g, f]: g o f = id_a
            m2 = C.block(b, a, b) == C.ident[b]      # [f, g]: f o g = id_b
            out[hab] = (m1 & m2.T).any(axis=0)
    C.cache["iso"] = out
    return out


def is_mono(C: FinCategory, f: int) -> bool:
    return bool(mono_mask(C)[f])


def is_epi(C: FinCategory, f: int) -> bool:
    return bool(epi_mask(C)[f])


def is_iso(C: FinCategory, f: int) -> bool:
    return bool(iso_mask(C)[f])


def inverse(C: FinCategory, f: int) -> int | None:
    a, b = int(C.dom[f]), int(C.cod[f])
    for g in C.hom(b, a):
        if C.compose(g, f) == C.ident[a] and C.compose(f, g) == C.ident[b]:
            return int(g)
    return None


def isos_between(C: FinCategory, a: int, b: int) -> np.ndarray:
    h = C.hom(a, b)
    return h[iso_mask(C)[h]]


def opposite(C: FinCategory) -> FinCategory:
    """The opposite category, sharing morphism ids with ``C``."""
    if C.mode == "opposite" and C.op_of is not None:
        return C.op_of
    if "op" in C.cache:
        return C.cache["op"]
    D = FinCategory(C.objects, C.cod, C.dom, C.ident, C.names, name=f"{C.name}^op", obj_data=C.obj_data)
    D.mode = "opposite"
    D.op_of = C
    C.cache["op"] = D
    return D


def same_tables(C: FinCategory, D: FinCategory) -> bool:
    """Structural equality: same objects, typing, identities and composites."""
    if C.objects != D.objects or C.n_mor != D.n_mor:
        return False
    if not (np.array_equal(C.dom, D.dom) and np.array_equal(C.cod, D.cod) and np.array_equal(C.ident, D.ident)):
        return False
    for x, y, z in itertools.product(range(C.n_obj), repeat=3):
        if not np.array_equal(C.block(x, y, z), D.block(x, y, z)):
            return False
    return True


def full_subcategory(C: FinCategory, objs: Sequence[int], name: str | None = None) -> FinCategory:
    objs = [int(o) for o in objs]
    homs = {(i, j): C.hom(a, b) for i, a in enumerate(objs) for j, b in enumerate(objs)}
    return FinCategory.over(C, [C.objects[o] for o in objs], objs, homs, name=name or f"{C.name}|full",
                            obj_data=[C.obj_data[o] for o in objs] if C.obj_data else None)


# -------------------------------------------------------------------- examples
def terminal_category() -> FinCategory:
    return FinCategory.from_table(["*"], [], name="1")


def walking_arrow() -> FinCategory:
    """``a --f--> b``."""
    return FinCategory.from_table(["a", "b"], [("f", "a", "b")], name="2")


def discrete_category(n: int) -> FinCategory:
    return FinCategory.from_table([f"o{i}" for i in range(n)], [], name=f"disc{n}")


def poset_category(elements: Sequence[str], leq: Callable[[str, str], bool], name: str = "P") -> FinCategory:
    """Thin category with an arrow ``x -> y`` whenever ``leq(x, y)``."""
    mors, comp = [], {}
    arrow = {}
    for x in elements:
        for y in elements:
            if x != y and leq(x, y):
                nm = f"{x}<{y}"
                arrow[(x, y)] = nm
                mors.append((nm, x, y))
    for (x, y), f in arrow.items():
        for (y2, z), g in arrow.items():
            if y2 == y and x != z:
                comp[(g, f)] = arrow[(x, z)]
            elif y2 == y and x == z:
                comp[(g, f)] = f"id_{x}"
    return FinCategory.from_table(list(elements), mors, comp, name=name)


def chain_category(n: int) -> FinCategory:
    """The ordinal ``0 < 1 < ... < n-1`` as a thin category."""
    els = [str(i) for i in range(n)]
    return poset_category(els, lambda a, b: int(a) <= int(b), name=f"chain{n}")


def monoid_category(elements: Sequence[str], mult: Mapping[tuple[str, str], str], unit: str,
                    name: str = "M") -> FinCategory:
    """One-object category of a finite monoid; ``mult[(g, f)] = g*f``."""
    mors = [(e, "*", "*") for e in elements if e != unit]
    comp = {(g, f): mult[(g, f)] for g in elements for f in elements if g != unit and f != unit}
    return FinCategory.from_table(["*"], mors, comp, identities={"*": unit}, name=name)


def all_functions(m: int, n: int) -> np.ndarray:
    """All maps ``{0..m-1} -> {0..n-1}`` as rows, lexicographic."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if n == 0:
        return np.zeros((0, m), dtype=np.int64)
    grids = np.indices((n,) * m).reshape(m, -1).T
    return grids.astype(np.int64)


def finset(n: int, sizes: Sequence[int] | None = None, name: str | None = None) -> FinCategory:
    """Finite sets ``{0..k-1}`` for ``k`` in ``sizes`` (default ``0..n``) with all maps."""
    sizes = list(range(n + 1)) if sizes is None else list(sizes)
    homs = {(i, j): all_functions(a, b) for i, a in enumerate(sizes) for j, b in enumerate(sizes)}
    return FinCategory.concrete([str(s) for s in sizes], sizes, homs, name=name or f"FinSet<={n}",
                                obj_data=list(sizes))


def preorder_spaces(max_points: int = 2) -> FinCategory:
    """Finite topological spaces up to homeomorphism, as preorders with monotone maps.

    A finite space is the same as a preorder (its specialization order) and a
    continuous map is a monotone map.  Useful as a non-balanced category.
    """
    reps = []
    seen = set()
    for n in range(max_points + 1):
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        for bits in itertools.product([0, 1], repeat=len(pairs)):
            rel = np.eye(n, dtype=bool)
            for (i, j), b in zip(pairs, bits):
                rel[i, j] = bool(b)
            # transitive
            if n and not (((rel.astype(int) @ rel.astype(int)) > 0) <= rel).all():
                continue
            canon = min(tuple(rel[np.ix_(p, p)].flatten().tolist()) for p in itertools.permutations(range(n)))
            if (n, canon) in seen:
                continue
            seen.add((n, canon))
            reps.append(np.array(canon, dtype=bool).reshape(n, n))
    labels = [_preorder_label(r) for r in reps]
    homs = {}
    for i, r in enumerate(reps):
        for j, s in enumerate(reps):
            fs = all_functions(len(r), len(s))
            keep = []
            for f in fs:
                ok = all(s[f[a], f[b]] for a in range(len(r)) for b in range(len(r)) if r[a, b])
                keep.append(ok)
            homs[(i, j)] = fs[np.array(keep, dtype=bool)] if len(fs) else fs
    return FinCategory.concrete(labels, [len(r) for r in reps], homs, name=f"FinTop<={max_points}",
                                obj_data=reps)


def _preorder_label(rel: np.ndarray) -> str:
    n = len(rel)
    if n == 0:
        return "0"
    rels = [f"{i}<{j}" for i in range(n) for j in range(n) if i != j and rel[i, j]]
    return f"{n}" + ("[" + ",".join(rels) + "]" if rels else "")
