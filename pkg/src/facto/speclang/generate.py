"""Emit explicit composition tables as category declarations."""

from __future__ import annotations

import numpy as np

from ..fincat import FinCategory, finset, poset_category
from .syntax import Call, parse, q
from .loader import load


def category_document(C: FinCategory, name: str = "C") -> str:
    """An explicit ``category`` block with every non-unit composite listed."""
    lines = [f"category {q(name)} {{", "  objects: " + " ".join(q(o) for o in C.objects) + ";"]
    idset = set(int(i) for i in C.ident)
    for x, i in enumerate(C.ident):
        if C.names[i] != f"id_{C.objects[x]}":
            lines.append(f"  identity {q(C.objects[x])} = {q(C.names[i])};")
    for m in range(C.n_mor):
        if m not in idset:
            lines.append(f"  mor {q(C.names[m])}: {q(C.objects[C.dom[m]])} -> {q(C.objects[C.cod[m]])};")
    for f in range(C.n_mor):
        if f in idset:
            continue
        for g in C.homs_from(int(C.cod[f])):
            g = int(g)
            if g in idset:
                continue
            lines.append(f"  compose {q(C.names[g])}.{q(C.names[f])} = {q(C.names[C.compose(g, f)])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def poset_from_relations(rels: list[str], name: str = "C") -> FinCategory:
    """Thin category generated by relations ``x<y`` (reflexive-transitive closure)."""
    pairs = []
    for r in rels:
        if "<" not in r:
            raise ValueError(f"relation {r!r} is not of the form x<y")
        x, y = (s.strip() for s in r.split("<", 1))
        if not x or not y:
            raise ValueError(f"relation {r!r} is not of the form x<y")
        pairs.append((x, y))
    els = list(dict.fromkeys(e for p in pairs for e in p))
    idx = {e: i for i, e in enumerate(els)}
    leq = np.eye(len(els), dtype=bool)
    for x, y in pairs:
        leq[idx[x], idx[y]] = True
    for k in range(len(els)):
        leq |= leq[:, [k]] & leq[[k], :]
    anti = leq & leq.T & ~np.eye(len(els), dtype=bool)
    if anti.any():
        i, j = map(int, np.argwhere(anti)[0])
        raise ValueError(f"relations make {els[i]} and {els[j]} equivalent; only partial orders are supported")
    return poset_category(els, lambda a, b: bool(leq[idx[a], idx[b]]), name=name)


def generate(poset: list[str] | None = None, n_finset: int | None = None, builtin: str | None = None,
             name: str = "C") -> str:
    if poset is not None:
        C = poset_from_relations(poset, name)
    elif n_finset is not None:
        C = finset(n_finset)
    else:
        doc = parse(f"category {q(name)} = {builtin};")
        if not isinstance(doc.decls[0].expr, (Call, str)):
            raise ValueError("expected a builtin category expression")
        C = load(doc).category(name)
    return category_document(C, name)
