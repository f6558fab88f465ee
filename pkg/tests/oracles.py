"""Brute-force oracles that share no code with the package beyond plain tables.

Each function recomputes a quantity from first principles (explicit rows,
explicit sieves, explicit action tables) so tests can compare it against
the package's own routes.
"""

from __future__ import annotations

import itertools

import numpy as np


# ------------------------------------------------------------ finite sets
def finset_hom_count(n: int) -> int:
    """Number of maps between sets of size 0..n (all pairs)."""
    return sum(b ** a for a in range(n + 1) for b in range(n + 1))


def injective(row) -> bool:
    row = list(row)
    return len(set(row)) == len(row)


def surjective(row, n: int) -> bool:
    return set(row) == set(range(n))


# ------------------------------------------------------------ sieves
def _table(B):
    """Composition as a dict over ids, built from ``B.compose`` once."""
    comp = {}
    for f in range(B.n_mor):
        for g in range(B.n_mor):
            if B.cod[f] == B.dom[g]:
                comp[(g, f)] = int(B.compose(g, f))
    return comp


def sieves(B, c: int, comp=None) -> list[frozenset]:
    """All sets of arrows into ``c`` closed under precomposition, by subset search."""
    comp = comp or _table(B)
    into = [m for m in range(B.n_mor) if B.cod[m] == c]
    out = []
    for r in range(len(into) + 1):
        for S in itertools.combinations(into, r):
            S = frozenset(S)
            if all(comp[(f, h)] in S for f in S for h in range(B.n_mor) if B.cod[h] == B.dom[f]):
                out.append(S)
    return out


def pullback_sieve(B, S: frozenset, f: int, comp) -> frozenset:
    return frozenset(h for h in range(B.n_mor) if B.cod[h] == B.dom[f] and comp[(f, h)] in S)


def grothendieck_topologies(B) -> list[dict[int, frozenset]]:
    """Every Grothendieck topology on ``B``: maximal sieves, stability and transitivity checked directly."""
    comp = _table(B)
    sv = {c: sieves(B, c, comp) for c in range(B.n_obj)}
    top = {c: frozenset(m for m in range(B.n_mor) if B.cod[m] == c) for c in range(B.n_obj)}
    choices = []
    for c in range(B.n_obj):
        rest = [S for S in sv[c] if S != top[c]]
        opts = []
        for r in range(len(rest) + 1):
            for sub in itertools.combinations(rest, r):
                opts.append(frozenset(sub) | {top[c]})
        choices.append(opts)
    out = []
    for J in itertools.product(*choices):
        J = dict(enumerate(J))
        ok = all(pullback_sieve(B, S, f, comp) in J[int(B.dom[f])]
                 for c in J for S in J[c] for f in range(B.n_mor) if B.cod[f] == c)
        if ok:
            for c in range(B.n_obj):
                for R in sv[c]:
                    if R in J[c]:
                        continue
                    if any(all(pullback_sieve(B, R, f, comp) in J[int(B.dom[f])] for f in S) for S in J[c]):
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            out.append(J)
    return out


# ------------------------------------------------------------ group actions
def group_actions(table: np.ndarray, identity: int, n: int) -> list[tuple[int, ...]]:
    """All action tables ``h[g*n + x]`` of a group on ``{0..n-1}``, by exhaustive search."""
    order = len(table)
    out = []
    for h in itertools.product(range(n), repeat=order * n):
        if any(h[identity * n + x] != x for x in range(n)):
            continue
        if all(h[a * n + h[b * n + x]] == h[int(table[a, b]) * n + x]
               for a in range(order) for b in range(order) for x in range(n)):
            out.append(tuple(h))
    return out


def equivariant_maps(table_order: int, h, n: int, k, m: int) -> list[tuple[int, ...]]:
    """Maps ``{0..n-1} -> {0..m-1}`` commuting with the actions ``h`` and ``k``."""
    out = []
    for f in itertools.product(range(m), repeat=n):
        if all(f[h[g * n + x]] == k[g * m + f[x]] for g in range(table_order) for x in range(n)):
            out.append(f)
    return out


# ------------------------------------------------------------ lifting
def fillers_from_rows(f_row, g_row, u_row, v_row, f_cod: int, g_dom: int) -> int:
    """Diagonals ``d`` with ``d f = u`` and ``g d = v`` between finite sets, counted by brute force."""
    n = 0
    for d in itertools.product(range(g_dom), repeat=f_cod):
        if all(d[f_row[i]] == u_row[i] for i in range(len(f_row))) and \
                all(g_row[d[y]] == v_row[y] for y in range(f_cod)):
            n += 1
    return n
