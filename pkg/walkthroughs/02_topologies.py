"""Lawvere-Tierney topologies on presheaves over the walking arrow, their dfs's and sheafification."""

from facto.fincat import walking_arrow
from facto.ortho import verify_dfs
from facto.topos.cartesian import dfs_to_lt
from facto.topos.omega import enumerate_lt
from facto.topos.sheaves import is_sheaf, sheafify
from facto.topos.window import PresheafTopos

T = PresheafTopos(walking_arrow())
print(T.window.describe())
for k in enumerate_lt(T.B, T.om):
    D = T.dfs_of(k)
    k2, rep = dfs_to_lt(T, D)
    sheaves = [P.short() for P in T.window.presheaves if is_sheaf(k, P)]
    print(k.describe())
    print("  dfs:", verify_dfs(T.C, D.E, D.J, D.M).ok, " generates k back:", k2 == k,
          " sheaves in window:", len(sheaves))
    for P in T.window.presheaves[1:4]:
        print(f"  a({P.short()}) has sizes {sheafify(k, P).sheaf.sizes}, was {P.sizes}")
