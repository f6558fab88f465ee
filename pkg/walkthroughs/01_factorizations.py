"""Factorization systems on finite sets: (Epi, Mono), a failing triple, and a 2-out-of-3 failure."""

from facto.fincat import finset
from facto.ortho import (Dfs, epi_class, factorize_fs, iso_class, mono_class, perp_right, qfs_hypotheses,
                         two_out_of_three_failures, verify_dfs, verify_fs)

C = finset(3)
E, M, I = epi_class(C), mono_class(C), iso_class(C)
print(C)
print("(Epi, Mono) fs:", verify_fs(C, E, M).ok)
print("Epi^perp == Mono:", perp_right(C, E) == M)

f = C.hom(3, 2)[5]
e, m = factorize_fs(C, int(f), E, M)
print(f"{C.describe(int(f))} = {C.describe(m)} o {C.describe(e)}")

print("(Epi, Iso, Mono) dfs:", verify_dfs(C, E, I, M).ok)
rep = verify_dfs(C, E, E, M)
print("(Epi, Epi, Mono) dfs:", rep.ok, "first violation:", rep.violations[0])

D = Dfs(E, M, I, name="EMI")
print("(Epi, Mono, Iso) dfs:", verify_dfs(C, E, M, I).ok)
f, g = two_out_of_three_failures(C, D.weq())[0]
print("weak equivalences fail 2-out-of-3 at", C.describe(f), "and", C.describe(g))
print("qfs hypotheses:", qfs_hypotheses(C, D).hypothesis)
