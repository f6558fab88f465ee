"""Z/2-sets as algebras for X -> Z/2 x X, with (Epi, Mono) lifted to algebras."""

from facto.algebra import cyclic_group, forgetful_preimage, group_action_instance, lift_factorization
from facto.ortho import epi_class, mono_class, verify_fs

T, em = group_action_instance(cyclic_group(2), 4)
EM = em.category
print(f"{len(em.algebras)} Z/2-sets with at most 4 elements, {EM.n_mor} equivariant maps")
C = em.base
E, M = epi_class(C), mono_class(C)
print("(Epi, Mono) on algebras:", verify_fs(EM, forgetful_preimage(em, E), forgetful_preimage(em, M)).ok)
f = EM.n_mor - 1
lift = lift_factorization(em, f, E, M)
print(f"{EM.describe(f)} factors through {lift.middle}")
