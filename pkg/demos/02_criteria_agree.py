"""Every strongly Pigou-Dalton criterion picks the same allocations on
binary additive instances, even though the criteria disagree on profiles
in general."""

from spd_alloc import BUILTIN_CRITERIA, Criterion, compare, score
from spd_alloc.oracle import enumerate_all, random_instance
from spd_alloc.rng import XorShift64Star

p, q = (0, 5, 9), (2, 2, 10)
for c in (Criterion.CONGESTION, Criterion.ENVYSUM):
    print(f"{c.value:10s} {p}={score(c, p)}  {q}={score(c, q)}  better: {'p' if compare(c, p, q) < 0 else 'q'}")
print()

rng = XorShift64Star(7)
inst = random_instance(rng, 4, 7, 0.5)
res = enumerate_all(inst)
print(f"random 4x7 instance: {len(res.all_allocations)} clean max-welfare allocations, {len(res.stable_set)} stable")
for c in BUILTIN_CRITERIA:
    same = res.optimal[c] == res.stable_set
    print(f"  {c.value:13s} optimal set size {len(res.optimal[c]):3d}  equals stable set: {same}")
