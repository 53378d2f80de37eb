"""Matroid-rank valuations: improving exchange chains may need to visit an
agent twice, and the layer structure of the additive case breaks down."""

from spd_alloc.criteria import Criterion
from spd_alloc.oracle import repeated_agent_chain
from spd_alloc.submodular import (
    apply_exchange,
    enumerate_clean_max_usw,
    find_exchange_improvement,
    optimal_sets,
    parse_sub_instance,
)

si, alloc = repeated_agent_chain()
print("incomes before:", [len(b) for b in alloc.bundles])
seq = find_exchange_improvement(si, alloc)
print("item-tracking search: ", seq)
print("agent-tracking search:", find_exchange_improvement(si, alloc, distinct_agents=True))
print("incomes after: ", [len(b) for b in apply_exchange(alloc, seq).bundles])
print()

si = parse_sub_instance("SUB 4 5\nuniform 1 2 3 4\nuniform 1 1 3\nuniform 1 1 2 4 5\nuniform 2 1 2 4\n")
allocs = enumerate_clean_max_usw(si)
for k in sorted(optimal_sets(allocs)[Criterion.LEXIMIN]):
    bundles = [sorted(j + 1 for j in b) for b in allocs[k].bundles]
    print("optimal:", bundles)
print("incomes are fixed at (1,1,1,2), yet item 1 changes hands between the two income groups")
