"""Start from a lopsided allocation, walk narrowing transfers to stability,
then compare with the flow solver and read off the layer partition."""

from spd_alloc import compute_layers, format_profile, profile, solve_stable_ind, validate_instance
from spd_alloc.model import Allocation
from spd_alloc.transfers import apply_transfer, find_narrowing_transfer

inst = validate_instance(
    [
        [1, 1, 1, 1, 0, 0],
        [1, 1, 0, 0, 1, 0],
        [0, 1, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 1],
    ]
)

alloc = Allocation.from_owner([0, 0, 0, 0, 1, 2], inst.n)
print("start      ", format_profile(profile(inst, alloc)))
while (path := find_narrowing_transfer(inst, alloc)) is not None:
    alloc = apply_transfer(alloc, path)
    print(f"{str(path):40s} -> {format_profile(profile(inst, alloc))}")

flow = solve_stable_ind(inst)
print("flow solver", format_profile(profile(inst, flow)))

print()
print(compute_layers(inst, flow).format())
