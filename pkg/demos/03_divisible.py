"""Divisible items: the stable profile is unique and every layer's income
is a ratio of item count to agent count."""

from spd_alloc import format_allocation, format_profile, solve_stable_div, validate_instance

inst = validate_instance(
    [
        [1, 1, 1, 0, 0],
        [1, 1, 1, 1, 0],
        [0, 0, 0, 1, 1],
        [0, 0, 0, 1, 1],
        [0, 0, 0, 1, 1],
    ]
)
sol = solve_stable_div(inst)
print("profile:", format_profile(sol.profile))
for layer in sol.layers:
    agents = ",".join(str(i + 1) for i in sorted(layer.agents))
    items = ",".join(str(j + 1) for j in sorted(layer.items))
    print(f"layer {layer.index}: agents [{agents}] items [{items}]")
print()
print(format_allocation(sol.allocation))
print(f"({sol.pieces} pieces per item, {sol.augmentations} augmentations)")
