"""Wall time of the indivisible solver as m doubles at fixed n."""

from spd_alloc.cli import bench_rows

prev = None
for m, n, _, wall, aug in bench_rows([250, 500, 1000, 2000], [200], 0.5, 1):
    ratio = f"x{wall / prev:.2f}" if prev else ""
    print(f"m={m:5d} n={n}  {wall:8.1f} ms  {aug} augmentations  {ratio}")
    prev = wall
