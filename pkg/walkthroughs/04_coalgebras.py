"""Coalgebras for y(a) x (-): the slice over y(a), and extension of every topology to it."""

import time

from facto.coalgebra import flagship_instance, flagship_sweep

t = time.perf_counter()
T, wc, CT = flagship_instance()
print(T.window.describe())
print(CT.window.describe())
for row in flagship_sweep(T, CT):
    r = row["report"]
    print(f"{row['k'].name}: k_G = k~ {r.checks.get('k_G = k~')}, report ok {r.ok}")
print(f"{time.perf_counter() - t:.1f} s")
