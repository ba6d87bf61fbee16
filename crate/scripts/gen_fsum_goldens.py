"""Correctly rounded sums (math.fsum) of random mixed-sign vectors."""
import math
import random
import sys

rng = random.Random(20240611)
out = sys.stdout
out.write("values,sum\n")
for _ in range(400):
    n = rng.randint(1, 12)
    vals = []
    for _ in range(n):
        x = rng.uniform(-1, 1)
        kind = rng.random()
        if kind < 0.3:
            x = round(x, 3)
        elif kind < 0.6:
            x *= 10 ** rng.randint(-18, 18)
        elif kind < 0.7:
            x = 0.0
        vals.append(x)
    if rng.random() < 0.2:
        vals.append(-vals[0])
    out.write(" ".join(repr(v) for v in vals) + "," + repr(math.fsum(vals)) + "\n")
