"""Where does the first reflection come from?

Prints the arrival-angle support and the probability mass of each lobe for a
single reflector orientation, and the coarse angular histogram for three
orientations, whose lobes merge into one arc.
"""

import math

import numpy as np

from firstarrival import BooleanModelParams, TestLink, ToaDistribution, aoa_bin_probabilities, aoa_support
from firstarrival.aoa import lobe_interval
from firstarrival.geometry import QUADRANTS

link = TestLink(350)


def describe(iset):
    return " U ".join(
        f"{'[' if lc else '('}{lo:.1f}, {hi:.1f}{']' if hc else ')'}" for lo, hi, lc, hc in iset.in_degrees()
    )


model = BooleanModelParams.from_field_units(30, (10, 40, 4), (60, 60, 1))
toa = ToaDistribution(model, link)
print("single orientation 60 deg, support (deg):", describe(aoa_support(model)))
for q in QUADRANTS:
    iv = lobe_interval(q, math.radians(60))
    mass = aoa_bin_probabilities(np.array([iv.lo, iv.hi]), model, link, toa)[0]
    print(f"  quadrant {q.name:3s} lobe ({math.degrees(iv.lo):6.1f}, {math.degrees(iv.hi):6.1f}) deg  mass {mass:.4f}")

model = BooleanModelParams.from_field_units(30, (10, 40, 4), (20, 60, 3))
toa = ToaDistribution(model, link)
edges = np.radians(np.arange(0, 361, 30))
probs = aoa_bin_probabilities(edges, model, link, toa)
print("orientations {20, 40, 60} deg, support (deg):", describe(aoa_support(model)))
for lo, p in zip(range(0, 360, 30), probs):
    print(f"  [{lo:3d}, {lo + 30:3d}) deg  {p:.4f}  " + "#" * int(round(200 * p)))
