#!/usr/bin/env python3
# Lattice distances, denominator search, and concentration spikes.
#
# Three views of the same phenomenon: a direction is "arithmetically
# structured" when a modest multiple of it lands near the integer lattice,
# and structured directions concentrate random sums onto atoms.

import numpy as np

from rmtlab.arithmetic import (RLCDParams, count_lattice_points, dist_to_lattice,
                               levy_estimate, rlcd_estimate)
from rmtlab.ensembles import EntryProfile, rademacher

stream = np.random.default_rng(23)

# nearest-lattice distance is exact and cheap at any dimension
y = np.array([0.5, 0.25, -1.9, 3.3])
print(f"dist to Z^4 from {y}: {dist_to_lattice(y):.4f}")

# integer points in a ball, against the closed-form growth bound
for radius in (1.0, 2.0, 4.0):
    exact, bound = count_lattice_points(2, radius)
    print(f"lattice points in 2-ball radius {radius}: {exact} (bound {bound:.1f})")

# scalar denominator search: for a sign entry the answer is exactly 2,
# the smallest norm whose multiples hit the lattice from +-1
prof = EntryProfile.homogeneous(1, 1, rademacher(), 2.0)
params = RLCDParams(L=1.0, alpha=0.5, radius_cap=3.0, resolution=1e-3)
est = rlcd_estimate(np.array([[1.0]]), prof, [0], params, stream)
print(f"\nsign-entry denominator bracket: [{est.lower:.4f}, {est.upper:.4f}]")

# concentration spikes: sums along a structured direction live on a sparse
# set of atoms, so ball mass jumps as the radius crosses atom spacing
n = 25
structured = np.full(n, 1.0 / np.sqrt(n))
generic = stream.standard_normal(n)
generic /= np.linalg.norm(generic)
law = rademacher()


def ball_mass(direction, t):
    def sampler(s, size):
        draws = law.sample(s, size=(size, n))
        return draws @ direction
    prob, se = levy_estimate(sampler, t, 20_000, np.random.default_rng(5))
    return prob


print("\nradius   structured   generic")
for t in (0.30, 0.50, 0.61, 0.70):
    ps = ball_mass(structured, t)
    pg = ball_mass(generic, t)
    print(f"{t:5.2f}     {ps:8.4f}   {pg:8.4f}")
print("note the structured jump once the ball swallows a second atom")
