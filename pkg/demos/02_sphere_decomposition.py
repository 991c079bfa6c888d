"""
Splitting the sphere into compressible and incompressible vectors
=================================================================

A unit vector is compressible when it sits close to a sparse vector, and
incompressible otherwise.  Incompressible vectors must spread their mass:
a constant fraction of coordinates lands in a fixed magnitude window.
"""

import numpy as np

from rmtlab.sphere import (SphereParams, classify_vector, dist_to_sparse,
                           sampled_span_incompressible, spread_coordinates)

params = SphereParams(delta=0.1, rho=0.3)
n = 100
stream = np.random.default_rng(11)

# a spike is the most compressible unit vector there is
spike = np.zeros(n)
spike[0] = 1.0
print("spike:", classify_vector(spike, params),
      f"(sparse distance {dist_to_sparse(spike, params.delta):.3f})")

# the flat vector is the least compressible
flat = np.full(n, 1.0 / np.sqrt(n))
print("flat: ", classify_vector(flat, params),
      f"(sparse distance {dist_to_sparse(flat, params.delta):.3f})")

idx, ok = spread_coordinates(flat, params.delta, params.rho)
print(f"flat spread check: {ok}, {idx.size} coordinates in the window")

# random unit vectors are overwhelmingly incompressible at these parameters
labels = []
for _ in range(500):
    v = stream.standard_normal(n)
    labels.append(classify_vector(v / np.linalg.norm(v), params))
frac = labels.count("incompressible") / len(labels)
print(f"random unit vectors incompressible: {frac:.1%}")

# spans act the same way: a generic plane contains no compressible unit
# vector, while a coordinate axis is itself maximally compressible
plane = stream.standard_normal((n, 2))
ok, worst = sampled_span_incompressible(plane, params.delta, params.rho,
                                        stream, n_samples=400)
print(f"generic 2-plane incompressible: {ok} (worst sparse distance {worst:.3f})")

axis_line = np.zeros((n, 1))
axis_line[0, 0] = 1.0
ok, worst = sampled_span_incompressible(axis_line, params.delta, params.rho,
                                        stream, n_samples=400)
print(f"axis line incompressible: {ok} (worst sparse distance {worst:.3f})")
