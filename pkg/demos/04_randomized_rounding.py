"""
Randomized rounding onto a grid without losing the geometry
===========================================================

Rounding a kernel basis onto the delta-grid replaces a continuum of
candidate vectors by a finite net.  The randomized scheme is unbiased and
moves nothing farther than one grid step, so with decent probability the
rounded tuple keeps the properties that made the original useful.
"""

import numpy as np

from rmtlab.ensembles import EntryProfile, rademacher
from rmtlab.rounding import (RoundingParams, randomized_round, rounding_report,
                             sample_lattice_shell)
from rmtlab.sphere import SphereParams

stream = np.random.default_rng(42)

# one coordinate, many draws: both neighbours appear, mean is the input
v = np.array([0.37])
draws = np.array([randomized_round(v, 0.1, stream)[0] for _ in range(30_000)])
print(f"rounding 0.37 on the 0.1-grid: values {sorted(set(np.round(draws, 10)))}, "
      f"mean {draws.mean():.4f}")

# a kernel tuple: orthonormal basis of the kernel of a random wide matrix
n, l = 40, 3
b = stream.standard_normal((n - l, n))
v_tuple = np.linalg.svd(b)[2][n - l:].T

params = RoundingParams(delta=0.05, rho=0.3, tau=0.5, K=1.3, r=0.01)
u_tuple = randomized_round(v_tuple, params.delta, stream)
profile = EntryProfile.homogeneous(n, n, rademacher(), 2.0)

report = rounding_report(v_tuple, u_tuple, profile, b, params, stream)
print("\nrounding guarantees for one kernel tuple:")
for check in report.checks:
    print(f"  {check.name:12s} measured {check.measured:10.4f} "
          f"threshold {check.threshold:10.4f}  {'ok' if check.passed else 'FAIL'}")

# the net is small enough to sample from directly: grid points in a norm
# shell whose direction spreads its mass
sphere = SphereParams(delta=0.25, rho=0.3)
point = sample_lattice_shell(0.5, 4.0, 6, sphere, stream)
print(f"\nshell sample in 6 dims: {point} (norm {np.linalg.norm(point):.3f})")
