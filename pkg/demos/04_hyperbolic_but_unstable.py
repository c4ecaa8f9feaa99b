"""
Absolutely hyperbolic, never stable
===================================

``A0 = diag(2, -1)`` with ``A1 = 0.1 I`` is unstable for every delay, but no
root ever touches the imaginary axis: the unstable root stays near 2 and the
rest of the spectrum stays on the left.
"""

import numpy as np

from dde_certify import asymptotic, charroots, criteria
from dde_certify.model import validate_system

sys = validate_system([np.diag([2.0, -1.0]), 0.1 * np.eye(2)])

print("stability   :", criteria.certify_absolute_stability(sys).verdict.value)
print("hyperbolic  :", criteria.certify_absolute_hyperbolicity(sys).verdict.value)

# %% multipliers of (i w - A0)^{-1} A1 stay inside the unit circle
w = np.linspace(-10, 10, 2001)
rho = np.abs(criteria.multipliers(sys.A0, sys.delayed[0], w)).max(axis=-1)
print("max multiplier modulus", rho.max())

# %% the unstable root persists near 2 while the delay grows
for tau in (1.0, 10.0, 50.0):
    rep = charroots.compute_spectrum(sys, [tau])
    unstable = [r.value for r in rep.roots if r.value.real > 0]
    print(f"tau={tau:4}: unstable roots {np.round(unstable, 6)}")

# %% asymptotic picture: strongly unstable part {2}
spec = asymptotic.assemble_hierarchical_spectrum(sys, np.linspace(-3, 3, 61), [])
print("strongly unstable eigenvalues:", spec.strongly_unstable)
