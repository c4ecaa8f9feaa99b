"""
Delay-independent stability of scalar equations
================================================

For ``x' = a0 x + a1 x(t - tau)`` the whole question "stable for every
tau >= 0?" reduces to the circle ``a0 + a1 exp(i phi)``.  We certify two
classic parameter sets, look at the witness of the failing one and compare
with the closed form.
"""

import numpy as np

from dde_certify import criteria
from dde_certify.model import scalar_system, s_of_phi

# %% a stable and an unstable parameter set
good = scalar_system(-1 + 1j, 0.5)
bad = scalar_system(-1, -1.5)

for name, sys in (("a0=-1+i, a1=0.5", good), ("a0=-1, a1=-1.5", bad)):
    cert = criteria.certify_absolute_stability(sys)
    print(f"{name:18s} -> {cert.verdict.value:16s} margin {cert.margin:+.4f}")

# %% the failing case comes with a resonance: i*omega is an eigenvalue of S(phi)
w = criteria.certify_absolute_stability(bad).witness
print("witness omega =", w.omega, " phi =", w.phi)
print("S(phi) =", s_of_phi(bad, w.phi)[0, 0])
print("|det(i omega - S(phi))| =", criteria.resonance_residual(bad, w.omega, w.phi))

# %% the circle picture: real part of a0 + a1 exp(i phi) changes sign
phi = np.linspace(0, 2 * np.pi, 9)
print(np.round((-1 - 1.5 * np.exp(1j * phi)).real, 3))

# %% two delays: the scalar closed form reads off Re(a0) + |a1| + |a2|
for coeffs in ((-1 + 1j, 0.5, 0.3), (-1, -0.7, 0.5 + 0.1j)):
    c = criteria.certify_scalar(scalar_system(*coeffs))
    print(coeffs, c.verdict.value, "slack", round(c.condition_trace["slack"].detail["slack"], 6))

# %% the theorem-1 route (A0 Hurwitz, S(0) nonsingular, no resonance) agrees
for sys in (good, bad):
    print(criteria.certify_absolute_stability(sys, method="theorem1").verdict.value)
