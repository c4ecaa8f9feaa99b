"""
Finite-delay spectra and the asymptotic continuous spectrum
============================================================

Certificates speak about all delays at once; here we look at individual
delays.  As tau grows the roots line up along ``gamma(omega)/tau + i*omega``.
"""

import numpy as np

from dde_certify import asymptotic, charroots
from dde_certify.model import scalar_system

sys = scalar_system(-1 + 1j, 0.5)

# %% roots at a few delays
for tau in (0.5, 5.0, 20.0):
    rep = charroots.compute_spectrum(sys, [tau])
    print(f"tau={tau:5}: {len(rep.roots):3d} roots, rightmost {rep.rightmost.value:.5f}")

# %% the asymptotic curve: gamma = -ln|Y| with Y the root of det(i w - a0 - a1 Y)
br = asymptotic.branches_one_delay(sys, np.linspace(-5, 5, 2001))[0]
print("max gamma", br.gamma.max(), " closed form", -np.log(2))

# %% distance of the tau = 20 roots to the scaled curve
tau = 20.0
curve = asymptotic.scale_to_complex_plane(br, tau=tau)
rep = charroots.compute_spectrum(sys, [tau], charroots.DiscretizationConfig(window=(-3, 1, -5, 5)))
d = [np.min(np.abs(curve - r.value)) for r in rep.roots]
print(f"{len(d)} roots, farthest {max(d):.2e} from the curve (1/tau = {1 / tau})")

# %% an unstable example crosses the axis at the Hopf frequencies +-sqrt(1.25)
bad = scalar_system(-1, -1.5)
print("Hopf frequencies", asymptotic.hopf_frequencies_scalar(bad))
print("rightmost at tau=0.5:", charroots.compute_spectrum(bad, [0.5]).rightmost.value)
print("rightmost at tau=20 :", charroots.compute_spectrum(bad, [20.0]).rightmost.value)

# %% a time-domain check of the same two delays
for tau in (0.5, 20.0):
    sim = charroots.simulate_method_of_steps(bad, [tau], 1.0, 300.0, 0.02)
    print(f"tau={tau}: growth estimate {sim.growth:+.4f} ({sim.status})")
