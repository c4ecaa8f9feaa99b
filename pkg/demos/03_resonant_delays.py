"""
Resonances reappear at countably many delays
============================================

A resonance ``i*omega0 in sigma(S(phi))`` becomes a characteristic root for
every delay vector with ``exp(-i*omega0*tau_k) = exp(i*phi_k)``.  We build
such delays, including strongly separated (hierarchical) ones, and check
that the root is really there.
"""

import numpy as np

from dde_certify import charroots, resonance
from dde_certify.model import scalar_system

sys = scalar_system(-1, -0.7, 0.5 + 0.1j)

# %% find a witness
omega0, phi = resonance.find_resonance_witness(sys)
print("omega0 =", omega0, " phi =", phi)

# %% a small family of delay pairs
fam = resonance.build_family(sys, omega0, phi, [range(1, 4), range(1, 3)], epsilon=0.01)
for (idx, taus), res in zip(fam.delay_sets, fam.residuals):
    print(idx, np.round(taus, 4), f"|Q(i omega0)| = {res:.1e}")

# %% hierarchical delays tau_1 = 1/eps, tau_2 = nu_2 / eps^2
h = fam.hierarchical
print("eps", h.epsilon, "nu", h.nus, "n", h.nks, "taus", h.taus)
print("ratio tau1/tau2 =", h.taus[0] / h.taus[1], "= eps*nu1/nu2 =", h.epsilon * h.nus[0] / h.nus[1])

# %% the root i*omega0 shows up in the computed spectrum
taus = fam.delay_sets[0][1]
rep = charroots.compute_spectrum(sys, taus)
print("closest root to i*omega0:", min(abs(r.value - 1j * omega0) for r in rep.roots))
