"""Resonances and the delay families at which they become characteristic roots.

If ``i*omega0`` is an eigenvalue of ``S(phi)`` with ``omega0 != 0`` then
``i*omega0`` is a characteristic root for every delay vector with
``tau_k = (2*pi*n_k - phi_k) / omega0``, ``n_k`` integer, since then
``exp(-i*omega0*tau_k) = exp(i*phi_k)``.  Among these one can pick
hierarchical delays ``tau_1 = 1/eps``, ``tau_k = nu_k * eps**-k`` with
``nu_k`` in ``[1, 1 + eps**(k-1))``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import criteria
from .charroots import quasipolynomial
from .model import TWO_PI, DdeSystem, canonical_phases


@dataclass(frozen=True)
class HierarchicalDelays:
    epsilon: float
    nus: tuple  # nu_1 = 1 by construction
    nks: tuple
    taus: np.ndarray


@dataclass(frozen=True)
class ResonanceFamily:
    omega0: float
    phi: np.ndarray
    delay_sets: list = field(default_factory=list)  # list of (n_indices, taus)
    hierarchical: Optional[HierarchicalDelays] = None
    residuals: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        out = {
            "omega0": self.omega0,
            "phi": [float(p) for p in self.phi],
            "delay_sets": [
                {"n": [int(k) for k in idx], "taus": [float(t) for t in taus], "residual": float(res)}
                for (idx, taus), res in zip(self.delay_sets, self.residuals)
            ],
            "hierarchical": None,
        }
        if self.hierarchical is not None:
            h = self.hierarchical
            out["hierarchical"] = {
                "epsilon": h.epsilon, "nu": list(h.nus), "n": [int(k) for k in h.nks],
                "taus": [float(t) for t in h.taus],
            }
        return out

    def write_json(self, fh) -> None:
        json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _positive_frame(omega0: float, phi) -> tuple[float, np.ndarray]:
    # tau = (2*pi*n - phi)/omega0 with omega0 < 0 equals (2*pi*(-n) + phi)/|omega0|,
    # so a negative frequency is handled as |omega0| with negated phases
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if omega0 > 0:
        return omega0, canonical_phases(phi)
    return -omega0, canonical_phases(-phi)


def resonant_delays(omega0: float, phi: Sequence[float], index_ranges: Sequence[Sequence[int]]) -> list:
    """Delay vectors ``tau_k = (2*pi*n_k - phi_k)/omega0`` over all index combinations.

    Returns ``(n_indices, taus)`` pairs with every ``tau_k >= 0``.  For
    negative ``omega0`` the indices count periods of ``|omega0|`` so that
    positive indices give positive delays.
    """
    if omega0 == 0 or not np.isfinite(omega0):
        raise ValueError("omega0 must be a nonzero finite frequency")
    w, ph = _positive_frame(omega0, phi)
    if len(index_ranges) != ph.size:
        raise ValueError("need one index range per delay")
    out = []
    for idx in itertools.product(*index_ranges):
        taus = (TWO_PI * np.asarray(idx, dtype=float) - ph) / w
        if np.all(taus >= 0):
            out.append((tuple(int(i) for i in idx), taus))
    return out


def hierarchical_delays(omega0: float, phi: Sequence[float], epsilon_target: float) -> HierarchicalDelays:
    """Resonant delays of the form ``tau_1 = 1/eps``, ``tau_k = nu_k * eps**-k``.

    ``eps = omega0 / (2*pi*n_1 - phi_1)`` for the smallest ``n_1`` with
    ``eps <= epsilon_target``; each later ``n_k`` is the first integer that
    makes ``nu_k >= 1``, which keeps ``nu_k < 1 + 2*pi*eps**k/|omega0|``.
    """
    if omega0 == 0 or not np.isfinite(omega0):
        raise ValueError("omega0 must be a nonzero finite frequency")
    if not epsilon_target > 0:
        raise ValueError("epsilon_target must be positive")
    w, ph = _positive_frame(omega0, phi)
    if not TWO_PI * epsilon_target / w < 1:
        raise ValueError("epsilon_target too large: need 2*pi*eps/|omega0| < 1")
    n1 = max(1, math.ceil((w / epsilon_target + ph[0]) / TWO_PI))
    eps = w / (TWO_PI * n1 - ph[0])
    nks = [n1]
    nus = [1.0]
    taus = [(TWO_PI * n1 - ph[0]) / w]
    for k in range(2, ph.size + 1):
        p = ph[k - 1]
        nk = math.ceil(p / TWO_PI + w / (TWO_PI * eps ** k))
        tau = (TWO_PI * nk - p) / w
        nu = tau * eps ** k
        if nu < 1.0:  # rounding at an exact integer boundary
            nk += 1
            tau = (TWO_PI * nk - p) / w
            nu = tau * eps ** k
        nks.append(nk)
        nus.append(nu)
        taus.append(tau)
    return HierarchicalDelays(float(eps), tuple(float(v) for v in nus), tuple(nks), np.array(taus))


def find_resonance_witness(sys: DdeSystem, cfg: criteria.TorusSweepConfig = criteria.TorusSweepConfig()):
    """``(omega0, phi)`` with ``i*omega0`` an eigenvalue of ``S(phi)``, or ``None``."""
    scan = criteria.resonance_scan(sys, cfg)
    if scan.witness is None:
        return None
    omega, phi = scan.witness
    return float(omega), np.asarray(phi, dtype=float)


def residual_scale(sys: DdeSystem) -> float:
    return 1.0 + sys.norm_bound()


def build_family(sys: DdeSystem, omega0: float, phi, index_ranges=None,
                 epsilon: Optional[float] = None) -> ResonanceFamily:
    """Expand a resonance into explicit delay vectors and their residuals ``|Q(i*omega0)|``."""
    phi = canonical_phases(phi)
    if index_ranges is None:
        index_ranges = [range(1, 11)] + [range(1, 2)] * (sys.m - 1)
    sets = resonant_delays(omega0, phi, index_ranges)
    res = [abs(quasipolynomial(sys, taus, 1j * omega0)) for _, taus in sets]
    hier = hierarchical_delays(omega0, phi, epsilon) if epsilon is not None else None
    return ResonanceFamily(float(omega0), phi, sets, hier, res)
