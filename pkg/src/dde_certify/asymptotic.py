"""Asymptotic continuous spectrum of DDEs with large or hierarchical delays.

For one large delay ``tau`` the pseudo-continuous part of the spectrum
clusters along ``gamma_j(omega) / tau + i*omega`` where
``gamma_j = -ln|Y_j(omega)|`` and ``Y_j`` are the roots of the spectral
polynomial ``det(i*omega*I - A0 - A1*Y)``.  With hierarchical delays
``tau_k = nu_k * eps**-k`` the level-``k`` component uses
``det(i*omega*I - A0 - sum_{l<k} Al exp(i phi_l) - Ak*Y)`` and scales as
``gamma * eps**k``.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from . import linalg
from .criteria import omega_bound
from .model import DdeSystem


@dataclass(frozen=True)
class AsymptoticBranch:
    level: int
    branch_index: int
    omega: np.ndarray
    gamma: np.ndarray
    Y: np.ndarray
    phases: tuple = ()

    @property
    def samples(self) -> list:
        return list(zip(self.omega.tolist(), self.gamma.tolist(), self.Y.tolist()))


@dataclass(frozen=True)
class SingularFrequency:
    omega_s: float
    sign: int  # +1: gamma -> +inf (i*omega_s eigenvalue of A0), -1: gamma -> -inf


@dataclass(frozen=True)
class HierarchicalSpectrum:
    strongly_unstable: np.ndarray
    branches: list = field(default_factory=list)
    degenerate: bool = False
    message: str = ""


def _base_matrix(sys: DdeSystem, fixed_phases: Sequence[float], level: int) -> np.ndarray:
    if not 1 <= level <= sys.m:
        raise ValueError(f"level must be in 1..{sys.m}")
    fixed_phases = np.asarray(fixed_phases, dtype=float).reshape(-1)
    if fixed_phases.size != level - 1:
        raise ValueError(f"level {level} needs {level - 1} fixed phases")
    B = sys.A0.copy()
    for a, p in zip(sys.delayed[: level - 1], fixed_phases):
        B = B + a * np.exp(1j * p)
    return B


def spectral_polynomial(sys: DdeSystem, omega: float, fixed_phases: Sequence[float] = (),
                        level: int = 1) -> np.ndarray:
    """Ascending coefficients in ``Y`` of ``det(i*omega*I - B - Ak*Y)``.

    The degree is the numerical rank of ``Ak``.  Coefficients are recovered
    from determinant values at the roots of unity (a Vandermonde system
    solved by FFT).
    """
    B = _base_matrix(sys, fixed_phases, level)
    Ak = sys.delayed[level - 1]
    r = linalg.numerical_rank(Ak)
    M0 = 1j * omega * np.eye(sys.n) - B
    nodes = np.exp(2j * np.pi * np.arange(r + 1) / (r + 1))
    dets = np.array([linalg.determinant(M0 - Ak * y) for y in nodes])
    return np.fft.fft(dets) / (r + 1)


def singular_frequencies(sys: DdeSystem, tol: float = 1e-9) -> list:
    """Frequencies where ``gamma`` blows up to ``+inf``: ``i*omega_s`` in ``sigma(A0)``."""
    ev = linalg.eigenvalues(sys.A0).values
    return [SingularFrequency(float(z.imag), +1) for z in ev if abs(z.real) < tol]


def default_omega_grid(sys: DdeSystem, samples: int = 2049, slack: float = 1.0) -> np.ndarray:
    """Uniform grid on ``[-Omega, Omega]`` refined geometrically near singular frequencies."""
    bound = omega_bound(sys, slack)
    grid = np.linspace(-bound, bound, samples)
    extra = [s.omega_s + sgn * d for s in singular_frequencies(sys)
             for sgn in (-1, 1) for d in np.geomspace(1e-6, 1e-1, 11)]
    return np.union1d(grid, extra)


def _coefficients_on_grid(sys, omegas, fixed_phases, level) -> np.ndarray:
    # batched version of spectral_polynomial, shape (len(omegas), r + 1)
    B = _base_matrix(sys, fixed_phases, level)
    Ak = sys.delayed[level - 1]
    r = linalg.numerical_rank(Ak)
    nodes = np.exp(2j * np.pi * np.arange(r + 1) / (r + 1))
    eye = np.eye(sys.n)
    M = (1j * omegas[:, None, None, None] * eye - B) - nodes[None, :, None, None] * Ak
    return np.fft.fft(np.linalg.det(M), axis=1) / (r + 1)


def _roots_on_grid(sys, omegas, fixed_phases, level) -> np.ndarray:
    omegas = np.asarray(omegas, dtype=float)
    coeffs = _coefficients_on_grid(sys, omegas, fixed_phases, level)
    r = coeffs.shape[1] - 1
    out = np.full((omegas.size, r), np.nan + 0j)
    if r == 0:
        return out
    lead = np.max(np.abs(coeffs), axis=1)
    # a vanishing leading coefficient sends a root to infinity
    coeffs[np.abs(coeffs) <= 1e-13 * lead[:, None]] = 0.0
    full = coeffs[:, -1] != 0
    if r == 1:
        out[full, 0] = -coeffs[full, 0] / coeffs[full, 1]
    elif np.any(full):
        c = coeffs[full]
        comp = np.zeros((c.shape[0], r, r), dtype=complex)
        comp[:, 1:, :-1] = np.eye(r - 1)
        comp[:, :, -1] = -c[:, :-1] / c[:, -1:]
        out[full] = np.sort_complex(np.linalg.eigvals(comp))
    for i in np.nonzero(~full & (lead > 0))[0]:
        if np.any(coeffs[i]):
            roots = linalg.poly_roots(coeffs[i]).roots
            out[i, : roots.size] = roots
    return out


def _stitch(roots: np.ndarray) -> np.ndarray:
    """Reorder columns so each follows the nearest root of the previous sample."""
    roots = roots.copy()
    for i in range(1, roots.shape[0]):
        prev, cur = roots[i - 1], roots[i]
        cost = np.abs(prev[:, None] - cur[None, :])
        cost[~np.isfinite(cost)] = 1e300
        _, cols = linear_sum_assignment(cost)
        roots[i] = cur[cols]
    return roots


def branches(sys: DdeSystem, omega_grid, fixed_phases: Sequence[float] = (), level: int = 1) -> list:
    """Branches ``(omega, gamma_j, Y_j)`` of the level-``level`` asymptotic spectrum."""
    omegas = np.sort(np.asarray(omega_grid, dtype=float))
    if not np.all(np.isfinite(omegas)):
        raise ValueError("omega grid must be finite")
    roots = _stitch(_roots_on_grid(sys, omegas, fixed_phases, level))
    result = []
    phases = tuple(float(p) for p in np.asarray(fixed_phases, dtype=float).reshape(-1))
    with np.errstate(divide="ignore"):
        for j in range(roots.shape[1]):
            Y = roots[:, j]
            gamma = -np.log(np.abs(Y))
            ok = np.isfinite(gamma)
            result.append(AsymptoticBranch(level, j + 1, omegas[ok], gamma[ok], Y[ok], phases))
    return result


def branches_one_delay(sys: DdeSystem, omega_grid=None) -> list:
    """Level-one branches built from ``A0`` and ``A1``."""
    if omega_grid is None:
        omega_grid = default_omega_grid(sys)
    return branches(sys, omega_grid, (), 1)


def gamma_max(sys: DdeSystem, fixed_phases: Sequence[float] = (), level: int = 1,
              omega_grid=None) -> tuple[float, float]:
    """``(omega, max_j gamma_j(omega))`` maximised over frequency.

    Grid search followed by a bounded scalar refinement around the best
    sample.  Returns ``+inf`` when a singular frequency is present.
    """
    if omega_grid is None:
        omega_grid = default_omega_grid(sys)
    omegas = np.sort(np.asarray(omega_grid, dtype=float))
    r = linalg.numerical_rank(sys.delayed[level - 1])
    if r == 0:
        return float("nan"), -np.inf
    sing = singular_frequencies(sys) if level == 1 else []
    if sing:
        return sing[0].omega_s, np.inf

    def top(w):
        Y = _roots_on_grid(sys, np.array([w]), fixed_phases, level)[0]
        with np.errstate(divide="ignore"):
            g = -np.log(np.abs(Y[np.isfinite(Y)]))
        return float(np.max(g)) if g.size else -np.inf

    Y = _roots_on_grid(sys, omegas, fixed_phases, level)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = -np.log(np.abs(Y))
    vals = np.max(np.where(np.isnan(g), -np.inf, g), axis=1)
    i = int(np.argmax(vals))
    lo = omegas[max(i - 1, 0)]
    hi = omegas[min(i + 1, omegas.size - 1)]
    best_w, best_g = float(omegas[i]), float(vals[i])
    if hi > lo:
        res = minimize_scalar(lambda w: -top(w), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if -res.fun > best_g:
            best_w, best_g = float(res.x), float(-res.fun)
    return best_w, best_g


def scale_to_complex_plane(branch: AsymptoticBranch, tau: Optional[float] = None,
                           epsilon: Optional[float] = None) -> np.ndarray:
    """Points ``gamma/tau + i*omega`` (one delay) or ``gamma*eps**level + i*omega``."""
    if (tau is None) == (epsilon is None):
        raise ValueError("give exactly one of tau or epsilon")
    if tau is not None:
        if not tau > 0:
            raise ValueError("tau must be positive")
        return branch.gamma / tau + 1j * branch.omega
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return branch.gamma * epsilon ** branch.level + 1j * branch.omega


def hopf_frequencies_scalar(sys: DdeSystem) -> tuple:
    """Frequencies where the scalar one-delay asymptotic spectrum meets the imaginary axis.

    Solves ``|i*omega - a0| = |a1|``: ``Im a0 +- sqrt(|a1|^2 - (Re a0)^2)``.
    Empty when ``|a1| < |Re a0|``.
    """
    if sys.n != 1 or sys.m != 1:
        raise ValueError("hopf_frequencies_scalar needs a scalar system with one delay")
    a0 = complex(sys.A0[0, 0])
    a1 = complex(sys.delayed[0][0, 0])
    disc = abs(a1) ** 2 - a0.real ** 2
    if disc < 0:
        return ()
    s = np.sqrt(disc)
    return (float(a0.imag - s), float(a0.imag + s))


def assemble_hierarchical_spectrum(sys: DdeSystem, omega_grid, phase_grid_per_level: Sequence) -> HierarchicalSpectrum:
    """Asymptotic spectrum for hierarchical delays ``tau_1 << ... << tau_m``.

    Strongly unstable part: eigenvalues of ``A0`` with positive real part.
    Levels ``k < m`` contribute only their unstable (``gamma > 0``) samples;
    level ``m`` contributes full branches.  Fixed phases for level ``k`` run
    over the product of ``phase_grid_per_level[0..k-2]``.  When ``Am`` is
    singular the assembly is not valid and only a report is returned.
    """
    ev = linalg.eigenvalues(sys.A0).values
    su = ev[ev.real > 0]
    Am = sys.delayed[-1]
    if linalg.numerical_rank(Am) < sys.n:
        return HierarchicalSpectrum(su, [], True,
                                    "degenerate case: det A_m = 0, asymptotic assembly not available")
    if len(phase_grid_per_level) < sys.m - 1:
        raise ValueError(f"need phase grids for the first {sys.m - 1} delays")
    out = []
    for k in range(1, sys.m + 1):
        grids = [np.asarray(g, dtype=float) for g in phase_grid_per_level[: k - 1]]
        for phases in itertools.product(*grids):
            for br in branches(sys, omega_grid, phases, k):
                if k < sys.m:
                    keep = br.gamma > 0
                    if not np.any(keep):
                        continue
                    br = AsymptoticBranch(k, br.branch_index, br.omega[keep], br.gamma[keep], br.Y[keep], br.phases)
                out.append(br)
    return HierarchicalSpectrum(su, out, False, "")


def write_branches_csv(fh, branch_list: Sequence[AsymptoticBranch], tau: Optional[float] = None,
                       epsilon: Optional[float] = None) -> None:
    """CSV with columns level, branch, omega, gamma, re_Y, im_Y (plus re_z, im_z when scaled)."""
    scaled = tau is not None or epsilon is not None
    w = csv.writer(fh, lineterminator="\n")
    header = ["level", "branch", "omega", "gamma", "re_Y", "im_Y"]
    if scaled:
        header += ["re_z", "im_z"]
    w.writerow(header)
    for br in branch_list:
        z = scale_to_complex_plane(br, tau=tau, epsilon=epsilon) if scaled else None
        for i in range(br.omega.size):
            row = [br.level, br.branch_index, repr(float(br.omega[i])), repr(float(br.gamma[i])),
                   repr(float(br.Y[i].real)), repr(float(br.Y[i].imag))]
            if scaled:
                row += [repr(float(z[i].real)), repr(float(z[i].imag))]
            w.writerow(row)
