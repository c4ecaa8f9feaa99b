"""Delay-independent stability and hyperbolicity certificates.

A DDE ``x' = A0 x + sum_k Ak x(t - tau_k)`` is absolutely stable when every
characteristic root has negative real part for all non-negative delays.  The
certificates below decide this from the matrix family
``S(phi) = A0 + sum_k Ak exp(i phi_k)`` over the torus of phases:

* ``A1.1``  A0 is Hurwitz,
* ``A1.2``  S(0) is nonsingular,
* ``A1.3``  no ``S(phi)`` has an eigenvalue ``i*omega`` with ``omega != 0``,

or equivalently ``A1.2`` together with ``A2.2``: every ``S(phi)`` is Hurwitz
apart from a possible zero eigenvalue.  ``A1.2`` and ``A1.3`` alone decide
absolute hyperbolicity.

``A1.3`` is checked through the multipliers of the extended singular map.
Fixing the first ``m - 1`` phases leaves ``B = A0 + sum_{l<m} Al exp(i phi_l)``
and ``i*omega`` is an eigenvalue of ``B + Am exp(i phi_m)`` exactly when
``exp(-i phi_m)`` is an eigenvalue of ``(i*omega*I - B)^{-1} Am``.  All these
multipliers vanish as ``|omega| -> oo``, so a resonance exists iff the spectral
radius of that product reaches 1 at some ``omega != 0``; a crossing is then
located by bisection on the number of multipliers outside the unit circle.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import linalg
from .model import (
    TWO_PI,
    Certificate,
    ConditionResult,
    DdeSystem,
    Verdict,
    Witness,
    canonical_phases,
    s_of_phi,
    s_of_phi_batch,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TorusSweepConfig:
    coarse_points_per_dim: int = 64
    refine_iterations: int = 200
    refine_restarts: int = 8
    margin_tolerance: float = 1e-9
    zero_frequency_tolerance: float = 1e-8
    # beyond this many phases the coarse grid is replaced by random samples
    max_grid_dims: int = 3
    random_samples: int = 4096
    # resonance search: fixed-phase grid per dimension and frequency samples
    resonance_phase_points: int = 32
    omega_samples: int = 1024
    omega_bound_slack: float = 1.0
    threads: int = 1
    seed: int = 0

    def __post_init__(self):
        for name in ("coarse_points_per_dim", "refine_iterations", "refine_restarts",
                     "random_samples", "resonance_phase_points", "omega_samples", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.margin_tolerance <= 0 or self.zero_frequency_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.omega_bound_slack < 0:
            raise ValueError("omega_bound_slack must be >= 0")


@dataclass(frozen=True)
class OmegaSweepConfig:
    omega_bound_slack: float = 1.0
    samples: int = 4096
    refine: bool = True
    margin_tolerance: float = 1e-9
    zero_frequency_tolerance: float = 1e-8

    def __post_init__(self):
        if self.samples < 16:
            raise ValueError("samples must be >= 16")
        if self.omega_bound_slack < 0:
            raise ValueError("omega_bound_slack must be >= 0")


@dataclass(frozen=True)
class TorusMaximum:
    value: float
    argmax: np.ndarray
    critical_eigenvalue: complex
    grid_spacing: float
    converged: bool


@dataclass(frozen=True)
class ResonanceScan:
    """Result of the multiplier sweep over fixed phases and frequencies.

    ``sup_rho`` is the largest multiplier modulus found with
    ``|omega| >= zero_frequency_tolerance``; ``witness`` is ``(omega, phi)``
    with ``i*omega`` an eigenvalue of ``S(phi)`` when one was located.
    """

    sup_rho: float
    omega_at: float
    phases_at: np.ndarray
    witness: Optional[tuple] = None


# -- helpers ----------------------------------------------------------------


def omega_bound(sys: DdeSystem, slack: float = 0.0) -> float:
    """Frequency beyond which no multiplier can reach the unit circle.

    For ``|omega| > ||B|| + ||Am||`` the resolvent bound
    ``rho <= ||Am|| / dist(i*omega, sigma(B))`` is below one, and
    ``||B|| <= sum_{l<m} ||Al||``.  Frobenius norms bound the operator norms.
    """
    return sys.norm_bound() + slack


def _parallel_map(fn: Callable, chunks: list, threads: int) -> list:
    # executor.map preserves input order, so reductions stay deterministic
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def _chunks(arr: np.ndarray, size: int) -> list:
    return [arr[i:i + size] for i in range(0, len(arr), size)]


def _torus_samples(m: int, cfg: TorusSweepConfig) -> tuple[np.ndarray, float]:
    if m <= cfg.max_grid_dims:
        p = cfg.coarse_points_per_dim
        axis = TWO_PI * np.arange(p) / p
        pts = np.array(list(itertools.product(axis, repeat=m)), dtype=float)
        return pts, TWO_PI / p
    rng = np.random.default_rng(cfg.seed)
    pts = rng.uniform(0.0, TWO_PI, size=(cfg.random_samples, m))
    return pts, TWO_PI / cfg.random_samples ** (1.0 / m)


def _abscissa_batch(sys: DdeSystem, phis: np.ndarray) -> np.ndarray:
    return linalg.eigvals_batch(s_of_phi_batch(sys, phis)).real.max(axis=-1)


def _abscissa_at(sys: DdeSystem, phi) -> float:
    return float(np.linalg.eigvals(s_of_phi_batch(sys, np.asarray(phi))).real.max())


def _critical_eigenvalue(M: np.ndarray) -> complex:
    w = np.linalg.eigvals(M)
    return complex(w[np.argmax(w.real)])


# -- A1.1 / A1.2 -------------------------------------------------------------


def check_instantaneous_stability(sys: DdeSystem, tol: float = 1e-9) -> ConditionResult:
    """A1.1: ``A0`` is Hurwitz.  ``margin = -spectral_abscissa(A0)``."""
    ev = linalg.eigenvalues(sys.A0).values
    crit = complex(ev[np.argmax(ev.real)])
    margin = -crit.real
    passed = True if margin > tol else (False if margin < -tol else None)
    if margin <= 0 and passed is None:
        # a spectral abscissa of exactly zero is not Hurwitz
        passed = False
    return ConditionResult(passed, float(margin), {"critical_eigenvalue": crit})


def check_s0_nonsingular(sys: DdeSystem, tol: float = 1e-9) -> ConditionResult:
    """A1.2: ``S(0)`` is nonsingular.  ``margin = min |eigenvalue of S(0)|``."""
    s0 = s_of_phi(sys, np.zeros(sys.m))
    ev = linalg.eigenvalues(s0).values
    margin = float(np.min(np.abs(ev)))
    det = linalg.determinant(s0)
    passed = bool(margin > tol and abs(det) > tol)
    return ConditionResult(passed, margin, {"det": det, "smallest_eigenvalue": complex(ev[np.argmin(np.abs(ev))])})


# -- A2.2: maximum spectral abscissa over the torus -------------------------


def max_abscissa_over_torus(sys: DdeSystem, cfg: TorusSweepConfig = TorusSweepConfig()) -> TorusMaximum:
    """Maximise the spectral abscissa of ``S(phi)`` over the phase torus.

    Coarse sampling, then Nelder-Mead from the best ``refine_restarts``
    samples.  The objective is continuous but not smooth where eigenvalues
    coalesce, hence the derivative-free refinement.
    """
    pts, spacing = _torus_samples(sys.m, cfg)
    vals = np.concatenate(_parallel_map(lambda c: _abscissa_batch(sys, c), _chunks(pts, 8192), cfg.threads))
    order = np.argsort(-vals, kind="stable")[: cfg.refine_restarts]

    best_val, best_phi, converged = vals[order[0]], pts[order[0]], False
    for idx in order:
        x0 = pts[idx]
        simplex = np.vstack([x0, x0 + 0.5 * spacing * np.eye(sys.m)])
        res = minimize(
            lambda x: -_abscissa_at(sys, x),
            x0,
            method="Nelder-Mead",
            options={"maxiter": cfg.refine_iterations, "xatol": 1e-12, "fatol": 1e-15,
                     "initial_simplex": simplex},
        )
        if -res.fun > best_val:
            best_val, best_phi = -res.fun, res.x
            converged = bool(res.success)
        elif idx == order[0]:
            converged = bool(res.success)
    best_phi = canonical_phases(best_phi)
    crit = _critical_eigenvalue(s_of_phi(sys, best_phi))
    return TorusMaximum(float(best_val), best_phi, crit, float(spacing), converged)


# -- A1.3: multiplier sweep ---------------------------------------------------


def _reduced_pair(sys: DdeSystem, fixed_phases) -> tuple[np.ndarray, np.ndarray]:
    fixed_phases = np.asarray(fixed_phases, dtype=float).reshape(-1)
    B = sys.A0.copy()
    for a, p in zip(sys.delayed[:-1], fixed_phases):
        B = B + a * np.exp(1j * p)
    return B, sys.delayed[-1]


def multipliers(B: np.ndarray, A: np.ndarray, omegas) -> np.ndarray:
    """Eigenvalues of ``(i*omega*I - B)^{-1} A`` for each omega, shape ``(len, n)``.

    Frequencies where ``i*omega`` is an eigenvalue of ``B`` get ``inf``.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    n = B.shape[0]
    M = 1j * omegas[:, None, None] * np.eye(n) - B
    try:
        R = np.linalg.solve(M, np.broadcast_to(A, M.shape))
        return np.linalg.eigvals(R)
    except np.linalg.LinAlgError:
        out = np.empty((omegas.size, n), dtype=complex)
        for i in range(omegas.size):
            try:
                out[i] = np.linalg.eigvals(np.linalg.solve(M[i], A))
            except np.linalg.LinAlgError:
                out[i] = np.inf
        return out


def _multipliers_multi(sys: DdeSystem, fixed: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """Multipliers on the product grid ``fixed x omegas``: shape ``(P, W, n)``."""
    n = sys.n
    Am = sys.delayed[-1]
    if sys.m > 1:
        z = np.exp(1j * fixed)  # (P, m-1)
        Bs = sys.A0 + np.einsum("pk,kij->pij", z, np.stack(sys.delayed[:-1]))
    else:
        Bs = np.broadcast_to(sys.A0, (len(fixed), n, n))
    out = np.empty((len(fixed), omegas.size, n), dtype=complex)
    for p in range(len(fixed)):
        out[p] = multipliers(Bs[p], Am, omegas)
    return out


def _count_outside(mu: np.ndarray) -> int:
    return int(np.sum(np.abs(mu) > 1.0))


def _rho(B, A, omega: float) -> float:
    return float(np.max(np.abs(multipliers(B, A, [omega])[0])))


def _bisect_crossing(B, A, lo: float, hi: float, max_iter: int = 200) -> Optional[tuple]:
    """Locate a frequency where a multiplier crosses the unit circle.

    Requires different outside-counts at ``lo`` and ``hi``.  Returns
    ``(omega, mu)`` with ``mu`` the multiplier closest to the unit circle.
    """
    c_lo = _count_outside(multipliers(B, A, [lo])[0])
    c_hi = _count_outside(multipliers(B, A, [hi])[0])
    if c_lo == c_hi:
        return None
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        c_mid = _count_outside(multipliers(B, A, [mid])[0])
        if c_mid != c_lo:
            hi = mid
        else:
            lo = mid
    best = None
    for w in (lo, hi):
        mu = multipliers(B, A, [w])[0]
        with np.errstate(divide="ignore"):
            dev = np.abs(np.log(np.abs(mu)))
        j = int(np.argmin(dev))
        if best is None or dev[j] < best[2]:
            best = (w, complex(mu[j]), dev[j])
    return best[0], best[1]


def _omega_grid(bound: float, samples: int, zero_tol: float) -> np.ndarray:
    half = np.linspace(0.0, bound, samples // 2 + 1)[1:]
    near = max(10.0 * zero_tol, 1e-6 * bound)
    half = np.union1d(half, [near])
    half = half[half >= zero_tol]
    return np.concatenate([-half[::-1], half])


def resonance_scan(sys: DdeSystem, cfg: TorusSweepConfig = TorusSweepConfig(),
                   priority_phases=None, locate: bool = True) -> ResonanceScan:
    """Sweep multiplier moduli over fixed phases and frequencies ``omega != 0``.

    When the supremum reaches 1 and ``locate`` is set, a resonance
    ``(omega, phi)`` is located by bisection along the frequency axis.
    ``priority_phases`` (length ``m - 1``) are examined before the grid.
    """
    zt = cfg.zero_frequency_tolerance
    bound = omega_bound(sys, cfg.omega_bound_slack)
    omegas = _omega_grid(bound, cfg.omega_samples, zt)

    k = sys.m - 1
    p = cfg.resonance_phase_points
    axis = TWO_PI * np.arange(p) / p
    combos = list(itertools.product(axis, repeat=k))
    fixed = np.array(combos, dtype=float).reshape(len(combos), k)
    if priority_phases is not None and k > 0:
        fixed = np.vstack([np.asarray(priority_phases, dtype=float).reshape(1, k), fixed])

    rho_chunks = _parallel_map(
        lambda c: np.abs(_multipliers_multi(sys, c, omegas)).max(axis=-1),
        _chunks(fixed, max(1, 65536 // omegas.size)),
        cfg.threads,
    )
    rho = np.vstack(rho_chunks)  # (P, W)
    flat = np.argsort(-rho, axis=None, kind="stable")

    # local refinement of the largest samples, jointly over (fixed phases, omega)
    best_val = float(rho.flat[flat[0]])
    best_fixed = fixed[flat[0] // omegas.size]
    best_omega = float(omegas[flat[0] % omegas.size])
    dw = omegas[1] - omegas[0] if omegas.size > 1 else bound
    seen = set()
    for f in flat[: 4 * cfg.refine_restarts]:
        pi_, wi = divmod(int(f), omegas.size)
        key = (pi_, wi)
        if key in seen or not np.isfinite(rho[pi_, wi]):
            continue
        seen.add(key)
        if len(seen) > cfg.refine_restarts:
            break
        val, fx, w = _refine_rho(sys, fixed[pi_], float(omegas[wi]), dw, bound, zt, cfg)
        if val > best_val:
            best_val, best_fixed, best_omega = val, fx, w

    witness = None
    if locate and best_val >= 1.0:
        witness = _locate_from(sys, best_fixed, best_omega, bound)
        if witness is None:
            # fall back to any sampled point with a multiplier outside the circle
            for f in flat:
                pi_, wi = divmod(int(f), omegas.size)
                if rho[pi_, wi] <= 1.0:
                    break
                witness = _locate_from(sys, fixed[pi_], float(omegas[wi]), bound)
                if witness is not None:
                    break
    return ResonanceScan(best_val, best_omega, canonical_phases(best_fixed) if k else np.empty(0), witness)


def _refine_rho(sys, fixed, omega, dw, bound, zt, cfg):
    sign = 1.0 if omega > 0 else -1.0
    if sys.m == 1:
        B, A = _reduced_pair(sys, [])
        lo = max(zt, abs(omega) - dw)
        hi = min(bound, abs(omega) + dw)
        res = minimize_scalar(lambda a: -_rho(B, A, sign * a), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12, "maxiter": cfg.refine_iterations})
        # bounded Brent never evaluates the endpoints; the supremum may sit there
        cands = [(-res.fun, sign * res.x), (_rho(B, A, sign * lo), sign * lo), (_rho(B, A, sign * hi), sign * hi)]
        val, w = max(cands)
        return float(val), np.empty(0), float(w)

    def obj(x):
        w = x[-1]
        if abs(w) < zt or np.sign(w) != sign:
            return 0.0
        B, A = _reduced_pair(sys, x[:-1])
        return -_rho(B, A, w)

    x0 = np.concatenate([fixed, [omega]])
    step = np.concatenate([np.full(sys.m - 1, 0.5 * TWO_PI / cfg.resonance_phase_points), [0.5 * dw]])
    res = minimize(obj, x0, method="Nelder-Mead",
                   options={"maxiter": cfg.refine_iterations, "xatol": 1e-12, "fatol": 1e-15,
                            "initial_simplex": np.vstack([x0, x0 + np.diag(step)])})
    return float(-res.fun), res.x[:-1], float(res.x[-1])


def _locate_from(sys, fixed, omega, bound) -> Optional[tuple]:
    """Bisect from a point with a multiplier outside the circle towards infinity."""
    B, A = _reduced_pair(sys, fixed)
    far = np.sign(omega) * bound * 1.01
    hit = _bisect_crossing(B, A, omega, far)
    if hit is None:
        return None
    w, mu = hit
    phi_last = -np.angle(mu)
    phi = canonical_phases(np.concatenate([np.asarray(fixed, dtype=float).reshape(-1), [phi_last]]))
    return float(w), phi


def resonance_residual(sys: DdeSystem, omega: float, phi) -> float:
    """``|det(i*omega*I - S(phi))|``."""
    return abs(linalg.determinant(1j * omega * np.eye(sys.n) - s_of_phi(sys, phi)))


# -- certificates -------------------------------------------------------------


def _not_a11(trace) -> Witness:
    return Witness("A1.1", eigenvalue=trace["A1.1"].detail["critical_eigenvalue"])


def _not_a12(sys) -> Witness:
    return Witness("A1.2", omega=0.0, phi=(0.0,) * sys.m)


def _resonance_witness(w) -> Witness:
    return Witness("A1.3", omega=w[0], phi=tuple(float(p) for p in w[1]))


def certify_absolute_stability(sys: DdeSystem, cfg: TorusSweepConfig = TorusSweepConfig(),
                               method: str = "theorem2") -> Certificate:
    """Decide absolute stability.

    ``method="theorem2"`` maximises the spectral abscissa of ``S(phi)`` over
    the torus (almost-Hurwitz test) and checks ``S(0)``.  ``method="theorem1"``
    checks ``A0`` Hurwitz, ``S(0)`` nonsingular and absence of resonances via
    the multiplier sweep.  Both are mathematically equivalent; they are kept
    as independent numerical routes.
    """
    if method == "theorem1":
        return _certify_theorem1(sys, cfg)
    if method != "theorem2":
        raise ValueError(f"unknown method {method!r}")
    tol = cfg.margin_tolerance
    zt = cfg.zero_frequency_tolerance
    trace = {
        "A1.1": check_instantaneous_stability(sys, tol),
        "A1.2": check_s0_nonsingular(sys, tol),
    }
    if not trace["A1.2"].passed:
        return Certificate(Verdict.CERTIFIED_NOT, trace["A1.2"].margin, _not_a12(sys), trace, "theorem2")

    tmax = max_abscissa_over_torus(sys, cfg)
    crit = tmax.critical_eigenvalue
    a22_pass = True if tmax.value < -tol else (False if tmax.value > tol else None)
    trace["A2.2"] = ConditionResult(a22_pass, -tmax.value, {
        "argmax": tmax.argmax, "critical_eigenvalue": crit,
        "grid_spacing": tmax.grid_spacing, "converged": tmax.converged,
    })

    if a22_pass:
        return Certificate(Verdict.CERTIFIED_STABLE, -tmax.value, None, trace, "theorem2")

    if a22_pass is None:
        if abs(crit.imag) < zt:
            # almost-Hurwitz exception: the abscissa touches zero only through a
            # zero eigenvalue, allowed because S(0) is nonsingular
            return Certificate(Verdict.CERTIFIED_STABLE, trace["A1.2"].margin, None, trace, "theorem2")
        return Certificate(Verdict.INCONCLUSIVE, -tmax.value, None, trace, "theorem2")

    scan = resonance_scan(sys, cfg, priority_phases=tmax.argmax[:-1])
    if scan.witness is not None:
        return Certificate(Verdict.CERTIFIED_NOT, -tmax.value, _resonance_witness(scan.witness), trace, "theorem2")
    if trace["A1.1"].passed is False:
        return Certificate(Verdict.CERTIFIED_NOT, -tmax.value, _not_a11(trace), trace, "theorem2")
    # A2.2 is violated outright; no resonance was located to go with it
    log.warning("abscissa %.3g > 0 with Hurwitz A0 but no resonance located", tmax.value)
    return Certificate(Verdict.CERTIFIED_NOT, -tmax.value,
                       Witness("A1.3", phi=tuple(tmax.argmax), eigenvalue=crit), trace, "theorem2")


def _a13_condition(scan: ResonanceScan, tol: float) -> ConditionResult:
    margin = 1.0 - scan.sup_rho if np.isfinite(scan.sup_rho) else -np.inf
    if scan.witness is not None:
        passed = False
    else:
        passed = True if margin > tol else None
    return ConditionResult(passed, float(margin), {
        "sup_rho": scan.sup_rho, "omega_at": scan.omega_at, "fixed_phases_at": scan.phases_at,
    })


def _certify_theorem1(sys: DdeSystem, cfg: TorusSweepConfig) -> Certificate:
    tol = cfg.margin_tolerance
    trace = {
        "A1.1": check_instantaneous_stability(sys, tol),
        "A1.2": check_s0_nonsingular(sys, tol),
    }
    scan = resonance_scan(sys, cfg)
    trace["A1.3"] = _a13_condition(scan, tol)
    if not trace["A1.2"].passed:
        return Certificate(Verdict.CERTIFIED_NOT, trace["A1.2"].margin, _not_a12(sys), trace, "theorem1")
    if scan.witness is not None:
        return Certificate(Verdict.CERTIFIED_NOT, trace["A1.3"].margin, _resonance_witness(scan.witness), trace, "theorem1")
    if trace["A1.1"].passed is False:
        return Certificate(Verdict.CERTIFIED_NOT, trace["A1.1"].margin, _not_a11(trace), trace, "theorem1")
    margin = min(trace["A1.1"].margin, trace["A1.3"].margin)
    if trace["A1.1"].passed and trace["A1.3"].passed:
        return Certificate(Verdict.CERTIFIED_STABLE, margin, None, trace, "theorem1")
    return Certificate(Verdict.INCONCLUSIVE, margin, None, trace, "theorem1")


def certify_absolute_hyperbolicity(sys: DdeSystem, cfg: TorusSweepConfig = TorusSweepConfig()) -> Certificate:
    """Decide absolute hyperbolicity: ``S(0)`` nonsingular and no resonance.

    Every eigenvalue of every ``S(phi)`` is covered by the multiplier sweep,
    not only the one with the largest real part, so strongly unstable systems
    are handled.
    """
    tol = cfg.margin_tolerance
    trace = {"A1.2": check_s0_nonsingular(sys, tol)}
    scan = resonance_scan(sys, cfg)
    trace["A1.3"] = _a13_condition(scan, tol)
    if not trace["A1.2"].passed:
        return Certificate(Verdict.CERTIFIED_NOT, trace["A1.2"].margin, _not_a12(sys), trace, "hyperbolicity")
    if scan.witness is not None:
        return Certificate(Verdict.CERTIFIED_NOT, trace["A1.3"].margin, _resonance_witness(scan.witness), trace, "hyperbolicity")
    margin = min(trace["A1.2"].margin, trace["A1.3"].margin)
    if trace["A1.3"].passed:
        return Certificate(Verdict.CERTIFIED_STABLE, margin, None, trace, "hyperbolicity")
    return Certificate(Verdict.INCONCLUSIVE, margin, None, trace, "hyperbolicity")


# -- scalar closed form -------------------------------------------------------


def certify_scalar(sys: DdeSystem, tol: float = 1e-9, zero_tol: float = 1e-8) -> Certificate:
    """Closed-form verdict for scalar equations ``x' = a0 x + sum ak x(t - tau_k)``.

    Stable iff ``Re a0 + sum|ak| < 0`` when ``Im a0 != 0``, and iff
    ``a0 + sum|ak| <= 0`` with ``sum_{k>=0} ak != 0`` when ``a0`` is real.
    The torus maximum of ``Re S(phi)`` is ``Re a0 + sum|ak|``, attained at
    ``phi_k = -arg ak``.
    """
    if sys.n != 1:
        raise ValueError("certify_scalar needs a scalar system (n = 1)")
    a = np.array([m[0, 0] for m in sys.matrices])
    a0, ak = a[0], a[1:]
    radius = float(np.sum(np.abs(ak)))
    slack = float(a0.real + radius)
    total = complex(np.sum(a))
    real_a0 = abs(a0.imag) <= zero_tol
    trace = {
        "slack": ConditionResult(slack < -tol if abs(slack) > tol else None, -slack, {"slack": slack}),
        "A1.2": ConditionResult(abs(total) > tol, abs(total), {"sum": total}),
    }
    if abs(total) <= tol:
        return Certificate(Verdict.CERTIFIED_NOT, abs(total), _not_a12(sys), trace, "scalar")
    if slack < -tol:
        return Certificate(Verdict.CERTIFIED_STABLE, -slack, None, trace, "scalar")
    if slack <= tol:
        if real_a0:
            return Certificate(Verdict.CERTIFIED_STABLE, abs(total), None, trace, "scalar")
        return Certificate(Verdict.INCONCLUSIVE, -slack, None, trace, "scalar")
    return Certificate(Verdict.CERTIFIED_NOT, -slack, _scalar_witness(a0, ak, radius, zero_tol), trace, "scalar")


def _scalar_witness(a0: complex, ak: np.ndarray, radius: float, zero_tol: float) -> Witness:
    # rotate every phase by the same theta away from the maximiser -arg(ak):
    # S = a0 + radius * exp(i theta), which meets the imaginary axis when
    # cos(theta) = -Re(a0) / radius
    c = -a0.real / radius if radius > 0 else np.inf
    if abs(c) > 1:
        return Witness("A1.1", eigenvalue=complex(a0))
    theta0 = float(np.arccos(c))
    for theta in (theta0, -theta0):
        omega = a0.imag + radius * np.sin(theta)
        if abs(omega) > zero_tol:
            phi = canonical_phases(theta - np.angle(ak))
            return Witness("A1.3", omega=float(omega), phi=tuple(float(p) for p in phi))
    return Witness("A1.1", eigenvalue=complex(a0))


# -- one delay: spectral radius of the extended singular map ------------------


@dataclass(frozen=True)
class RadiusCheck:
    passed: bool
    worst_omega: float
    worst_rho: float
    rho_at_zero: float


def check_one_delay_radius(sys: DdeSystem, cfg: OmegaSweepConfig = OmegaSweepConfig()) -> RadiusCheck:
    """Condition ``rho((i*omega*I - A0)^{-1} A1) < 1`` for all ``omega != 0``.

    Passes iff the sampled and refined maximum over ``|omega| >=
    zero_frequency_tolerance`` is below ``1 - margin_tolerance``.  The value at
    ``omega = 0`` is reported separately; it may reach 1 when ``S(0)`` is
    nonsingular.
    """
    if sys.m != 1:
        raise ValueError("check_one_delay_radius needs exactly one delay")
    if not check_instantaneous_stability(sys, cfg.margin_tolerance).passed:
        raise ValueError("A0 is not Hurwitz; the one-delay radius criterion does not apply")
    A0, A1 = sys.A0, sys.delayed[0]
    zt = cfg.zero_frequency_tolerance
    bound = omega_bound(sys, cfg.omega_bound_slack)
    omegas = _omega_grid(bound, cfg.samples, zt)
    rho = np.abs(multipliers(A0, A1, omegas)).max(axis=-1)
    i = int(np.argmax(rho))
    worst_rho, worst_omega = float(rho[i]), float(omegas[i])
    if cfg.refine:
        # every interior local maximum of the sampled profile gets a bounded search
        peaks = [j for j in range(omegas.size)
                 if (j == 0 or rho[j] >= rho[j - 1]) and (j == omegas.size - 1 or rho[j] >= rho[j + 1])]
        dw = omegas[1] - omegas[0]
        for j in sorted(peaks, key=lambda j: -rho[j])[:16]:
            sign = np.sign(omegas[j])
            lo = max(zt, abs(omegas[j]) - dw)
            hi = min(bound, abs(omegas[j]) + dw)
            res = minimize_scalar(lambda a: -_rho(A0, A1, sign * a), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12})
            for val, w in ((-res.fun, sign * res.x), (_rho(A0, A1, sign * lo), sign * lo)):
                if val > worst_rho:
                    worst_rho, worst_omega = float(val), float(w)
    rho0 = _rho(A0, A1, 0.0)
    return RadiusCheck(worst_rho < 1.0 - cfg.margin_tolerance, worst_omega, worst_rho, rho0)


def certify_one_delay(sys: DdeSystem, cfg: OmegaSweepConfig = OmegaSweepConfig()) -> Certificate:
    """Single-delay certificate: A0 Hurwitz, A0 + A1 nonsingular, radius condition."""
    tol = cfg.margin_tolerance
    trace = {"A1.1": check_instantaneous_stability(sys, tol), "A1.2": check_s0_nonsingular(sys, tol)}
    if trace["A1.1"].passed is not True:
        if trace["A1.1"].passed is None:
            return Certificate(Verdict.INCONCLUSIVE, trace["A1.1"].margin, None, trace, "one_delay")
        return Certificate(Verdict.CERTIFIED_NOT, trace["A1.1"].margin, _not_a11(trace), trace, "one_delay")
    if not trace["A1.2"].passed:
        return Certificate(Verdict.CERTIFIED_NOT, trace["A1.2"].margin, _not_a12(sys), trace, "one_delay")
    rc = check_one_delay_radius(sys, cfg)
    margin = 1.0 - rc.worst_rho
    trace["C"] = ConditionResult(rc.passed if abs(margin) > tol else None, margin,
                                 {"worst_omega": rc.worst_omega, "rho_at_zero": rc.rho_at_zero})
    if rc.passed:
        return Certificate(Verdict.CERTIFIED_STABLE, min(margin, trace["A1.1"].margin), None, trace, "one_delay")
    if margin < -tol:
        hit = _locate_from(sys, np.empty(0), rc.worst_omega, omega_bound(sys, cfg.omega_bound_slack))
        if hit is not None:
            return Certificate(Verdict.CERTIFIED_NOT, margin, _resonance_witness(hit), trace, "one_delay")
        return Certificate(Verdict.CERTIFIED_NOT, margin, Witness("A1.3", omega=None, phi=None), trace, "one_delay")
    return Certificate(Verdict.INCONCLUSIVE, margin, None, trace, "one_delay")


def singular_map_multipliers(sys: DdeSystem, omega: float, phi: float) -> np.ndarray:
    """Multipliers of the extended singular map ``(i*omega*I - A0)^{-1} A1 exp(i*phi)``."""
    if sys.m != 1:
        raise ValueError("the extended singular map is defined for one delay")
    M = 1j * omega * np.eye(sys.n) - sys.A0
    if abs(linalg.determinant(M)) <= 1e-14 * max(1.0, np.linalg.norm(M)) ** sys.n:
        raise ValueError(f"i*{omega} is an eigenvalue of A0; the resolvent is singular")
    return linalg.eigenvalues(np.linalg.solve(M, sys.delayed[0]) * np.exp(1j * phi)).values
