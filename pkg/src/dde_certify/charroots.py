"""Characteristic roots of a DDE at fixed delays, and a time-domain cross-check.

Roots of ``Q(lam) = det(lam*I - A0 - sum_k Ak exp(-lam*tau_k))`` are seeded
from a pseudospectral discretisation of the solution operator's generator on
Chebyshev nodes over ``[-tau_max, 0]`` and then polished by Newton's method on
``Q`` itself, so the final accuracy does not depend on the discretisation.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .model import CharRoot, DdeSystem, s_of_phi, validate_delays


@dataclass(frozen=True)
class DiscretizationConfig:
    nodes: Optional[int] = None  # None: max(64, 20*ceil(tau_max)) capped at 600
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    dedup_radius: float = 1e-8
    # re_min, re_max, im_min, im_max; None picks the default window
    window: Optional[tuple] = None
    # reported roots satisfy |Q| < residual_tol * (1 + sum ||Ak||)
    residual_tol: float = 1e-10

    def __post_init__(self):
        if self.nodes is not None and self.nodes < 8:
            raise ValueError("need at least 8 nodes")
        if self.newton_tol <= 0 or self.dedup_radius <= 0 or self.residual_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.window is not None:
            r0, r1, i0, i1 = self.window
            if not (r0 < r1 and i0 < i1):
                raise ValueError("window must be a non-empty rectangle")

    def resolved_nodes(self, tau_max: float) -> int:
        if self.nodes is not None:
            return self.nodes
        return min(600, max(64, 20 * math.ceil(tau_max)))

    def resolved_window(self, sys: DdeSystem) -> tuple:
        if self.window is not None:
            return tuple(float(v) for v in self.window)
        # any root with Re(lam) >= -1/tau_max has |lam| <= ||A0|| + e * sum ||Ak||,
        # and any root with Re(lam) >= 0 has |lam| <= sum ||Ak||
        norms = [float(np.linalg.norm(a)) for a in sys.matrices]
        half = norms[0] + math.e * sum(norms[1:])
        # the left edge also keeps every zero-delay root, |lam| <= sum ||Ak||
        return (-max(5.0, sum(norms)), max(1.0, sum(norms)), -half, half)


@dataclass(frozen=True)
class SpectrumReport:
    taus: np.ndarray
    roots: list
    rightmost: Optional[CharRoot]
    discretization: DiscretizationConfig
    nodes: int
    window: tuple
    seeds: int
    dropped: int

    def to_json_dict(self) -> dict:
        return {
            "taus": [float(t) for t in self.taus],
            "roots": [r.to_json_dict() for r in self.roots],
            "rightmost": self.rightmost.to_json_dict() if self.rightmost else None,
            "discretization": {**asdict(self.discretization), "nodes": self.nodes, "window": list(self.window)},
            "seeds": self.seeds,
            "dropped": self.dropped,
        }

    def write_json(self, fh) -> None:
        json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im", "residual"])
        for r in self.roots:
            w.writerow([repr(float(r.value.real)), repr(float(r.value.imag)), repr(float(r.residual))])


def _char_matrix(sys: DdeSystem, taus: np.ndarray, lam: complex) -> tuple[np.ndarray, np.ndarray]:
    """``M(lam)`` and ``M'(lam)``."""
    n = sys.n
    M = lam * np.eye(n, dtype=complex) - sys.A0
    dM = np.eye(n, dtype=complex)
    for a, t in zip(sys.delayed, taus):
        e = np.exp(-lam * t)
        M -= a * e
        dM += t * a * e
    return M, dM


def quasipolynomial(sys: DdeSystem, taus: Sequence[float], lam: complex) -> complex:
    """``Q(lam) = det(lam*I - A0 - sum_k Ak exp(-lam*tau_k))``."""
    taus = validate_delays(sys, taus)
    return linalg.determinant(_char_matrix(sys, taus, complex(lam))[0])


def quasipolynomial_derivative(sys: DdeSystem, taus: Sequence[float], lam: complex) -> complex:
    """``dQ/dlam`` by Jacobi's formula ``Q * tr(M^{-1} M')``.

    Falls back to a central difference when ``M(lam)`` is nearly singular.
    """
    taus = validate_delays(sys, taus)
    lam = complex(lam)
    M, dM = _char_matrix(sys, taus, lam)
    if np.linalg.cond(M) < 1e10:
        return linalg.determinant(M) * complex(np.trace(np.linalg.solve(M, dM)))
    h = 1e-6 * max(1.0, abs(lam))
    return (quasipolynomial(sys, taus, lam + h) - quasipolynomial(sys, taus, lam - h)) / (2 * h)


# -- discretisation -----------------------------------------------------------


def cheb(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev points ``cos(pi*j/N)`` and the differentiation matrix on them."""
    j = np.arange(N + 1)
    x = np.cos(np.pi * j / N)
    c = np.where((j == 0) | (j == N), 2.0, 1.0) * (-1.0) ** j
    X = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (X + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def barycentric_row(x: np.ndarray, w: np.ndarray, t: float) -> np.ndarray:
    """Row vector ``l`` with ``l @ f(x) = p(t)`` for the interpolant ``p`` of ``f`` on ``x``."""
    d = t - x
    hit = np.flatnonzero(d == 0.0)
    if hit.size:
        row = np.zeros_like(x)
        row[hit[0]] = 1.0
        return row
    q = w / d
    return q / q.sum()


def discretized_generator(sys: DdeSystem, taus: Sequence[float], N: int) -> np.ndarray:
    """Collocation matrix of size ``n*(N+1)`` whose eigenvalues approximate the roots."""
    taus = validate_delays(sys, taus)
    n = sys.n
    tmax = float(taus.max())
    if tmax == 0.0:
        return s_of_phi(sys, np.zeros(sys.m))
    x, D = cheb(N)
    theta = 0.5 * tmax * (x - 1.0)  # theta[0] = 0, theta[N] = -tmax
    w = np.where((np.arange(N + 1) == 0) | (np.arange(N + 1) == N), 0.5, 1.0) * (-1.0) ** np.arange(N + 1)
    G = np.kron((2.0 / tmax) * D, np.eye(n)).astype(complex)
    top = np.zeros((n, n * (N + 1)), dtype=complex)
    top[:, :n] += sys.A0
    for a, t in zip(sys.delayed, taus):
        row = barycentric_row(theta, w, -t)
        top += np.kron(row[None, :], a)
    G[:n] = top
    return G


def _newton(sys, taus, lam, cfg: DiscretizationConfig) -> tuple[complex, bool]:
    for _ in range(cfg.newton_max_iter):
        M, dM = _char_matrix(sys, taus, lam)
        try:
            tr = complex(np.trace(np.linalg.solve(M, dM)))
        except np.linalg.LinAlgError:
            return lam, True  # M exactly singular: lam is a root
        if tr == 0 or not np.isfinite(tr):
            return lam, False
        step = 1.0 / tr
        lam = lam - step
        if not np.isfinite(lam):
            return lam, False
        if abs(step) <= cfg.newton_tol * (1.0 + abs(lam)):
            return lam, True
    return lam, False


def compute_spectrum(sys: DdeSystem, taus: Sequence[float],
                     cfg: DiscretizationConfig = DiscretizationConfig()) -> SpectrumReport:
    """Characteristic roots inside the configured window, sorted by (Re, Im)."""
    taus = validate_delays(sys, taus)
    tmax = float(taus.max())
    N = cfg.resolved_nodes(tmax)
    window = cfg.resolved_window(sys)
    r0, r1, i0, i1 = window
    scale = 1.0 + sys.norm_bound()

    seeds = linalg.eigvals_batch(discretized_generator(sys, taus, N))
    inside = lambda z: r0 <= z.real <= r1 and i0 <= z.imag <= i1
    seeds = [complex(z) for z in seeds if inside(z)]

    found = []  # (lam, residual)
    dropped = 0
    for s in seeds:
        lam, ok = _newton(sys, taus, s, cfg)
        if not ok or not inside(lam):
            dropped += 1
            continue
        res = abs(linalg.determinant(_char_matrix(sys, taus, lam)[0]))
        if res >= cfg.residual_tol * scale:
            dropped += 1
            continue
        found.append((lam, res))

    # merge seeds that converged to the same root, keeping the best residual
    merged: list = []
    for lam, res in sorted(found, key=lambda p: p[1]):
        for i, (mlam, mres, cnt) in enumerate(merged):
            if abs(lam - mlam) <= cfg.dedup_radius * max(1.0, abs(mlam)):
                merged[i] = (mlam, mres, cnt + 1)
                break
        else:
            merged.append((lam, res, 1))
    roots = [CharRoot(lam, res, cnt) for lam, res, cnt in merged]
    roots.sort(key=lambda r: (r.value.real, r.value.imag))
    rightmost = max(roots, key=lambda r: r.value.real) if roots else None
    return SpectrumReport(taus, roots, rightmost, cfg, N, window, len(seeds), dropped)


# -- time-domain simulation ----------------------------------------------------


@dataclass(frozen=True)
class SimulationResult:
    t: np.ndarray
    x: np.ndarray
    growth: float
    status: str  # "ok" or "unstable (overflow at t=...)"


def simulate_method_of_steps(sys: DdeSystem, taus: Sequence[float], history, t_end: float,
                             dt: float, overflow: float = 1e100) -> SimulationResult:
    """Fixed-step RK4 with a constant initial history.

    Delayed states come from cubic Hermite interpolation of the stored
    trajectory and its derivative.  The growth estimate is the least-squares
    slope of the log envelope (block maxima of ``||x||``) over the last third
    of the computed trajectory.
    """
    taus = validate_delays(sys, taus)
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    positive = taus[taus > 0]
    if positive.size and not dt < positive.min() / 10:
        raise ValueError("dt must be below a tenth of the smallest positive delay")
    if dt <= 0:
        raise ValueError("dt must be positive")

    n = sys.n
    h0 = np.broadcast_to(np.asarray(history, dtype=complex), (n,)).copy()
    A_now = sys.A0.copy()
    lagged = []
    for a, t in zip(sys.delayed, taus):
        if t == 0:
            A_now = A_now + a
        else:
            lagged.append((a, float(t)))

    steps = int(math.ceil(t_end / dt))
    X = np.empty((steps + 1, n), dtype=complex)
    F = np.empty((steps + 1, n), dtype=complex)
    X[0] = h0

    def past(s: float) -> np.ndarray:
        if s <= 0.0:
            return h0
        i = int(s // dt)
        u = s / dt - i
        h00 = (1 + 2 * u) * (1 - u) ** 2
        h10 = u * (1 - u) ** 2
        h01 = u * u * (3 - 2 * u)
        h11 = u * u * (u - 1)
        return h00 * X[i] + h10 * dt * F[i] + h01 * X[i + 1] + h11 * dt * F[i + 1]

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        out = A_now @ x
        for a, tau in lagged:
            out = out + a @ past(t - tau)
        return out

    status = "ok"
    last = steps
    for i in range(steps):
        t = i * dt
        k1 = rhs(t, X[i])
        F[i] = k1
        k2 = rhs(t + dt / 2, X[i] + dt / 2 * k1)
        k3 = rhs(t + dt / 2, X[i] + dt / 2 * k2)
        k4 = rhs(t + dt, X[i] + dt * k3)
        X[i + 1] = X[i] + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(X[i + 1])) or np.linalg.norm(X[i + 1]) > overflow:
            status = f"unstable (overflow at t={t + dt:.6g})"
            last = i
            break
    F[last] = rhs(last * dt, X[last])
    ts = dt * np.arange(last + 1)
    xs = X[: last + 1]

    norms = np.linalg.norm(xs, axis=1)
    tail = np.arange(2 * (last + 1) // 3, last + 1)
    # slope of the log envelope: block maxima ignore the zeros of oscillating solutions
    blocks = [b for b in np.array_split(tail, 6) if b.size]
    with np.errstate(divide="ignore"):
        env = np.array([np.log(norms[b].max()) for b in blocks])
    centers = np.array([ts[b].mean() for b in blocks])
    good = np.isfinite(env)
    if good.sum() >= 2:
        growth = float(np.polyfit(centers[good], env[good], 1)[0])
    else:
        growth = float("-inf") if status == "ok" else float("inf")
    return SimulationResult(ts, xs, growth, status)
