import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from dde_certify import asymptotic, charroots, linalg
from dde_certify.model import ValidationError, s_of_phi, scalar_system, validate_system

DC = charroots.DiscretizationConfig


def winding_count(f, re0, re1, im0, im1, samples=40000):
    """Number of zeros of f inside the rectangle by the argument principle."""
    edges = [
        re0 + 1j * im0 + (re1 - re0) * np.linspace(0, 1, samples),
        re1 + 1j * im0 + 1j * (im1 - im0) * np.linspace(0, 1, samples),
        re1 + 1j * im1 - (re1 - re0) * np.linspace(0, 1, samples),
        re0 + 1j * im1 - 1j * (im1 - im0) * np.linspace(0, 1, samples),
    ]
    z = np.concatenate(edges)
    vals = np.array([f(p) for p in z])
    dphase = np.angle(vals[1:] / vals[:-1])
    return int(round(np.sum(dphase) / (2 * np.pi)))


def fixed_point_root(a0, a1, tau, iters=500):
    lam = complex(a0)
    for _ in range(iters):
        lam = a0 + a1 * np.exp(-lam * tau)
    return lam


def test_quasipolynomial_examples():
    s = scalar_system(-1, 1)
    for tau in (0.0, 0.3, 7.0):
        assert charroots.quasipolynomial(s, [tau], 0.0) == 0
    a0, a1, tau = -1 + 1j, 0.5, 0.5
    lam = fixed_point_root(a0, a1, tau)
    assert abs(charroots.quasipolynomial(scalar_system(a0, a1), [tau], lam)) < 1e-14


def test_quasipolynomial_zero_delay_is_characteristic_polynomial():
    rng = np.random.default_rng(0)
    s = validate_system([rng.normal(size=(3, 3)) for _ in range(3)])
    z = 0.3 - 0.7j
    assert charroots.quasipolynomial(s, [0, 0], z) == pytest.approx(np.linalg.det(z * np.eye(3) - s_of_phi(s, [0, 0])))


def test_derivative_scalar_formula():
    a1, tau = 0.5, 2.0
    s = scalar_system(-1 + 1j, a1)
    for lam in (0.0, 1 - 1j, -0.3 + 4j):
        d = charroots.quasipolynomial_derivative(s, [tau], lam)
        assert d == pytest.approx(1 + a1 * tau * np.exp(-lam * tau), rel=1e-12)


def test_derivative_zero_delay():
    s = validate_system([np.diag([-1.0, -2.0]), [[0, 1], [0, 0]]])
    # Q(z) = (z + 1)(z + 2), Q' = 2z + 3
    for z in (0.0, 1 + 1j):
        assert charroots.quasipolynomial_derivative(s, [0.0], z) == pytest.approx(2 * z + 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.complex_numbers(max_magnitude=3))
def test_derivative_central_difference(seed, n, lam):
    rng = np.random.default_rng(seed)
    s = validate_system([rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(3)])
    taus = rng.uniform(0, 2, size=2)
    h = 1e-6
    fd = (charroots.quasipolynomial(s, taus, lam + h) - charroots.quasipolynomial(s, taus, lam - h)) / (2 * h)
    d = charroots.quasipolynomial_derivative(s, taus, lam)
    assert abs(d - fd) <= 1e-6 * max(abs(d), 1e-3 * (1 + s.norm_bound()) ** n)


def test_cheb_differentiates_polynomials():
    x, D = charroots.cheb(16)
    np.testing.assert_allclose(D @ x ** 3, 3 * x ** 2, atol=1e-11)


def test_barycentric_interpolation_exact_for_polynomials():
    N = 12
    x, _ = charroots.cheb(N)
    w = np.where((np.arange(N + 1) == 0) | (np.arange(N + 1) == N), 0.5, 1.0) * (-1.0) ** np.arange(N + 1)
    f = lambda t: 1 - 2 * t + t ** 5
    for t in (-0.93, 0.1, x[3]):
        assert charroots.barycentric_row(x, w, t) @ f(x) == pytest.approx(f(t), abs=1e-13)


def test_zero_delay_spectrum(two_delay_unstable):
    rep = charroots.compute_spectrum(two_delay_unstable, [0, 0])
    assert [r.value for r in rep.roots] == pytest.approx([-1.2 + 0.1j], abs=1e-10)
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = rng.integers(1, 4)
        s = validate_system([rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(3)])
        rep = charroots.compute_spectrum(s, [0, 0])
        ev = linalg.eigenvalues(s_of_phi(s, [0, 0])).values
        got = linalg.sort_complex(np.array([r.value for r in rep.roots]))
        np.testing.assert_allclose(got, ev, atol=1e-8)


@pytest.mark.parametrize("tau", [0.5, 5.0, 20.0])
def test_one_delay_stable_spectra(one_delay_stable, tau):
    rep = charroots.compute_spectrum(one_delay_stable, [tau])
    assert rep.roots
    assert all(r.value.real < 0 for r in rep.roots)
    scale = 1 + one_delay_stable.norm_bound()
    assert all(r.residual < 1e-10 * scale for r in rep.roots)
    assert rep.rightmost.value.real == max(r.value.real for r in rep.roots)


def test_fixed_point_root_is_found(one_delay_stable):
    lam = fixed_point_root(-1 + 1j, 0.5, 0.5)
    rep = charroots.compute_spectrum(one_delay_stable, [0.5])
    assert min(abs(r.value - lam) for r in rep.roots) < 1e-10


def test_one_delay_unstable_winding_oracle(one_delay_unstable):
    rep = charroots.compute_spectrum(one_delay_unstable, [20.0])
    assert rep.rightmost.value.real > 0
    q = lambda z: z + 1 + 1.5 * np.exp(-20 * z)
    # all roots with Re >= 0 satisfy |lam| <= 2.5
    count = winding_count(q, 0.0, 3.0, -3.0, 3.0)
    assert count == sum(r.value.real > 0 for r in rep.roots)
    assert count > 0


def test_one_delay_unstable_short_delay_is_stable(one_delay_unstable):
    rep = charroots.compute_spectrum(one_delay_unstable, [0.5])
    assert rep.rightmost.value.real < 0
    assert winding_count(lambda z: z + 1 + 1.5 * np.exp(-0.5 * z), 0.0, 3.0, -3.0, 3.0) == 0


def test_conjugate_symmetry_for_real_systems():
    s = validate_system([np.array([[-1.0, 2.0], [-0.5, -0.3]]), np.array([[0.2, -0.4], [0.7, 0.1]])])
    rep = charroots.compute_spectrum(s, [3.0])
    vals = np.array([r.value for r in rep.roots])
    assert vals.size > 4
    for z in vals:
        if abs(z.imag) < rep.window[3] * 0.99:
            assert np.min(np.abs(vals - np.conj(z))) <= 1e-8 * max(1, abs(z))


def test_root_count_stable_under_refinement(one_delay_stable):
    window = (-1.0, 0.5, -4.0, 4.0)
    a = charroots.compute_spectrum(one_delay_stable, [20.0], DC(nodes=200, window=window))
    b = charroots.compute_spectrum(one_delay_stable, [20.0], DC(nodes=400, window=window))
    fine = np.array([r.value for r in b.roots])
    interior = [r.value for r in a.roots if -0.9 < r.value.real and abs(r.value.imag) < 3.9]
    assert interior
    for z in interior:
        assert np.min(np.abs(fine - z)) < 1e-8


@pytest.mark.parametrize("tau", [20.0, 40.0, 80.0])
def test_roots_approach_asymptotic_curve(one_delay_stable, tau):
    rep = charroots.compute_spectrum(one_delay_stable, [tau], DC(window=(-2.0, 0.5, -5.5, 5.5)))
    b = asymptotic.branches_one_delay(one_delay_stable, np.linspace(-6, 6, 24001))[0]
    curve = asymptotic.scale_to_complex_plane(b, tau=tau)
    near = [r.value for r in rep.roots if abs(r.value.imag) <= 5 and r.value.real > -1.0]
    assert len(near) > 5
    for z in near:
        assert np.min(np.abs(curve - z)) < 0.5 / tau


def test_spectrum_outputs(one_delay_stable):
    rep = charroots.compute_spectrum(one_delay_stable, [5.0])
    buf = io.StringIO()
    rep.write_csv(buf)
    lines = buf.getvalue().split("\n")
    assert lines[0] == "re,im,residual" and len(lines) == len(rep.roots) + 2
    d = rep.to_json_dict()
    assert d["taus"] == [5.0] and len(d["roots"]) == len(rep.roots)


def test_spectrum_input_checks(one_delay_stable):
    with pytest.raises(ValidationError):
        charroots.compute_spectrum(one_delay_stable, [1.0, 2.0])
    with pytest.raises(ValidationError):
        charroots.compute_spectrum(one_delay_stable, [-1.0])
    with pytest.raises(ValueError):
        DC(nodes=4)
    with pytest.raises(ValueError):
        DC(window=(1, 0, -1, 1))


def test_strongly_unstable_root_persists(strongly_unstable):
    for tau in (1.0, 10.0, 50.0):
        rep = charroots.compute_spectrum(strongly_unstable, [tau])
        assert min(abs(r.value - 2) for r in rep.roots) < 0.1


# -- simulation ----------------------------------------------------------------


def test_simulation_decay_matches_rightmost(one_delay_stable):
    sim = charroots.simulate_method_of_steps(one_delay_stable, [5.0], 1.0, 80.0, 0.01)
    rep = charroots.compute_spectrum(one_delay_stable, [5.0])
    assert sim.status == "ok" and sim.growth < 0
    assert sim.growth == pytest.approx(rep.rightmost.value.real, abs=0.05)


def test_simulation_growth(one_delay_unstable):
    sim = charroots.simulate_method_of_steps(one_delay_unstable, [20.0], 1.0, 400.0, 0.05)
    assert sim.growth > 0


def test_simulation_without_delay_term():
    A0 = np.array([[-0.5, 1.0], [-1.0, -0.2]])
    s = validate_system([A0, np.zeros((2, 2))])
    sim = charroots.simulate_method_of_steps(s, [1.0], [1.0, 0.0], 5.0, 0.01)
    np.testing.assert_allclose(sim.x[-1], expm(A0 * sim.t[-1]) @ [1.0, 0.0], atol=1e-8)


def test_simulation_overflow_and_checks(one_delay_stable):
    s = scalar_system(5.0, 1.0)
    sim = charroots.simulate_method_of_steps(s, [1.0], 1.0, 100.0, 0.01, overflow=1e10)
    assert sim.status.startswith("unstable (overflow at t=")
    with pytest.raises(ValueError):
        charroots.simulate_method_of_steps(one_delay_stable, [1.0], 1.0, 10.0, 0.2)
    with pytest.raises(ValueError):
        charroots.simulate_method_of_steps(one_delay_stable, [1.0], 1.0, -1.0, 0.01)
