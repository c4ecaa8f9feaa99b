import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dde_certify import charroots, criteria, resonance
from dde_certify.model import Verdict, scalar_system, validate_system


def test_resonant_delays_unit_conversion():
    sets = resonance.resonant_delays(2 * np.pi, [0.0], [range(1, 4)])
    assert [idx for idx, _ in sets] == [(1,), (2,), (3,)]
    np.testing.assert_allclose([t[0] for _, t in sets], [1, 2, 3])
    (idx, taus), = resonance.resonant_delays(np.pi, [np.pi], [range(1, 2)])
    assert taus[0] == pytest.approx(1.0)


def test_resonant_delays_filters_negative():
    sets = resonance.resonant_delays(1.0, [1.0], [range(-2, 3)])
    assert all(t[0] >= 0 for _, t in sets)
    assert [idx for idx, _ in sets] == [(1,), (2,)]


def test_negative_frequency_matches_conjugate_frame():
    a = resonance.resonant_delays(-2.0, [0.7], [range(1, 4)])
    for _, taus in a:
        # exp(-i*omega0*tau) must equal exp(i*phi)
        assert np.exp(-1j * -2.0 * taus[0]) == pytest.approx(np.exp(0.7j), abs=1e-12)


def test_zero_frequency_rejected():
    with pytest.raises(ValueError):
        resonance.resonant_delays(0.0, [0.0], [range(1, 2)])
    with pytest.raises(ValueError):
        resonance.hierarchical_delays(0.0, [0.0], 0.01)
    with pytest.raises(ValueError):
        resonance.hierarchical_delays(1.0, [0.0], 0.5)


def test_hierarchical_one_delay():
    h = resonance.hierarchical_delays(1.3, [0.4], 0.01)
    assert h.epsilon <= 0.01
    assert h.epsilon == pytest.approx(1 / h.taus[0], rel=1e-15)
    assert h.nus == (1.0,)


def test_hierarchical_two_delays_example():
    h = resonance.hierarchical_delays(1.0, [0.0, 0.0], 0.01)
    assert all(isinstance(k, int) for k in h.nks)
    assert 1 <= h.nus[1] < 1 + h.epsilon
    # the integer condition behind the construction
    assert h.taus[1] == pytest.approx(2 * np.pi * h.nks[1], rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 20) | st.floats(-20, -0.05), st.lists(st.floats(0, 2 * np.pi, exclude_max=True), min_size=1, max_size=3),
       st.sampled_from([0.01, 0.003, 0.001]))
def test_hierarchical_invariants(omega0, phi, eps_target):
    if 2 * np.pi * eps_target / abs(omega0) >= 1:
        return
    h = resonance.hierarchical_delays(omega0, phi, eps_target)
    eps = h.epsilon
    assert 0 < eps <= eps_target
    for k, (nu, tau) in enumerate(zip(h.nus, h.taus), start=1):
        assert 1 <= nu < 1 + eps ** (k - 1) or k == 1
        assert tau * eps ** k == pytest.approx(nu, rel=1e-12)
        # each delay is resonant: exp(-i*omega0*tau) = exp(i*phi)
        assert abs(np.exp(-1j * omega0 * tau) - np.exp(1j * phi[k - 1])) < 1e-12 * max(1, abs(omega0 * tau))
    for k in range(len(h.taus) - 1):
        assert h.taus[k] / h.taus[k + 1] == pytest.approx(eps * h.nus[k] / h.nus[k + 1], rel=1e-12)


def test_find_witness_examples(one_delay_stable, one_delay_unstable):
    assert resonance.find_resonance_witness(one_delay_stable) is None
    assert resonance.find_resonance_witness(validate_system([-2 * np.eye(2), np.eye(2)])) is None
    w, phi = resonance.find_resonance_witness(one_delay_unstable)
    assert abs(w) == pytest.approx(np.sqrt(1.25), abs=1e-9)


def test_family_residuals(one_delay_unstable):
    w, phi = resonance.find_resonance_witness(one_delay_unstable)
    fam = resonance.build_family(one_delay_unstable, w, phi, epsilon=0.01)
    scale = resonance.residual_scale(one_delay_unstable)
    assert len(fam.delay_sets) == 10
    assert max(fam.residuals) < 1e-9 * scale
    assert abs(charroots.quasipolynomial(one_delay_unstable, fam.hierarchical.taus, 1j * w)) < 1e-9 * scale
    d = json.loads(json.dumps(fam.to_json_dict()))
    assert d["omega0"] == w and len(d["delay_sets"]) == 10
    buf = io.StringIO()
    fam.write_json(buf)
    assert json.loads(buf.getvalue()) == d


def test_family_two_delays(two_delay_unstable):
    w, phi = resonance.find_resonance_witness(two_delay_unstable)
    ranges = [range(1, 6), range(1, 3)]
    fam = resonance.build_family(two_delay_unstable, w, phi, ranges, epsilon=0.01)
    scale = resonance.residual_scale(two_delay_unstable)
    assert len(fam.delay_sets) >= 8
    assert max(fam.residuals) < 1e-9 * scale
    h = fam.hierarchical
    assert 1 <= h.nus[1] < 1 + h.epsilon
    assert abs(charroots.quasipolynomial(two_delay_unstable, h.taus, 1j * w)) < 1e-9 * scale


def test_resonance_reappears_as_characteristic_root(one_delay_unstable):
    c = criteria.certify_absolute_stability(one_delay_unstable)
    assert c.verdict is Verdict.CERTIFIED_NOT
    w = c.witness.omega
    (_, taus), = resonance.resonant_delays(w, c.witness.phi, [range(2, 3)])
    rep = charroots.compute_spectrum(one_delay_unstable, taus)
    assert min(abs(r.value - 1j * w) for r in rep.roots) < 1e-6


def test_resonance_reappears_random_matrices():
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(30):
        A0 = rng.normal(size=(2, 2)) - 1.0 * np.eye(2)
        A1 = rng.normal(size=(2, 2))
        s = validate_system([A0, A1])
        c = criteria.certify_absolute_stability(s)
        if c.verdict is not Verdict.CERTIFIED_NOT or c.witness.omega in (None, 0.0):
            continue
        w = c.witness.omega
        (_, taus), = resonance.resonant_delays(w, c.witness.phi, [range(1, 2)])
        rep = charroots.compute_spectrum(s, taus)
        assert min(abs(r.value - 1j * w) for r in rep.roots) < 1e-6
        hits += 1
    assert hits >= 5
