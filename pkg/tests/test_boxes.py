import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellkey.boxes import (
    SIGMA_X,
    SIGMA_Z,
    Correlation,
    InputDistribution,
    QuantumModel,
    check_no_signaling,
    correlation_from_quantum,
    deterministic_box,
    isotropic_di_correlation,
    isotropic_di_model,
    isotropic_state,
    marginal_first,
    mix,
    phi_plus,
    pr_box,
    product,
    projectors,
    uniform_box,
    validate_correlation,
)
from bellkey.errors import BadNormalization, NegativeEntry, OutOfRange, ShapeMismatch
from bellkey.polytope import chsh_value

from conftest import random_ns


class TestValidate:
    def test_uniform_is_valid(self):
        c = validate_correlation(np.full((2, 3, 2, 4), 1 / 6), (2, 3, 2, 4))
        assert c.shape == (2, 3, 2, 4)

    def test_bad_column(self):
        p = np.full((2, 2, 2, 2), 0.25)
        p[:, :, 1, 0] *= 0.9
        with pytest.raises(BadNormalization):
            validate_correlation(p)

    def test_negative_beyond_slack(self):
        p = np.full((2, 2, 2, 2), 0.25)
        p[0, 0, 0, 0], p[1, 1, 0, 0] = -1e-6, 0.25 + 1e-6
        with pytest.raises(NegativeEntry):
            validate_correlation(p)

    def test_tiny_negative_is_clamped(self):
        p = np.full((2, 2, 2, 2), 0.25)
        p[0, 0, 0, 0], p[1, 1, 0, 0] = -5e-13, 0.5 + 5e-13
        c = validate_correlation(p)
        assert c.p.min() == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            validate_correlation(np.full((2, 2, 2, 2), 0.25), (2, 2, 3, 2))

    def test_pr_valid(self):
        c = validate_correlation(pr_box().p)
        np.testing.assert_allclose(c.p.sum(axis=(0, 1)), 1.0)

    def test_read_only(self):
        with pytest.raises(ValueError):
            pr_box().p[0, 0, 0, 0] = 1.0


class TestNoSignaling:
    def test_pr(self):
        rep = check_no_signaling(pr_box())
        assert rep.max_alice_residual == 0 and rep.max_bob_residual == 0 and rep.is_no_signaling

    def test_deterministic(self):
        rep = check_no_signaling(deterministic_box([0, 1, 1], [1, 0], 2, 2))
        assert rep.max_alice_residual == 0 and rep.max_bob_residual == 0

    def test_constructed_violation(self):
        # Bob's marginal at y=0 depends on x by 0.1
        p = np.full((2, 2, 2, 2), 0.25)
        p[0, 0, 1, 0] += 0.05
        p[0, 1, 1, 0] -= 0.05
        p[1, 0, 1, 0] += 0.05
        p[1, 1, 1, 0] -= 0.05
        rep = check_no_signaling(Correlation(p), tol=1e-9)
        assert rep.max_alice_residual == pytest.approx(0.1)
        assert not rep.is_no_signaling


class TestCanonical:
    def test_pr_entries(self):
        p = pr_box().p
        assert p[0, 0, 1, 1] == 0
        assert p[0, 0, 0, 1] == 0.5
        assert p[0, 1, 1, 1] == p[1, 0, 1, 1] == 0.5

    def test_isotropic_endpoints(self):
        np.testing.assert_allclose(isotropic_di_correlation(1.0).p, 0.25)
        q = isotropic_di_correlation(0.0).p[:, :, 0, 0]
        np.testing.assert_allclose(q, [[0.5, 0], [0, 0.5]], atol=1e-15)

    def test_isotropic_matches_trace_evaluation(self):
        for p in (0.0, 0.2, 0.77):
            np.testing.assert_allclose(isotropic_di_correlation(p).p,
                                       correlation_from_quantum(isotropic_di_model(p)).p, atol=1e-12)

    def test_isotropic_out_of_range(self):
        with pytest.raises(OutOfRange):
            isotropic_di_correlation(1.2)

    def test_isotropic_affine(self, rng):
        c0, c1 = isotropic_di_correlation(0.0).p, isotropic_di_correlation(1.0).p
        for p in rng.random(3):
            np.testing.assert_allclose(isotropic_di_correlation(p).p, (1 - p) * c0 + p * c1, atol=1e-12)

    def test_isotropic_chsh_direct_correlators(self):
        # four correlators from the trace formula: E = <A (x) B> on Phi
        alice, bob = [(SIGMA_Z + SIGMA_X) / np.sqrt(2), (SIGMA_Z - SIGMA_X) / np.sqrt(2)], [SIGMA_Z, SIGMA_X]
        phi = phi_plus()
        E = [[np.trace(np.kron(A, B) @ phi).real for B in bob] for A in alice]
        direct = E[0][0] + E[0][1] + E[1][0] - E[1][1]
        c = correlation_from_quantum(isotropic_di_model(0.0))
        assert chsh_value(c, (1, 2), (0, 1)) == pytest.approx(direct, abs=1e-12)
        assert direct == pytest.approx(2 * np.sqrt(2), abs=1e-9)


class TestQuantum:
    def test_maximally_mixed(self):
        z, x = projectors(SIGMA_Z), projectors(SIGMA_X)
        c = correlation_from_quantum(QuantumModel(np.eye(4) / 4, [z, x], [x, z]))
        np.testing.assert_allclose(c.p, 0.25, atol=1e-15)

    def test_phi_schmidt_basis(self):
        z = projectors(SIGMA_Z)
        c = correlation_from_quantum(QuantumModel(phi_plus(), [z], [z]))
        np.testing.assert_allclose(c.p[:, :, 0, 0], [[0.5, 0], [0, 0.5]], atol=1e-15)

    def test_bad_povm(self):
        z = projectors(SIGMA_Z)
        with pytest.raises(BadNormalization):
            QuantumModel(phi_plus(), [[z[0], z[0]]], [z])

    def test_non_psd_state(self):
        z = projectors(SIGMA_Z)
        bad = np.diag([1.2, -0.2, 0, 0]).astype(complex)
        with pytest.raises(Exception):
            QuantumModel(bad, [z], [z])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_models_are_no_signaling(self, seed):
        r = np.random.default_rng(seed)
        g = r.normal(size=(4, 4)) + 1j * r.normal(size=(4, 4))
        rho = g @ g.conj().T
        rho /= np.trace(rho)

        def meas():
            h = r.normal(size=(2, 2)) + 1j * r.normal(size=(2, 2))
            _, v = np.linalg.eigh(h + h.conj().T)
            return [np.outer(v[:, k], v[:, k].conj()) for k in range(2)]

        c = correlation_from_quantum(QuantumModel(rho, [meas(), meas()], [meas(), meas(), meas()]))
        rep = check_no_signaling(c, 1e-9)
        assert rep.is_no_signaling


class TestMixProduct:
    def test_mix_endpoints(self):
        a, b = pr_box(), uniform_box()
        np.testing.assert_array_equal(mix(a, b, 1.0).p, a.p)
        np.testing.assert_array_equal(mix(a, b, 0.0).p, b.p)

    def test_mix_entry(self):
        assert mix(pr_box(), uniform_box(), 0.5).p[0, 0, 0, 0] == pytest.approx(0.375)

    def test_mix_shape(self):
        with pytest.raises(ShapeMismatch):
            mix(pr_box(), isotropic_di_correlation(0.1), 0.5)

    def test_product_of_deterministic(self):
        c = product(deterministic_box([0, 1], [1, 1]), deterministic_box([1, 0], [0, 1]))
        assert set(np.unique(c.p)) <= {0.0, 1.0}

    def test_product_pr_entry(self):
        assert product(pr_box(), pr_box()).p[0, 0, 0, 0] == pytest.approx(0.25)

    def test_product_marginal(self, rng):
        c1, c2 = random_ns(rng), isotropic_di_correlation(0.3)
        np.testing.assert_allclose(marginal_first(product(c1, c2), c2.shape).p, c1.p, atol=1e-15)

    def test_flattening(self, rng):
        c1, c2 = random_ns(rng), isotropic_di_correlation(0.3)
        p = product(c1, c2).p
        # a = a1 * n_a2 + a2, x = x1 * n_x2 + x2
        assert p[1 * 2 + 0, 0 * 2 + 1, 1 * 3 + 2, 0 * 2 + 1] == pytest.approx(c1.p[1, 0, 1, 0] * c2.p[0, 1, 2, 1])

    def test_residual_bounds(self, rng):
        p = np.full((2, 2, 2, 2), 0.25)
        p[0, 0, 1, 0] += 0.02
        p[0, 1, 1, 0] -= 0.02
        s = Correlation(p)
        r_s = check_no_signaling(s).max_alice_residual
        r_m = check_no_signaling(mix(s, random_ns(rng), 0.4)).max_alice_residual
        r_p = check_no_signaling(product(s, s)).max_alice_residual
        assert r_m <= r_s + 1e-15
        assert r_p <= 2 * r_s + 1e-15


class TestInputDistribution:
    def test_uniform(self):
        np.testing.assert_allclose(InputDistribution.uniform(3, 2).weights, 1 / 6)

    def test_bad(self):
        with pytest.raises(BadNormalization):
            InputDistribution(np.full((2, 2), 0.3))

    def test_isotropic_state_trace(self):
        assert np.trace(isotropic_state(0.3)).real == pytest.approx(1.0)
