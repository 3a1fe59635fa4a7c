import numpy as np
import pytest

from bellkey.boxes import SIGMA_X, SIGMA_Z, isotropic_di_correlation, projectors
from bellkey.errors import BadNormalization, NotNoSignaling, NotPsd, OutOfRange, ShapeMismatch
from bellkey.infotheory import binary_entropy, cmi_cq
from bellkey.nonlocality import trivial_extension_bound
from bellkey.steering import (
    Assemblage,
    assemblage_from_state,
    isotropic_assemblage,
    isotropic_assemblage_from_state,
    lhs_assemblage,
    lhs_extension,
    ris_per_input,
    ris_trivial_bound,
    sdi_alpha,
    sdi_inner,
    sdi_isotropic_upper,
    steering_faithfulness_bound,
)


def closed_form(eps):
    return 1 + eps / 2 * np.log2(eps / 2) + (1 - eps / 2) * np.log2(1 - eps / 2)


class TestAssemblage:
    def test_isotropic_matches_state(self):
        for p in (0.0, 0.3, 1.0):
            np.testing.assert_allclose(isotropic_assemblage(p).ops, isotropic_assemblage_from_state(p).ops, atol=1e-15)

    def test_bob_state_is_maximally_mixed(self):
        np.testing.assert_allclose(isotropic_assemblage(0.4).bob_state(), np.eye(2) / 2, atol=1e-15)

    def test_signaling_rejected(self):
        # x = 0 leaves Bob in |0>, x = 1 in |+>
        ops = np.zeros((2, 2, 2, 2), dtype=complex)
        ops[0, 0] = projectors(SIGMA_Z)[0]
        ops[0, 1] = projectors(SIGMA_X)[0]
        with pytest.raises(NotNoSignaling):
            Assemblage(ops)

    def test_non_psd(self):
        ops = np.array([[np.diag([0.6, -0.1])], [np.diag([0.0, 0.5])]])
        with pytest.raises(NotPsd):
            Assemblage(ops)

    def test_normalization(self):
        ops = 0.4 * np.array([[np.eye(2) / 2], [np.eye(2) / 2]])
        with pytest.raises(BadNormalization):
            Assemblage(ops)

    def test_shape(self):
        with pytest.raises(ShapeMismatch):
            Assemblage(np.zeros((2, 2, 2, 3)))

    def test_state_dimension(self):
        with pytest.raises(ShapeMismatch):
            assemblage_from_state(np.eye(6) / 6, [projectors(SIGMA_Z)], d_a=4)

    def test_from_random_state_is_valid(self, rng):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = g @ g.conj().T
        rho /= np.trace(rho)
        asm = assemblage_from_state(rho, [projectors(SIGMA_Z), projectors(SIGMA_X)])
        assert asm.n_a == 2 and asm.n_x == 2 and asm.d_b == 2


class TestRis:
    def test_pure_state_one_bit(self):
        np.testing.assert_allclose(ris_per_input(isotropic_assemblage(0.0)), 1.0, atol=1e-12)

    def test_fully_noisy_zero(self):
        assert ris_trivial_bound(isotropic_assemblage(1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_closed_form(self, rng):
        for eps in rng.uniform(0.001, 0.999, 10):
            assert ris_trivial_bound(isotropic_assemblage(eps)) == pytest.approx(closed_form(eps), abs=1e-9)

    def test_cq_state_average(self):
        # with p_X uniform, I(A;B|X) averages the per-input values
        asm = isotropic_assemblage(0.25)
        s = asm.cq_state()
        assert cmi_cq(s, ["A"], ["B"], ["X"]) == pytest.approx(ris_per_input(asm).mean(), abs=1e-12)

    @pytest.mark.parametrize("p", np.linspace(0.0, 0.95, 10))
    def test_di_below_sdi(self, p):
        di = trivial_extension_bound(isotropic_di_correlation(p)).value
        assert di <= ris_trivial_bound(isotropic_assemblage(p)) + 1e-9


class TestLhs:
    def test_extension_vanishes(self, rng):
        n_l = 3
        weights = rng.dirichlet(np.ones(n_l))
        responses = rng.dirichlet(np.ones(2), size=(n_l, 2))
        states = []
        for _ in range(n_l):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            v /= np.linalg.norm(v)
            states.append(np.outer(v, v.conj()))
        asm = lhs_assemblage(weights, responses, states)
        ext = lhs_extension(weights, responses, states)
        assert cmi_cq(ext, ["A"], ["B"], ["E", "X"]) <= 1e-10
        # marginalizing E recovers the assemblage
        np.testing.assert_allclose(ext.blocks.sum(axis=2), 0.5 * np.swapaxes(asm.ops, 0, 1), atol=1e-14)


class TestSdiUpper:
    def test_inner_and_alpha(self):
        assert sdi_inner(0.0) == pytest.approx(1.0)
        assert sdi_inner(0.3) == pytest.approx(1 - binary_entropy(0.15))
        assert sdi_alpha(0.2, 0.1) == pytest.approx(0.25)

    def test_endpoints(self):
        assert sdi_isotropic_upper(0.0) == pytest.approx(1.0, abs=1e-6)
        for p in (0.5, 0.6, 1.0):
            assert sdi_isotropic_upper(p) == 0.0

    def test_frozen_oracle(self):
        # brute-force minimum over a 1e-6 grid
        assert sdi_isotropic_upper(0.25) == pytest.approx(0.4395732108034268, abs=1e-9)

    def test_below_trivial(self):
        for p in (0.05, 0.2, 0.4):
            assert sdi_isotropic_upper(p) <= closed_form(p) + 1e-12

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            sdi_isotropic_upper(-0.1)

    def test_faithfulness_two_inputs(self):
        delta = 0.1 * np.sqrt(2)
        assert steering_faithfulness_bound(1e-16, 2) == pytest.approx(2 * (1e-4 + delta / (1 - delta)), rel=1e-12)
