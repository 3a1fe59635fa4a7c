import numpy as np
import pytest

from bellkey.boxes import InputDistribution, check_no_signaling, mix, pr_box, uniform_box
from bellkey.errors import BadNormalization, ShapeMismatch
from bellkey.nonlocality import (
    LosrBox,
    convexity_flag_extension,
    extension_cmi,
    extension_residuals,
    induced_input_dist,
    losr_apply,
    monotonicity_witness,
    product_extension,
    trivial_extension,
)
from bellkey.polytope import LhvModel, chsh_value, is_local

from conftest import deterministic_boxes, random_extension, random_local, random_ns


def constant_output_box(n_x=2, n_y=2):
    oa = np.zeros((1, 2, n_x, n_x, 2))
    oa[..., 0] = 1.0
    box = LosrBox.identity(2, 2, n_x, n_y)
    return LosrBox(box.in_weights, box.I_A, box.I_B, np.ones(1), oa, oa.copy())


def flip_alice_box():
    box = LosrBox.identity(2, 2, 2, 2)
    oa = np.broadcast_to(np.eye(2)[::-1][:, None, None, :], (2, 2, 2, 2))[None]
    return LosrBox(box.in_weights, box.I_A, box.I_B, box.out_weights, oa, box.O_B)


class TestLosrApply:
    def test_identity(self, rng):
        c = random_ns(rng)
        np.testing.assert_allclose(losr_apply(c, LosrBox.identity(2, 2, 2, 2)).p, c.p, atol=1e-15)

    def test_discard(self, rng):
        out = losr_apply(random_ns(rng), constant_output_box())
        np.testing.assert_allclose(out.p[0, 0], 1.0)

    def test_flip_changes_chsh_sign(self):
        flipped = losr_apply(pr_box(), flip_alice_box())
        assert chsh_value(flipped) == pytest.approx(-4.0)
        # winning condition is now a xor b = x y xor 1
        assert flipped.p[0, 1, 0, 0] == pytest.approx(0.5)

    def test_shape_check(self):
        box = LosrBox.identity(2, 2, 3, 2)
        with pytest.raises(ShapeMismatch):
            losr_apply(pr_box(), box)

    def test_bad_rows(self):
        box = LosrBox.identity(2, 2, 2, 2)
        with pytest.raises(BadNormalization):
            LosrBox(box.in_weights, 0.5 * box.I_A, box.I_B, box.out_weights, box.O_A, box.O_B)

    def test_changes_alphabets(self, rng):
        box = LosrBox.random((2, 2, 2, 2), (3, 2, 2, 3), rng=rng)
        out = losr_apply(random_ns(rng), box)
        assert out.shape == (3, 2, 2, 3)
        assert check_no_signaling(out, 1e-9).is_no_signaling

    def test_preserves_no_signaling(self, rng):
        for _ in range(20):
            out = losr_apply(random_ns(rng), LosrBox.random((2, 2, 2, 2), rng=rng))
            assert check_no_signaling(out, 1e-9).is_no_signaling

    def test_local_closure(self, rng):
        for _ in range(10):
            out = losr_apply(random_local(rng, 4), LosrBox.random((2, 2, 2, 2), rng=rng))
            assert isinstance(is_local(out, tol=1e-8), LhvModel)


class TestMonotonicity:
    def test_identity_equal(self, rng):
        c = random_ns(rng)
        e = random_extension(c, 3, rng)
        _, cmi_f = monotonicity_witness(c, e, LosrBox.identity(2, 2, 2, 2))
        assert cmi_f == pytest.approx(extension_cmi(e), abs=1e-12)

    def test_discard_zero(self, rng):
        c = random_ns(rng)
        _, cmi_f = monotonicity_witness(c, trivial_extension(c), constant_output_box())
        assert cmi_f == pytest.approx(0.0, abs=1e-12)

    def test_pr_random_box(self, rng):
        c = pr_box()
        e = trivial_extension(c)
        for _ in range(10):
            e_f, cmi_f = monotonicity_witness(c, e, LosrBox.random(c.shape, rng=rng))
            assert cmi_f <= 1.0 + 1e-9
            assert max(extension_residuals(e_f)) <= 1e-9

    def test_against_induced_inputs(self, rng):
        c = random_ns(rng)
        e = random_extension(c, 2, rng)
        box = LosrBox.random(c.shape, rng=rng)
        d_f = InputDistribution(rng.dirichlet(np.ones(4)).reshape(2, 2))
        e_f, cmi_f = monotonicity_witness(c, e, box, d_f)
        d_i = induced_input_dist(box, d_f)
        assert cmi_f <= extension_cmi(e.with_input_dist(d_i)) + 1e-9

    def test_output_randomness_must_be_adjoined(self):
        # shared output randomness alone makes a_f = b_f; E must hold lam2 to see it
        c = uniform_box()
        oa = np.zeros((2, 2, 2, 2, 2))
        for m in range(2):
            oa[m, ..., m] = 1.0
        base = LosrBox.identity(2, 2, 2, 2)
        box = LosrBox(base.in_weights, base.I_A, base.I_B, np.full(2, 0.5), oa, oa.copy())
        e_f, cmi_f = monotonicity_witness(c, trivial_extension(c), box)
        assert cmi_f == pytest.approx(0.0, abs=1e-12)
        assert extension_cmi(trivial_extension(losr_apply(c, box))) == pytest.approx(1.0)


class TestFlag:
    def test_endpoints(self, rng):
        c1, c2 = random_ns(rng), random_ns(rng)
        e1, e2 = random_extension(c1, 2, rng), random_extension(c2, 2, rng)
        assert extension_cmi(convexity_flag_extension(e1, e2, 1.0)) == pytest.approx(extension_cmi(e1), abs=1e-12)
        same = convexity_flag_extension(e1, e1, 0.5)
        assert extension_cmi(same) == pytest.approx(extension_cmi(e1), abs=1e-12)

    def test_pr_uniform(self):
        for lam in (0.2, 0.5, 0.9):
            e = convexity_flag_extension(trivial_extension(pr_box()), trivial_extension(uniform_box()), lam)
            np.testing.assert_allclose(e.base.p, mix(pr_box(), uniform_box(), lam).p)
            assert extension_cmi(e) == pytest.approx(lam, abs=1e-12)

    def test_shape_mismatch(self):
        from bellkey.boxes import isotropic_di_correlation
        with pytest.raises(ShapeMismatch):
            convexity_flag_extension(trivial_extension(pr_box()), trivial_extension(isotropic_di_correlation(0.1)), 0.5)


class TestProduct:
    def test_pr_pr(self):
        e = trivial_extension(pr_box())
        assert extension_cmi(product_extension(e, e)) == pytest.approx(2.0, abs=1e-12)

    def test_with_deterministic(self, rng):
        c = random_ns(rng)
        e = random_extension(c, 2, rng)
        det = trivial_extension(deterministic_boxes()[5])
        assert extension_cmi(product_extension(e, det)) == pytest.approx(extension_cmi(e), abs=1e-10)

    def test_uniform_uniform(self):
        e = trivial_extension(uniform_box())
        assert extension_cmi(product_extension(e, e)) == pytest.approx(0.0, abs=1e-12)
