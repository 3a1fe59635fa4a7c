"""Local operations and shared randomness (LOSR) acting on correlations.

A box is split into an input side and an output side, each with its own
shared random variable:

* input side ``lam1``: ``in_weights[l]``, ``I_A[l, x_f, x] = p(x|x_f, l)`` and
  ``I_B[l, y_f, y] = p(y|y_f, l)``;
* output side ``lam2``: ``out_weights[m]``, ``O_A[m, a, x, x_f, a_f] = p(a_f|a,x,x_f,m)``
  and ``O_B[m, b, y, y_f, b_f] = p(b_f|b,y,y_f,m)``.

The final correlation is
``p_f(a_f,b_f|x_f,y_f) = sum O(a_f,b_f|a,b,x,y,x_f,y_f) p_i(a,b|x,y) I(x,y|x_f,y_f)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..boxes import Correlation, InputDistribution
from ..errors import BadNormalization, NegativeEntry, ShapeMismatch
from .extension import ClassicalExtension, _require_feasible, extension_cmi

ROW_TOL = 1e-9


def _stochastic(name: str, t: np.ndarray, nd: int) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != nd:
        raise ShapeMismatch(f"{name} must have {nd} axes, got shape {t.shape}")
    if np.any(t < -1e-12):
        raise NegativeEntry(f"{name} has a negative entry")
    t = np.clip(t, 0.0, None)
    if np.abs(t.sum(axis=-1) - 1.0).max(initial=0.0) > ROW_TOL:
        raise BadNormalization(f"{name} rows are not probability vectors")
    t.setflags(write=False)
    return t


def _random_stochastic(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.dirichlet(np.ones(shape[-1]), size=shape[:-1])


@dataclass(frozen=True)
class LosrBox:
    in_weights: np.ndarray
    I_A: np.ndarray
    I_B: np.ndarray
    out_weights: np.ndarray
    O_A: np.ndarray
    O_B: np.ndarray

    def __post_init__(self):
        w1 = _stochastic("in_weights", self.in_weights, 1)
        w2 = _stochastic("out_weights", self.out_weights, 1)
        ia = _stochastic("I_A", self.I_A, 3)
        ib = _stochastic("I_B", self.I_B, 3)
        oa = _stochastic("O_A", self.O_A, 5)
        ob = _stochastic("O_B", self.O_B, 5)
        if ia.shape[0] != len(w1) or ib.shape[0] != len(w1):
            raise ShapeMismatch("input-side boxes must share the lam1 alphabet")
        if oa.shape[0] != len(w2) or ob.shape[0] != len(w2):
            raise ShapeMismatch("output-side boxes must share the lam2 alphabet")
        # O_A[m, a, x, x_f, a_f] must agree with I_A[l, x_f, x]
        if oa.shape[2] != ia.shape[2] or oa.shape[3] != ia.shape[1]:
            raise ShapeMismatch("O_A input axes do not match I_A")
        if ob.shape[2] != ib.shape[2] or ob.shape[3] != ib.shape[1]:
            raise ShapeMismatch("O_B input axes do not match I_B")
        for name, v in (("in_weights", w1), ("out_weights", w2), ("I_A", ia), ("I_B", ib),
                        ("O_A", oa), ("O_B", ob)):
            object.__setattr__(self, name, v)

    @property
    def initial_shape(self) -> tuple[int, int, int, int]:
        """(n_a, n_b, n_x, n_y) of the correlation the box accepts."""
        return self.O_A.shape[1], self.O_B.shape[1], self.I_A.shape[2], self.I_B.shape[2]

    @property
    def final_shape(self) -> tuple[int, int, int, int]:
        return self.O_A.shape[4], self.O_B.shape[4], self.I_A.shape[1], self.I_B.shape[1]

    def input_channel(self) -> np.ndarray:
        """I(x, y | x_f, y_f), indexed (x, y, x_f, y_f)."""
        return np.einsum("l,lfx,lgy->xyfg", self.in_weights, self.I_A, self.I_B)

    def output_channel(self) -> np.ndarray:
        """O(a_f, b_f | a, b, x, y, x_f, y_f), indexed (a_f, b_f, a, b, x, y, x_f, y_f)."""
        return np.einsum("m,maxfA,mbygB->ABabxyfg", self.out_weights, self.O_A, self.O_B)

    @classmethod
    def identity(cls, n_a: int, n_b: int, n_x: int, n_y: int) -> "LosrBox":
        ia = np.eye(n_x)[None]
        ib = np.eye(n_y)[None]
        oa = np.broadcast_to(np.eye(n_a)[:, None, None, :], (n_a, n_x, n_x, n_a))[None]
        ob = np.broadcast_to(np.eye(n_b)[:, None, None, :], (n_b, n_y, n_y, n_b))[None]
        return cls(np.ones(1), ia, ib, np.ones(1), oa, ob)

    @classmethod
    def random(cls, initial: tuple[int, int, int, int], final: tuple[int, int, int, int] | None = None,
               n_lam1: int = 2, n_lam2: int = 2, rng: np.random.Generator | None = None) -> "LosrBox":
        rng = rng or np.random.default_rng()
        n_a, n_b, n_x, n_y = initial
        f_a, f_b, f_x, f_y = final or initial
        return cls(
            rng.dirichlet(np.ones(n_lam1)),
            _random_stochastic(rng, (n_lam1, f_x, n_x)),
            _random_stochastic(rng, (n_lam1, f_y, n_y)),
            rng.dirichlet(np.ones(n_lam2)),
            _random_stochastic(rng, (n_lam2, n_a, n_x, f_x, f_a)),
            _random_stochastic(rng, (n_lam2, n_b, n_y, f_y, f_b)),
        )


def _check_fits(c: Correlation, box: LosrBox) -> None:
    if c.shape != box.initial_shape:
        raise ShapeMismatch(f"box expects a correlation of shape {box.initial_shape}, got {c.shape}")


def losr_apply(c: Correlation, box: LosrBox) -> Correlation:
    _check_fits(c, box)
    p_f = np.einsum("ABabxyfg,abxy,xyfg->ABfg", box.output_channel(), c.p, box.input_channel())
    return Correlation(p_f)


def induced_input_dist(box: LosrBox, d_f: InputDistribution) -> InputDistribution:
    """Distribution of the inner inputs (x, y) when the outer inputs follow ``d_f``."""
    if d_f.shape != box.final_shape[2:]:
        raise ShapeMismatch("outer input distribution does not match the box")
    return InputDistribution(np.einsum("xyfg,fg->xy", box.input_channel(), d_f.weights))


def monotonicity_witness(c_i: Correlation, e_i: ClassicalExtension, box: LosrBox,
                         d_f: InputDistribution | None = None) -> tuple[ClassicalExtension, float]:
    """Extension of ``losr_apply(c_i, box)`` built from ``e_i``, and its CMI.

    The new eavesdropper register is ``(e, lam1, lam2)``; both shared random
    variables must be handed to E, otherwise the output side can correlate
    ``a_f`` and ``b_f`` through ``lam2`` alone. With ``d_f`` the outer input
    distribution (uniform by default),

        cmi_f = I(A_f;B_f|X_f Y_f E lam1 lam2) <= I(A;B|XYE) under induced_input_dist(box, d_f),

    since given the registers the outer outputs are local post-processings of
    (a, x) and (b, y).
    """
    _check_fits(c_i, box)
    if e_i.base.shape != c_i.shape or np.abs(e_i.base.p - c_i.p).max() > 1e-9:
        raise ShapeMismatch("extension does not belong to the given correlation")
    _require_feasible(e_i)
    c_f = losr_apply(c_i, box)
    d_f = d_f or InputDistribution.uniform(c_f.n_x, c_f.n_y)
    r = np.einsum("l,lfx,lgy,abxye,m,maxfA,mbygB->ABfgelm",
                  box.in_weights, box.I_A, box.I_B, e_i.r, box.out_weights, box.O_A, box.O_B)
    r = r.reshape(*c_f.shape, -1)
    e_f = ClassicalExtension(c_f, d_f, r)
    return e_f, extension_cmi(e_f)
