"""Extensions assembled from other extensions: flagged mixtures and products."""

from __future__ import annotations

import numpy as np

from ..boxes import InputDistribution, mix, product
from ..errors import OutOfRange, ShapeMismatch
from .extension import ClassicalExtension, _require_feasible


def convexity_flag_extension(e_p: ClassicalExtension, e_q: ClassicalExtension, lam: float) -> ClassicalExtension:
    """Extension of ``mix(p, q, lam)`` whose register is (E, flag).

    The lambda alphabets are concatenated: the first block carries ``lam * r_p``,
    the second ``(1 - lam) * r_q``. Because the flag is independent of the
    inputs, its CMI is exactly ``lam * cmi(e_p) + (1 - lam) * cmi(e_q)``.
    """
    if not 0.0 <= lam <= 1.0:
        raise OutOfRange(f"mixing weight {lam} outside [0, 1]")
    if e_p.base.shape != e_q.base.shape:
        raise ShapeMismatch("extensions have different alphabets")
    if np.abs(e_p.input_dist.weights - e_q.input_dist.weights).max() > 1e-12:
        raise ShapeMismatch("extensions use different input distributions")
    _require_feasible(e_p)
    _require_feasible(e_q)
    r = np.concatenate([lam * e_p.r, (1.0 - lam) * e_q.r], axis=4)
    return ClassicalExtension(mix(e_p.base, e_q.base, lam), e_p.input_dist, r)


def product_extension(e1: ClassicalExtension, e2: ClassicalExtension) -> ClassicalExtension:
    """Extension of ``product(c1, c2)`` with register (E1, E2) and product inputs.

    Composite indices are flattened row-major, as in :func:`bellkey.boxes.product`.
    """
    _require_feasible(e1)
    _require_feasible(e2)
    c = product(e1.base, e2.base)
    r = np.einsum("abxye,cdzwf->acbdxzywef", e1.r, e2.r).reshape(*c.shape, e1.n_lambda * e2.n_lambda)
    d = np.einsum("xy,zw->xzyw", e1.input_dist.weights, e2.input_dist.weights).reshape(c.n_x, c.n_y)
    return ClassicalExtension(c, InputDistribution(d), r)
