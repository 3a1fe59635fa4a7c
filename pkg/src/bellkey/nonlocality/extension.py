"""No-signaling extensions with a classical eavesdropper register E.

An extension is stored as the tensor ``r[a, b, x, y, e] = p(a,b|x,y) q(e|a,b,x,y)``,
i.e. conditional on the inputs. The joint weight used for entropies is
``w = p(x,y) * r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from ..boxes import Correlation, InputDistribution, check_no_signaling
from ..errors import ConstraintViolation, ModelMismatch, NotNoSignaling, ShapeMismatch
from ..infotheory import JointDistribution, cmi
from ..polytope import LhvModel

FEASIBILITY_TOL = 1e-6


@dataclass(frozen=True)
class ClassicalExtension:
    base: Correlation
    input_dist: InputDistribution
    r: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        if r.ndim != 5 or r.shape[:4] != self.base.shape:
            raise ShapeMismatch(f"extension of shape {r.shape} does not fit base {self.base.shape}")
        if self.input_dist.shape != (self.base.n_x, self.base.n_y):
            raise ShapeMismatch("input distribution does not match the base inputs")
        if np.any(r < -1e-12):
            raise ConstraintViolation("extension has negative weight")
        r = np.clip(r, 0.0, None)
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def n_lambda(self) -> int:
        return self.r.shape[4]

    @property
    def w(self) -> np.ndarray:
        """Joint weight w(a,b,x,y,e) including the input distribution."""
        return self.r * self.input_dist.weights[None, None, :, :, None]

    def with_input_dist(self, d: InputDistribution) -> "ClassicalExtension":
        return replace(self, input_dist=d)


@dataclass(frozen=True)
class NlEstimate:
    value: float
    kind: str  # "exact" | "upper_bound"
    witness: Any = field(repr=False)
    input_dist_used: InputDistribution | None = field(default=None, repr=False)
    derivation: str = ""
    details: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        out = {"value": self.value, "kind": self.kind}
        if self.derivation:
            out["derivation"] = self.derivation
        return out


def extension_residuals(e: ClassicalExtension) -> tuple[float, float, float]:
    """Max-abs residuals of (marginal, Alice no-signaling, Bob no-signaling)."""
    r = e.r
    marginal = np.abs(r.sum(axis=4) - e.base.p).max()
    alice = np.ptp(r.sum(axis=0), axis=1).max()  # (b, x, y, e): spread over x
    bob = np.ptp(r.sum(axis=1), axis=2).max()  # (a, x, y, e): spread over y
    return float(marginal), float(alice), float(bob)


def _require_feasible(e: ClassicalExtension, tol: float = FEASIBILITY_TOL) -> None:
    res = extension_residuals(e)
    if max(res) > tol:
        raise ConstraintViolation(f"extension residuals {res} exceed {tol}")


def extension_cmi(e: ClassicalExtension) -> float:
    """I(A;B|XYE) of the joint distribution ``w`` under the extension's input distribution."""
    _require_feasible(e)
    w = e.w
    d = JointDistribution(("A", "B", "X", "Y", "E"), w / w.sum())
    return cmi(d, ["A"], ["B"], ["X", "Y", "E"])


def column_cmi(r: np.ndarray) -> np.ndarray:
    """I(A;B|E) for every input pair at once; returns an (n_x, n_y) array in bits.

    ``r`` is indexed (a, b, x, y, e) and every (x, y) slice sums to 1.
    """
    def ent(t, axes):
        m = t.sum(axis=axes) if axes else t
        with np.errstate(divide="ignore", invalid="ignore"):
            h = np.where(m > 0, -m * np.log2(np.where(m > 0, m, 1.0)), 0.0)
        return h

    h_abe = ent(r, ()).sum(axis=(0, 1, 4))
    h_ae = ent(r, (1,)).sum(axis=(0, 3))
    h_be = ent(r, (0,)).sum(axis=(0, 3))
    h_e = ent(r, (0, 1)).sum(axis=2)
    return np.clip(h_ae + h_be - h_e - h_abe, 0.0, None)


def extension_value(e: ClassicalExtension) -> float:
    """max over (x, y) of I(A;B|E) at that input pair.

    For a fixed extension the input-averaged CMI is linear in p(x,y), so this
    is its supremum over input distributions.
    """
    return float(column_cmi(e.r).max())


def trivial_extension(c: Correlation, d: InputDistribution | None = None) -> ClassicalExtension:
    d = d or InputDistribution.uniform(c.n_x, c.n_y)
    return ClassicalExtension(c, d, c.p[..., None])


def _require_ns(c: Correlation, tol: float = FEASIBILITY_TOL) -> None:
    rep = check_no_signaling(c, tol)
    if not rep.is_no_signaling:
        raise NotNoSignaling(
            f"residuals alice={rep.max_alice_residual:.3g}, bob={rep.max_bob_residual:.3g} exceed {tol}"
        )


def trivial_extension_bound(c: Correlation) -> NlEstimate:
    """max_{x,y} I(A;B) at that input pair, an upper bound on intrinsic non-locality."""
    _require_ns(c)
    e = trivial_extension(c)
    per = column_cmi(e.r)
    x, y = np.unravel_index(np.argmax(per), per.shape)
    point = InputDistribution.point(c.n_x, c.n_y, int(x), int(y))
    return NlEstimate(float(per[x, y]), "upper_bound", e.with_input_dist(point), point,
                      derivation="trivial-extension", details={"per_input": per})


def lhv_extension(c: Correlation, m: LhvModel, d: InputDistribution | None = None,
                  tol: float = 1e-7) -> ClassicalExtension:
    """Extension whose E register is the hidden variable of ``m``."""
    if m.shape != c.shape:
        raise ModelMismatch(f"model shape {m.shape} differs from correlation shape {c.shape}")
    if np.abs(m.correlation().p - c.p).max() > tol:
        raise ModelMismatch("hidden-variable model does not reproduce the correlation")
    n_a, n_b, n_x, n_y = c.shape
    r = np.zeros((*c.shape, len(m.weights)))
    xs, ys = np.arange(n_x), np.arange(n_y)
    for k, (wt, (f, g)) in enumerate(zip(m.weights, m.strategies)):
        r[np.asarray(f)[:, None], np.asarray(g)[None, :], xs[:, None], ys[None, :], k] = wt
    d = d or InputDistribution.uniform(n_x, n_y)
    return ClassicalExtension(c, d, r)
