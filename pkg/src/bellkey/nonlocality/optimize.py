"""Upper bounds on intrinsic non-locality by searching over classical extensions.

The feasible set for ``r[a,b,x,y,e]`` is the polytope cut out by

* ``sum_e r = p(a,b|x,y)``,
* ``sum_a r`` independent of x (for every b, y, e),
* ``sum_b r`` independent of y (for every a, x, e),
* ``r >= 0``.

The objective is I(A;B|XYE) under the chosen input distribution. Projected
gradient descent runs from several starts; the Euclidean projection onto the
polytope is solved exactly through its dual with a semismooth Newton method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..boxes import Correlation, InputDistribution
from ..polytope import LhvModel, is_local
from .extension import (
    ClassicalExtension,
    NlEstimate,
    _require_ns,
    column_cmi,
    extension_residuals,
    lhv_extension,
    trivial_extension,
)

_LOG_FLOOR = 1e-30
_ROUNDOFF = 1e-14  # decreases below this are treated as noise


@dataclass
class OptimizeOptions:
    starts: int = 16
    seed: int = 0
    max_iter: int = 2000
    patience: int = 50
    min_improvement: float = 1e-10
    lhv_seed: bool = True
    initial_step: float = 0.05


def constraint_matrix(shape: tuple[int, int, int, int], n_lambda: int) -> np.ndarray:
    """Rows of the affine constraints acting on ``r.ravel()`` (right-hand side: marginal, then zeros)."""
    n_a, n_b, n_x, n_y = shape
    idx = np.arange(n_a * n_b * n_x * n_y * n_lambda).reshape(n_a, n_b, n_x, n_y, n_lambda)
    n = idx.size
    rows = []
    for a, b, x, y in np.ndindex(n_a, n_b, n_x, n_y):
        row = np.zeros(n)
        row[idx[a, b, x, y, :]] = 1.0
        rows.append(row)
    for b, y, e in np.ndindex(n_b, n_y, n_lambda):
        for x in range(1, n_x):
            row = np.zeros(n)
            row[idx[:, b, x, y, e]] = 1.0
            row[idx[:, b, 0, y, e]] -= 1.0
            rows.append(row)
    for a, x, e in np.ndindex(n_a, n_x, n_lambda):
        for y in range(1, n_y):
            row = np.zeros(n)
            row[idx[a, :, x, y, e]] = 1.0
            row[idx[a, :, x, 0, e]] -= 1.0
            rows.append(row)
    return np.array(rows)


class PolytopeProjector:
    """Euclidean projection onto {r >= 0, A r = b}.

    The constraint rows are replaced by an orthonormal basis of their span, so
    the dual Newton system ``Q D Q^T`` is well scaled.
    """

    def __init__(self, A: np.ndarray, rhs: np.ndarray):
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        keep = s > 1e-10 * s.max()
        self.Q = Vt[keep]
        self.q = (U[:, keep].T @ rhs) / s[keep]
        self._mu = np.zeros(self.Q.shape[0])

    def __call__(self, z: np.ndarray, tol: float = 1e-14, max_iter: int = 100) -> np.ndarray:
        v, res = self._solve(z, self._mu.copy(), tol, max_iter)
        if res > self.ACCEPT:
            # warm start went bad; retry from the origin of the dual
            v, res = self._solve(z, np.zeros_like(self._mu), tol, 4 * max_iter)
        self.last_residual = res
        return v

    ACCEPT = 1e-12
    last_residual = 0.0

    def _solve(self, z, mu, tol, max_iter):
        Q, q = self.Q, self.q

        def theta(m):
            v = np.maximum(z + Q.T @ m, 0.0)
            return 0.5 * v @ v - q @ m, v

        val, v = theta(mu)
        grad = Q @ v - q
        for _ in range(max_iter):
            if np.abs(grad).max() <= tol:
                break
            active = (z + Q.T @ mu) > 0
            H = (Q[:, active] @ Q[:, active].T) + 1e-12 * np.eye(len(mu))
            step = -np.linalg.solve(H, grad)
            t = 1.0
            while True:
                cand = mu + t * step
                cval, cv = theta(cand)
                if cval <= val + 1e-4 * t * (grad @ step) or t < 1e-12:
                    break
                t *= 0.5
            mu, val, v = cand, cval, cv
            grad = Q @ v - q
        res = float(np.abs(grad).max())
        if res <= self.ACCEPT:
            self._mu = mu
        return v, res


def _objective(r: np.ndarray, weights: np.ndarray) -> tuple[float, np.ndarray, float]:
    """Weighted CMI, its gradient with respect to r (bits), and the max-column value."""
    per = column_cmi(r)
    rf = np.maximum(r, _LOG_FLOOR)
    r_ae = np.maximum(r.sum(axis=1, keepdims=True), _LOG_FLOOR)
    r_be = np.maximum(r.sum(axis=0, keepdims=True), _LOG_FLOOR)
    r_e = np.maximum(r.sum(axis=(0, 1), keepdims=True), _LOG_FLOOR)
    grad = (np.log2(rf) + np.log2(r_e) - np.log2(r_ae) - np.log2(r_be)) * weights[None, None, :, :, None]
    return float((weights * per).sum()), grad, float(per.max())


def _descend(r0: np.ndarray, proj: PolytopeProjector, weights: np.ndarray, opts: OptimizeOptions):
    """Projected gradient with step halving; returns the iterate with the lowest max-column CMI."""
    shape = r0.shape
    r = r0
    f, g, v = _objective(r, weights)
    best_r, best_v = r, v
    history = [f]
    step = opts.initial_step
    for _ in range(opts.max_iter):
        if v <= 1e-13:
            break
        accepted = False
        while step > 1e-14:
            cand = proj((r - step * g).ravel()).reshape(shape)
            if proj.last_residual > proj.ACCEPT:
                step *= 0.5
                continue
            cf, cg, cv = _objective(cand, weights)
            if np.isfinite(cf) and cf < f - _ROUNDOFF:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        r, f, g, v = cand, cf, cg, cv
        step *= 2.0
        if v < best_v:
            best_r, best_v = r, v
        history.append(f)
        if len(history) > opts.patience and history[-opts.patience - 1] - f < opts.min_improvement:
            break
    return best_r, best_v


def _pad_lambda(r: np.ndarray, n_lambda: int) -> np.ndarray | None:
    if r.shape[4] > n_lambda:
        return None
    pad = np.zeros((*r.shape[:4], n_lambda - r.shape[4]))
    return np.concatenate([r, pad], axis=4)


def optimize_extension(c: Correlation, d: InputDistribution | None = None, n_lambda: int | None = None,
                       options: OptimizeOptions | None = None,
                       seeds: list[ClassicalExtension] | None = None) -> NlEstimate:
    """Best upper bound on intrinsic non-locality over classical E with ``n_lambda`` letters.

    Starts are, in order: the trivial extension, an LHV-seeded extension when
    ``c`` is local (and ``options.lhv_seed``), any caller ``seeds``, then
    projected random Dirichlet points up to ``options.starts`` in total. The
    reported value is max_{x,y} I(A;B|E) of the best iterate, which is never
    above the trivial-extension bound.
    """
    _require_ns(c)
    opts = options or OptimizeOptions()
    d = d or InputDistribution.uniform(c.n_x, c.n_y)
    n_lambda = n_lambda or int(np.prod(c.shape))
    rng = np.random.default_rng(opts.seed)

    A = constraint_matrix(c.shape, n_lambda)
    rhs = np.zeros(A.shape[0])
    rhs[: c.p.size] = c.p.ravel()
    proj = PolytopeProjector(A, rhs)
    weights = np.asarray(d.weights)

    initial: list[np.ndarray] = [_pad_lambda(trivial_extension(c).r, n_lambda)]
    if opts.lhv_seed:
        model = is_local(c)
        if isinstance(model, LhvModel):
            seeded = _pad_lambda(lhv_extension(c, model).r, n_lambda)
            if seeded is not None:
                initial.append(seeded)
    for s in seeds or []:
        padded = _pad_lambda(s.r, n_lambda)
        if padded is not None:
            initial.append(padded)

    best_r, best_v, best_start = None, np.inf, -1
    for k in range(max(opts.starts, len(initial))):
        if k < len(initial):
            r0 = initial[k]
        else:
            q = rng.dirichlet(np.ones(n_lambda), size=c.shape)
            r0 = proj((c.p[..., None] * q).ravel()).reshape(*c.shape, n_lambda)
            if proj.last_residual > proj.ACCEPT:
                continue
        r, v = _descend(r0, proj, weights, opts)
        if v < best_v:
            best_r, best_v, best_start = r, v, k
        if best_v <= 1e-13:
            break

    ext = ClassicalExtension(c, d, best_r)
    return NlEstimate(float(best_v), "upper_bound", ext, d, derivation="projected-gradient",
                      details={"start": best_start, "residuals": extension_residuals(ext)})
