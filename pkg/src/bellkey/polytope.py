"""Local polytope: deterministic vertices, LP membership, Bell functionals."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .boxes import BELL_LOCAL_THRESHOLD, Correlation, isotropic_di_correlation
from .errors import BadSelection, OutOfRange, SolverFailure, TooLarge

MAX_VERTICES = 10**6


def _check_count(n_a, n_b, n_x, n_y) -> int:
    count = n_a**n_x * n_b**n_y
    if count > MAX_VERTICES:
        raise TooLarge(f"{count} deterministic strategies exceed the limit of {MAX_VERTICES}")
    return count


def strategies(n_a: int, n_b: int, n_x: int, n_y: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (f, g) pairs in lexicographic order; f[x] is Alice's answer, g[y] Bob's."""
    _check_count(n_a, n_b, n_x, n_y)
    fs = list(itertools.product(range(n_a), repeat=n_x))
    gs = list(itertools.product(range(n_b), repeat=n_y))
    return [(f, g) for f in fs for g in gs]


def vertex_matrix(n_a: int, n_b: int, n_x: int, n_y: int) -> np.ndarray:
    """Rows are flattened deterministic boxes, in :func:`strategies` order."""
    _check_count(n_a, n_b, n_x, n_y)
    fs = np.array(list(itertools.product(range(n_a), repeat=n_x)), dtype=int).reshape(-1, n_x)
    gs = np.array(list(itertools.product(range(n_b), repeat=n_y)), dtype=int).reshape(-1, n_y)
    alice = np.eye(n_a)[fs]  # (f, x, a)
    bob = np.eye(n_b)[gs]  # (g, y, b)
    v = np.einsum("fxa,gyb->fgabxy", alice, bob)
    return v.reshape(len(fs) * len(gs), -1)


def local_vertices(n_a: int, n_b: int, n_x: int, n_y: int) -> list[Correlation]:
    rows = vertex_matrix(n_a, n_b, n_x, n_y)
    return [Correlation(r.reshape(n_a, n_b, n_x, n_y)) for r in rows]


@dataclass(frozen=True)
class LhvModel:
    """Mixture of deterministic strategies; ``strategies[i] = (f, g)``."""

    weights: np.ndarray
    strategies: tuple
    shape: tuple[int, int, int, int]

    def correlation(self) -> Correlation:
        n_a, n_b, n_x, n_y = self.shape
        p = np.zeros(self.shape)
        xs, ys = np.arange(n_x), np.arange(n_y)
        for w, (f, g) in zip(self.weights, self.strategies):
            p[np.asarray(f)[:, None], np.asarray(g)[None, :], xs[:, None], ys[None, :]] += w
        return Correlation(p)

    def to_dict(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "strategies": [{"alice": list(f), "bob": list(g)} for f, g in self.strategies],
        }


@dataclass(frozen=True)
class BellCertificate:
    """Linear functional sum beta(a,b,x,y) p(a,b|x,y) separating a box from L."""

    coefficients: np.ndarray
    local_bound: float
    value_on_target: float

    @property
    def violation(self) -> float:
        return self.value_on_target - self.local_bound

    def evaluate(self, c: Correlation) -> float:
        return float((self.coefficients * c.p).sum())

    def to_dict(self) -> dict:
        return {
            "coefficients": self.coefficients.ravel().tolist(),
            "local_bound": self.local_bound,
            "value_on_target": self.value_on_target,
            "violation": self.violation,
        }


def _solve(**kw):
    res = linprog(method="highs", **kw)
    if res.status != 0:
        raise SolverFailure(f"linear program failed: {res.message}")
    return res


def _min_slack(target: np.ndarray, V: np.ndarray):
    """min s subject to |V^T w - target| <= s entrywise, w in the simplex."""
    n_v, n = V.shape
    cost = np.zeros(n_v + 1)
    cost[-1] = 1.0
    ones = np.ones((n, 1))
    A_ub = np.block([[V.T, -ones], [-V.T, -ones]])
    b_ub = np.concatenate([target, -target])
    A_eq = np.concatenate([np.ones(n_v), [0.0]])[None, :]
    res = _solve(c=cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                 bounds=[(0, None)] * n_v + [(0, None)])
    return res.x[:-1], res.x[-1]


def _separating_functional(target: np.ndarray, V: np.ndarray) -> np.ndarray:
    """max beta.target - L subject to beta.V_k <= L for all k, |beta| <= 1."""
    n_v, n = V.shape
    cost = np.concatenate([-target, [1.0]])
    A_ub = np.hstack([V, -np.ones((n_v, 1))])
    res = _solve(c=cost, A_ub=A_ub, b_ub=np.zeros(n_v),
                 bounds=[(-1, 1)] * n + [(None, None)])
    return res.x[:-1]


def is_local(c: Correlation, tol: float = 1e-9) -> LhvModel | BellCertificate:
    """Decide membership of ``c`` in the local polytope.

    Returns an :class:`LhvModel` reproducing ``c`` within ``tol`` in every
    entry, or a :class:`BellCertificate` whose violation exceeds ``tol``.
    """
    V = vertex_matrix(*c.shape)
    target = c.p.ravel()
    w, slack = _min_slack(target, V)
    if slack <= tol:
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        support = np.flatnonzero(w > 0)
        strats = strategies(*c.shape)
        model = LhvModel(w[support], tuple(strats[i] for i in support), c.shape)
        if np.abs(model.correlation().p - c.p).max() <= tol:
            return model
    beta = _separating_functional(target, V)
    values = V @ beta
    cert = BellCertificate(beta.reshape(c.shape), float(values.max()), float(beta @ target))
    if cert.violation <= tol:
        # borderline: the slack LP and the separation LP disagree within solver tolerance
        raise SolverFailure(f"membership undecided at tol={tol} (slack {slack:.3g}, violation {cert.violation:.3g})")
    return cert


def local_distance(c: Correlation) -> float:
    """min over local l of max_{x,y} sum_{a,b} |c - l|."""
    V = vertex_matrix(*c.shape)
    n_v, n = V.shape
    n_a, n_b, n_x, n_y = c.shape
    target = c.p.ravel()
    # variables: w (n_v), t (n), D
    cost = np.zeros(n_v + n + 1)
    cost[-1] = 1.0
    eye = np.eye(n)
    col = np.zeros((n_x * n_y, n))
    for idx, (a, b, x, y) in enumerate(np.ndindex(c.shape)):
        col[x * n_y + y, idx] = 1.0
    A_ub = np.block([
        [V.T, -eye, np.zeros((n, 1))],
        [-V.T, -eye, np.zeros((n, 1))],
        [np.zeros((n_x * n_y, n_v)), col, -np.ones((n_x * n_y, 1))],
    ])
    b_ub = np.concatenate([target, -target, np.zeros(n_x * n_y)])
    A_eq = np.concatenate([np.ones(n_v), np.zeros(n + 1)])[None, :]
    res = _solve(c=cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                 bounds=[(0, None)] * (n_v + n + 1))
    return float(res.x[-1])


def correlators(c: Correlation) -> np.ndarray:
    """E(x,y) = sum (-1)^(a xor b) p(a,b|x,y) for binary outcomes."""
    if c.n_a != 2 or c.n_b != 2:
        raise BadSelection("correlators need binary outcomes")
    sign = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return np.einsum("ab,abxy->xy", sign, c.p)


def chsh_value(c: Correlation, alice_inputs=(0, 1), bob_inputs=(0, 1)) -> float:
    """S = sum over the selected 2x2 inputs of (-1)^(x y) E(x, y); the PR box scores 4."""
    alice_inputs, bob_inputs = tuple(alice_inputs), tuple(bob_inputs)
    if len(alice_inputs) != 2 or len(bob_inputs) != 2:
        raise BadSelection("CHSH needs exactly two inputs per side")
    if len(set(alice_inputs)) != 2 or len(set(bob_inputs)) != 2:
        raise BadSelection("selected inputs must be distinct")
    if not all(0 <= x < c.n_x for x in alice_inputs) or not all(0 <= y < c.n_y for y in bob_inputs):
        raise BadSelection("selected input out of range")
    E = correlators(c)
    return float(sum((-1) ** (i * j) * E[x, y]
                     for i, x in enumerate(alice_inputs) for j, y in enumerate(bob_inputs)))


def isotropic_decomposition(p: float, eps: float) -> float:
    """Weight alpha with q(p) = (1 - alpha) q(eps) + alpha q(threshold)."""
    t = BELL_LOCAL_THRESHOLD
    if not (0.0 <= eps <= p <= t):
        raise OutOfRange(f"need 0 <= eps <= p <= 1 - 1/sqrt2, got eps={eps}, p={p}")
    if eps == t:
        return 0.0
    return (p - eps) / (t - eps)


def isotropic_local_part() -> Correlation:
    return isotropic_di_correlation(BELL_LOCAL_THRESHOLD)
