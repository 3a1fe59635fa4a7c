"""Rounding a low-CMI correlation to a local one with a cheat sheet.

For classical E the recovery step is Bayesian resampling: given e and a
measurement choice x_i, draw a_i from p(a|x_i, e). The hidden variable is
``(e, x_1, a_1, ..., x_n, a_n)`` with the x_i uniform. On input x~ Alice picks
uniformly among the rounds with x_i = x~ and outputs that a_i, or a uniform
symbol if x~ never occurred. Bob answers with p(b|y, e).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..boxes import Correlation
from ..errors import ConstraintViolation, OutOfDomain, OutOfRange, TooLarge
from .extension import ClassicalExtension, _require_feasible, extension_cmi

MAX_ENUMERATION = 10**6


def typicality_epsilon(n: int, delta: float, n_x: int) -> float:
    """2|X| exp(-n delta^2 mu / 3) for uniform p(x), mu = 1/|X|."""
    return 2.0 * n_x * np.exp(-n * delta**2 / (3.0 * n_x))


def rounding_bound(n: int, delta: float, n_x: int, t: float = 0.0) -> float:
    """n t + delta/(1 - delta) + 2 eps_1."""
    if not 0.0 < delta < 1.0:
        raise OutOfRange(f"delta must lie in (0, 1), got {delta}")
    return n * t + delta / (1.0 - delta) + 2.0 * typicality_epsilon(n, delta, n_x)


def typicality_schedule(eps: float, d: int) -> tuple[float, float]:
    """(n, delta) = (eps^{-1/4}, eps^{1/16} d^{1/2})."""
    return eps ** -0.25, eps ** (1 / 16) * np.sqrt(d)


def faithfulness_bound(eps: float, d: int) -> float:
    """d (eps^{1/4} + delta/(1-delta) + 4 d e^{-eps^{-1/4}/3}) with delta = eps^{1/16} d^{1/2}."""
    if eps <= 0 or d < 1:
        raise OutOfDomain(f"need eps > 0 and d >= 1, got eps={eps}, d={d}")
    _, delta = typicality_schedule(eps, d)
    if not 0.0 < delta < 1.0:
        raise OutOfDomain(f"eps^(1/16) d^(1/2) = {delta:.6g} is not in (0, 1)")
    return d * (eps**0.25 + delta / (1.0 - delta) + 4.0 * d * np.exp(-(eps ** -0.25) / 3.0))


@dataclass(frozen=True)
class RoundingResult:
    local: Correlation
    distances: np.ndarray  # L1 distance sum_{a,b} |l - c| per (x, y)
    bound: float | None
    mode: str
    details: dict = field(default_factory=dict, repr=False)

    @property
    def max_distance(self) -> float:
        return float(self.distances.max())


def recovery_conditionals(e: ClassicalExtension) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(p(e), p(a|x,e) as [e,x,a], p(b|y,e) as [e,y,b]) derived from r.

    Letters with zero weight get uniform conditionals; they never contribute.
    """
    r = e.r
    r_e = r[:, :, 0, 0, :].sum(axis=(0, 1))
    alice = r[:, :, :, 0, :].sum(axis=1)  # (a, x, e)
    bob = r[:, :, 0, :, :].sum(axis=0)  # (b, y, e)
    safe = np.where(r_e > 0, r_e, 1.0)
    p_a = np.where(r_e > 0, alice / safe, 1.0 / r.shape[0]).transpose(2, 1, 0)
    p_b = np.where(r_e > 0, bob / safe, 1.0 / r.shape[1]).transpose(2, 1, 0)
    return r_e, p_a, p_b


def _alice_rule(xs: np.ndarray, as_: np.ndarray, n_x: int, n_a: int) -> np.ndarray:
    """q(a~|x~) for one cheat sheet; shape (n_x, n_a)."""
    q = np.full((n_x, n_a), 1.0 / n_a)
    for xt in range(n_x):
        hits = as_[xs == xt]
        if len(hits):
            q[xt] = np.bincount(hits, minlength=n_a) / len(hits)
    return q


def cheat_sheet_rounding(c: Correlation, e: ClassicalExtension, n: int, mode: str = "exact",
                         seed: int | None = 0, delta: float | None = None,
                         samples: int = 4000) -> RoundingResult:
    """Local correlation produced by the cheat-sheet algorithm, and its distance to ``c``.

    ``mode="exact"`` enumerates every (x^n, a^n) per letter e; ``mode="sampled"``
    draws ``samples`` hidden variables with the given seed. When ``delta`` is
    given the result carries the bound n t + delta/(1-delta) + 2 eps_1 with
    t = sqrt(I(A;B|XYE) ln 2) evaluated on ``e``.
    """
    if n < 1:
        raise OutOfRange("need at least one round")
    if e.base.shape != c.shape or np.abs(e.base.p - c.p).max() > 1e-9:
        raise ConstraintViolation("extension does not belong to the correlation")
    _require_feasible(e)
    n_a, n_b, n_x, n_y = c.shape
    p_e, p_a, p_b = recovery_conditionals(e)
    live = np.flatnonzero(p_e > 0)
    q_alice = np.zeros((len(live), n_x, n_a))

    if mode == "exact":
        count = len(live) * (n_x * n_a) ** n
        if count > MAX_ENUMERATION:
            raise TooLarge(f"exact enumeration needs {count} terms (limit {MAX_ENUMERATION})")
        seqs_x = np.array(list(itertools.product(range(n_x), repeat=n)), dtype=int)
        seqs_a = np.array(list(itertools.product(range(n_a), repeat=n)), dtype=int)
        rules = np.array([[_alice_rule(xs, as_, n_x, n_a) for as_ in seqs_a] for xs in seqs_x])
        for k, ev in enumerate(live):
            # probability of a^n given x^n, for every (x^n, a^n) pair
            w = p_a[ev][seqs_x[:, None, :], seqs_a[None, :, :]].prod(axis=2) / n_x**n
            q_alice[k] = np.einsum("ij,ijxa->xa", w, rules)
        weights = p_e[live]
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        draws = rng.choice(len(live), size=samples, p=p_e[live] / p_e[live].sum())
        for k in range(len(live)):
            m = int((draws == k).sum())
            if m == 0:
                q_alice[k] = p_a[live[k]]  # weight estimate is zero anyway
                continue
            acc = np.zeros((n_x, n_a))
            for _ in range(m):
                xs = rng.integers(n_x, size=n)
                cdf = np.cumsum(p_a[live[k]][xs], axis=1)
                as_ = (rng.random(n)[:, None] > cdf).sum(axis=1).clip(max=n_a - 1)
                acc += _alice_rule(xs, as_, n_x, n_a)
            q_alice[k] = acc / m
        weights = np.bincount(draws, minlength=len(live)) / samples
    else:
        raise ValueError(f"unknown mode {mode!r}")

    local = np.einsum("k,kxa,kyb->abxy", weights, q_alice, p_b[live])
    local = Correlation(local / local.sum(axis=(0, 1), keepdims=True))
    dist = np.abs(local.p - c.p).sum(axis=(0, 1))
    bound = None
    details = {"n_letters": int(len(live))}
    if delta is not None:
        t = float(np.sqrt(extension_cmi(e) * np.log(2.0)))
        bound = rounding_bound(n, delta, n_x, t)
        details.update(t=t, eps1=typicality_epsilon(n, delta, n_x), delta=delta)
    return RoundingResult(local, dist, bound, mode, details)
