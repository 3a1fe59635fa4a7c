import itertools

import numpy as np
import pytest

from bellkey.boxes import Correlation, deterministic_box
from bellkey.nonlocality import ClassicalExtension
from bellkey.nonlocality.optimize import PolytopeProjector, constraint_matrix
from bellkey.boxes import InputDistribution


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def deterministic_boxes():
    """The 16 deterministic 2x2x2x2 boxes in lexicographic (f, g) order."""
    fs = list(itertools.product(range(2), repeat=2))
    return [deterministic_box(f, g) for f in fs for g in fs]


def pr_relabelings():
    """The 8 nonlocal vertices: a xor b = x y xor u x xor v y xor w."""
    out = []
    for u, v, w in itertools.product(range(2), repeat=3):
        p = np.zeros((2, 2, 2, 2))
        for a, b, x, y in itertools.product(range(2), repeat=4):
            if a ^ b == (x * y) ^ (u * x) ^ (v * y) ^ w:
                p[a, b, x, y] = 0.5
        out.append(Correlation(p))
    return out


def random_local(rng, k=None):
    verts = deterministic_boxes()
    k = k or len(verts)
    idx = rng.choice(len(verts), size=k, replace=False)
    w = rng.dirichlet(np.ones(k))
    return Correlation(sum(wi * verts[i].p for wi, i in zip(w, idx)))


def random_ns(rng):
    verts = deterministic_boxes() + pr_relabelings()
    w = rng.dirichlet(np.full(len(verts), 0.3))
    return Correlation(sum(wi * v.p for wi, v in zip(w, verts)))


def random_extension(c, n_lambda, rng, d=None):
    """A random feasible extension: projected Dirichlet split of every entry."""
    A = constraint_matrix(c.shape, n_lambda)
    rhs = np.zeros(A.shape[0])
    rhs[: c.p.size] = c.p.ravel()
    proj = PolytopeProjector(A, rhs)
    q = rng.dirichlet(np.ones(n_lambda), size=c.shape)
    r = proj((c.p[..., None] * q).ravel()).reshape(*c.shape, n_lambda)
    d = d or InputDistribution.uniform(c.n_x, c.n_y)
    return ClassicalExtension(c, d, r)
