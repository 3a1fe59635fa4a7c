"""Bipartite correlations p(a,b|x,y): validation, canonical boxes, combinators.

Tensors are dense, row-major and indexed ``(a, b, x, y)``. Composite
alphabets produced by :func:`product` flatten as ``i = i1 * n2 + i2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadNormalization, NegativeEntry, NotPsd, OutOfRange, ShapeMismatch

INGEST_SLACK = 1e-12
NORM_TOL = 1e-9
PSD_SLACK = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

#: Locality threshold of the two-qubit isotropic family under the DI measurements.
BELL_LOCAL_THRESHOLD = 1.0 - 1.0 / np.sqrt(2.0)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Correlation:
    """A conditional distribution p(a,b|x,y) stored as a 4-index tensor."""

    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _frozen(self.p))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.p.shape

    @property
    def n_a(self) -> int:
        return self.p.shape[0]

    @property
    def n_b(self) -> int:
        return self.p.shape[1]

    @property
    def n_x(self) -> int:
        return self.p.shape[2]

    @property
    def n_y(self) -> int:
        return self.p.shape[3]

    def alice_marginal(self, y: int = 0) -> np.ndarray:
        """p(a|x) read off at Bob input ``y``; shape (n_a, n_x)."""
        return self.p[:, :, :, y].sum(axis=1)

    def bob_marginal(self, x: int = 0) -> np.ndarray:
        """p(b|y) read off at Alice input ``x``; shape (n_b, n_y)."""
        return self.p[:, :, x, :].sum(axis=0)

    def flat(self) -> list[float]:
        return self.p.ravel().tolist()


@dataclass(frozen=True)
class InputDistribution:
    """Probability weights p(x,y) over measurement choices."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2:
            raise ShapeMismatch(f"input distribution must be 2-d, got shape {w.shape}")
        if np.any(w < -INGEST_SLACK):
            raise NegativeEntry("input distribution has negative weight")
        w = np.where(w < 0, 0.0, w)
        if abs(w.sum() - 1.0) > NORM_TOL:
            raise BadNormalization(f"input distribution sums to {w.sum():.12g}")
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def uniform(cls, n_x: int, n_y: int) -> "InputDistribution":
        return cls(np.full((n_x, n_y), 1.0 / (n_x * n_y)))

    @classmethod
    def point(cls, n_x: int, n_y: int, x: int, y: int) -> "InputDistribution":
        w = np.zeros((n_x, n_y))
        w[x, y] = 1.0
        return cls(w)

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


@dataclass(frozen=True)
class NsReport:
    max_alice_residual: float
    max_bob_residual: float
    is_no_signaling: bool

    def to_dict(self) -> dict:
        return {
            "max_alice_residual": self.max_alice_residual,
            "max_bob_residual": self.max_bob_residual,
            "is_no_signaling": self.is_no_signaling,
        }


def validate_correlation(raw, shape: Sequence[int] | None = None) -> Correlation:
    """Check a raw tensor (or flat list) against the correlation invariants.

    Parameters
    ----------
    raw : array_like
        Probabilities, either already shaped ``(n_a, n_b, n_x, n_y)`` or flat
        in that row-major order.
    shape : sequence of int, optional
        Alphabet sizes ``(n_a, n_b, n_x, n_y)``. Required for flat input.

    Raises
    ------
    ShapeMismatch, NegativeEntry, BadNormalization
    """
    arr = np.asarray(raw, dtype=float)
    if shape is not None:
        shape = tuple(int(s) for s in shape)
        if len(shape) != 4 or any(s < 1 for s in shape):
            raise ShapeMismatch(f"alphabet sizes must be 4 positive integers, got {shape}")
        if arr.size != int(np.prod(shape)):
            raise ShapeMismatch(f"expected {int(np.prod(shape))} entries for sizes {shape}, got {arr.size}")
        arr = arr.reshape(shape)
    elif arr.ndim != 4:
        raise ShapeMismatch(f"correlation tensor must be 4-d, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise BadNormalization("correlation contains non-finite entries")
    if np.any(arr < -INGEST_SLACK):
        raise NegativeEntry(f"entry {arr.min():.3g} is below the ingest slack")
    arr = np.where(arr < 0, 0.0, arr)
    sums = arr.sum(axis=(0, 1))
    bad = np.abs(sums - 1.0) > NORM_TOL
    if np.any(bad):
        x, y = np.argwhere(bad)[0]
        raise BadNormalization(f"column (x={x}, y={y}) sums to {sums[x, y]:.12g}")
    return Correlation(arr)


def check_no_signaling(c: Correlation, tol: float = 1e-9) -> NsReport:
    p = c.p
    bob_given_x = p.sum(axis=0)  # (b, x, y)
    alice_given_y = p.sum(axis=1)  # (a, x, y)
    # Alice's input must not move Bob's marginal and vice versa
    r_alice = np.ptp(bob_given_x, axis=1).max(initial=0.0)
    r_bob = np.ptp(alice_given_y, axis=2).max(initial=0.0)
    return NsReport(float(r_alice), float(r_bob), bool(max(r_alice, r_bob) <= tol))


def uniform_box(n_a: int = 2, n_b: int = 2, n_x: int = 2, n_y: int = 2) -> Correlation:
    return Correlation(np.full((n_a, n_b, n_x, n_y), 1.0 / (n_a * n_b)))


def pr_box() -> Correlation:
    """Popescu-Rohrlich box: p(a,b|x,y) = 1/2 iff a XOR b = x AND y."""
    p = np.zeros((2, 2, 2, 2))
    for a, b, x, y in np.ndindex(p.shape):
        if a ^ b == x & y:
            p[a, b, x, y] = 0.5
    return Correlation(p)


def deterministic_box(alice: Sequence[int], bob: Sequence[int], n_a: int = 2, n_b: int = 2) -> Correlation:
    """Product box answering ``a = alice[x]`` and ``b = bob[y]``."""
    n_x, n_y = len(alice), len(bob)
    p = np.zeros((n_a, n_b, n_x, n_y))
    for x in range(n_x):
        for y in range(n_y):
            p[alice[x], bob[y], x, y] = 1.0
    return Correlation(p)


def mix(c1: Correlation, c2: Correlation, lam: float) -> Correlation:
    """Convex combination ``lam * c1 + (1 - lam) * c2``."""
    if c1.shape != c2.shape:
        raise ShapeMismatch(f"cannot mix shapes {c1.shape} and {c2.shape}")
    if not 0.0 <= lam <= 1.0:
        raise OutOfRange(f"mixing weight {lam} outside [0, 1]")
    return Correlation(lam * c1.p + (1.0 - lam) * c2.p)


def product(c1: Correlation, c2: Correlation) -> Correlation:
    """Tensor product of two boxes, composite indices flattened as i1*n2 + i2."""
    t = np.einsum("abxy,cdzw->acbdxzyw", c1.p, c2.p)
    n_a, n_b, n_x, n_y = (s1 * s2 for s1, s2 in zip(c1.shape, c2.shape))
    return Correlation(t.reshape(n_a, n_b, n_x, n_y))


def marginal_first(c: Correlation, shape2: Sequence[int]) -> Correlation:
    """Undo :func:`product` on the second factor by summing it out."""
    n_a2, n_b2, n_x2, n_y2 = shape2
    n_a, n_b, n_x, n_y = c.shape
    t = c.p.reshape(n_a // n_a2, n_a2, n_b // n_b2, n_b2, n_x // n_x2, n_x2, n_y // n_y2, n_y2)
    # any fixed second-factor input works for a no-signaling product; take 0
    return Correlation(t.sum(axis=(1, 3))[:, :, :, 0, :, 0])


# ---------------------------------------------------------------------------
# quantum models


def _check_psd(op: np.ndarray, what: str) -> None:
    if not np.allclose(op, op.conj().T, atol=PSD_SLACK):
        raise NotPsd(f"{what} is not Hermitian")
    if np.linalg.eigvalsh(op).min() < -PSD_SLACK:
        raise NotPsd(f"{what} has a negative eigenvalue")


def _check_povms(povms, what: str) -> tuple[int, int, int]:
    if not len(povms):
        raise ShapeMismatch(f"{what}: no measurements")
    n_out = len(povms[0])
    dim = np.asarray(povms[0][0]).shape[0]
    for i, povm in enumerate(povms):
        if len(povm) != n_out:
            raise ShapeMismatch(f"{what}: measurement {i} has {len(povm)} outcomes, expected {n_out}")
        total = np.zeros((dim, dim), dtype=complex)
        for k, el in enumerate(povm):
            el = np.asarray(el, dtype=complex)
            if el.shape != (dim, dim):
                raise ShapeMismatch(f"{what}: element ({i},{k}) has shape {el.shape}")
            _check_psd(el, f"{what} element ({i},{k})")
            total += el
        if np.abs(total - np.eye(dim)).max() > NORM_TOL:
            raise BadNormalization(f"{what}: measurement {i} does not sum to identity")
    return len(povms), n_out, dim


@dataclass(frozen=True)
class QuantumModel:
    """Bipartite state with local POVMs, ``povms_a[x][a]`` and ``povms_b[y][b]``."""

    state: np.ndarray
    povms_a: list = field(repr=False)
    povms_b: list = field(repr=False)

    def __post_init__(self):
        rho = np.asarray(self.state, dtype=complex)
        n_x, n_a, d_a = _check_povms(self.povms_a, "Alice POVM")
        n_y, n_b, d_b = _check_povms(self.povms_b, "Bob POVM")
        if d_a > 8 or d_b > 8:
            raise ShapeMismatch("local dimensions above 8 are not supported")
        if rho.shape != (d_a * d_b, d_a * d_b):
            raise ShapeMismatch(f"state shape {rho.shape} does not match local dims ({d_a}, {d_b})")
        if abs(np.trace(rho).real - 1.0) > NORM_TOL:
            raise BadNormalization("state trace is not 1")
        _check_psd(rho, "state")
        object.__setattr__(self, "state", rho)

    @property
    def dims(self) -> tuple[int, int]:
        d_a = np.asarray(self.povms_a[0][0]).shape[0]
        return d_a, self.state.shape[0] // d_a


def correlation_from_quantum(m: QuantumModel) -> Correlation:
    """Born rule p(a,b|x,y) = Tr[(A_x^a (x) B_y^b) rho]."""
    A = np.array(m.povms_a, dtype=complex)  # (x, a, i, j)
    B = np.array(m.povms_b, dtype=complex)  # (y, b, k, l)
    d_a, d_b = m.dims
    rho = m.state.reshape(d_a, d_b, d_a, d_b)
    # Tr[(A (x) B) rho] = sum A[i,j] B[k,l] rho[j,l,i,k]
    p = np.einsum("xaij,ybkl,jlik->abxy", A, B, rho).real
    return validate_correlation(p)


def projectors(observable: np.ndarray) -> list[np.ndarray]:
    """Eigenprojectors of a ±1-valued qubit observable, +1 first (outcome 0)."""
    eye = np.eye(observable.shape[0])
    return [(eye + observable) / 2, (eye - observable) / 2]


def phi_plus() -> np.ndarray:
    v = np.zeros(4)
    v[0] = v[3] = 1 / np.sqrt(2)
    return np.outer(v, v).astype(complex)


def isotropic_state(p: float) -> np.ndarray:
    """(1-p) Phi + p I/4 on two qubits."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"noise parameter {p} outside [0, 1]")
    return (1 - p) * phi_plus() + p * np.eye(4) / 4


def isotropic_di_observables() -> tuple[list[np.ndarray], list[np.ndarray]]:
    s = 1 / np.sqrt(2)
    alice = [SIGMA_Z, s * (SIGMA_Z + SIGMA_X), s * (SIGMA_Z - SIGMA_X)]
    bob = [SIGMA_Z, SIGMA_X]
    return alice, bob


def isotropic_di_model(p: float) -> QuantumModel:
    alice, bob = isotropic_di_observables()
    return QuantumModel(isotropic_state(p), [projectors(o) for o in alice], [projectors(o) for o in bob])


def isotropic_di_correlation(p: float) -> Correlation:
    """Correlation of the isotropic state under the 3-vs-2 DI measurement set.

    Alice measures sigma_z, (sigma_z + sigma_x)/sqrt2, (sigma_z - sigma_x)/sqrt2;
    Bob measures sigma_z, sigma_x. Outcome 0 is the +1 eigenvalue. Computed
    from Bloch vectors: marginals are uniform and the correlator is
    (1 - p) times the dot product of the x-z Bloch vectors.
    """
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"noise parameter {p} outside [0, 1]")
    s = 1 / np.sqrt(2)
    alice = np.array([[0.0, 1.0], [s, s], [-s, s]])  # (x-component, z-component)
    bob = np.array([[0.0, 1.0], [1.0, 0.0]])
    corr = (1 - p) * alice @ bob.T  # (x, y)
    sign = np.array([[1.0, -1.0], [-1.0, 1.0]])  # (-1)^(a xor b)
    q = (1 + sign[:, :, None, None] * corr[None, None]) / 4
    return Correlation(q)
