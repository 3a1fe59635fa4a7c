"""Assemblages, restricted intrinsic steerability bounds and the isotropic one-sided closed forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._scalar import grid_golden_min
from .boxes import SIGMA_X, SIGMA_Z, InputDistribution, isotropic_state, projectors, _check_povms, _check_psd
from .errors import BadNormalization, NotNoSignaling, NotPsd, OutOfRange, ShapeMismatch
from .infotheory import CqState, binary_entropy, cmi_cq
from .nonlocality.rounding import faithfulness_bound

PSD_SLACK = 1e-9
NORM_TOL = 1e-9
UNSTEERABLE_THRESHOLD = 0.5


@dataclass(frozen=True)
class Assemblage:
    """Sub-normalized conditional states ``ops[a, x]`` on Bob's space."""

    ops: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=complex)
        if ops.ndim != 4 or ops.shape[2] != ops.shape[3]:
            raise ShapeMismatch(f"assemblage must have shape (n_a, n_x, d, d), got {ops.shape}")
        if np.abs(ops - np.swapaxes(ops.conj(), -1, -2)).max(initial=0.0) > PSD_SLACK:
            raise NotPsd("an assemblage element is not Hermitian")
        ops = (ops + np.swapaxes(ops.conj(), -1, -2)) / 2
        if np.linalg.eigvalsh(ops.reshape(-1, *ops.shape[2:])).min() < -PSD_SLACK:
            raise NotPsd("an assemblage element has a negative eigenvalue")
        traces = np.trace(ops, axis1=-2, axis2=-1).real.sum(axis=0)
        if np.abs(traces - 1.0).max() > NORM_TOL:
            raise BadNormalization(f"sum_a tr rho^(a,x) = {traces} is not 1 for every x")
        reduced = ops.sum(axis=0)
        spread = max((np.linalg.norm(reduced[x] - reduced[0], 2) for x in range(ops.shape[1])), default=0.0)
        if spread > NORM_TOL:
            raise NotNoSignaling(f"Bob's reduced state depends on x (spread {spread:.3g})")
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)

    @property
    def n_a(self) -> int:
        return self.ops.shape[0]

    @property
    def n_x(self) -> int:
        return self.ops.shape[1]

    @property
    def d_b(self) -> int:
        return self.ops.shape[2]

    def bob_state(self) -> np.ndarray:
        return self.ops[:, 0].sum(axis=0)

    def cq_state(self, p_x: np.ndarray | None = None) -> CqState:
        """sum_{x,a} p_X(x) [x a] (x) rho^(a,x), axes ("X", "A") and quantum "B"."""
        p_x = np.full(self.n_x, 1.0 / self.n_x) if p_x is None else np.asarray(p_x, dtype=float)
        if p_x.shape != (self.n_x,):
            raise ShapeMismatch("p_X does not match the input alphabet")
        blocks = p_x[:, None, None, None] * np.swapaxes(self.ops, 0, 1)
        return CqState(("X", "A"), blocks, quantum="B")


def assemblage_from_state(state: np.ndarray, povms_a, d_a: int | None = None) -> Assemblage:
    """rho^(a,x) = tr_A[(Lambda_x^a (x) I) rho_AB]; ``povms_a[x][a]`` act on Alice's factor."""
    state = np.asarray(state, dtype=complex)
    _check_psd(state, "state")
    if abs(np.trace(state).real - 1.0) > NORM_TOL:
        raise BadNormalization("state trace is not 1")
    n_x, n_a, d_a_povm = _check_povms(povms_a, "Alice")
    d_a = d_a or d_a_povm
    d_b, rem = divmod(state.shape[0], d_a)
    if rem or d_a != d_a_povm:
        raise ShapeMismatch("state dimension does not factor as d_A * d_B")
    rho = state.reshape(d_a, d_b, d_a, d_b)
    povms = np.asarray(povms_a, dtype=complex)  # (x, a, i, j)
    ops = np.einsum("xaji,ikjl->axkl", povms, rho)
    return Assemblage(ops)


def qubit_basis_povms() -> list[list[np.ndarray]]:
    """Alice measures sigma_z then sigma_x; outcome 0 is the +1 eigenvector."""
    return [projectors(SIGMA_Z), projectors(SIGMA_X)]


def isotropic_assemblage(p: float) -> Assemblage:
    """rho^(a,x) = ((1-p) |psi_{a,x}><psi_{a,x}| + p I/2) / 2 for the z and x bases."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"noise parameter {p} outside [0, 1]")
    pi = np.eye(2) / 2
    ops = np.array([[((1 - p) * P + p * pi) / 2 for P in basis] for basis in qubit_basis_povms()])
    return Assemblage(np.swapaxes(ops, 0, 1))


def isotropic_assemblage_from_state(p: float) -> Assemblage:
    return assemblage_from_state(isotropic_state(p), qubit_basis_povms(), d_a=2)


def ris_per_input(asm: Assemblage) -> np.ndarray:
    """I(A;B) of the cq state at each fixed input x."""
    out = np.empty(asm.n_x)
    for x in range(asm.n_x):
        s = CqState(("A",), asm.ops[:, x], quantum="B")
        out[x] = cmi_cq(s, ["A"], ["B"])
    return out


def ris_trivial_bound(asm: Assemblage) -> float:
    """max_x I(A;B)_x: the trivial-extension bound on restricted intrinsic steerability.

    For a fixed extension the average over p_X of I(A;B|E, X=x) is linear in
    p_X, so its supremum sits at a point mass.
    """
    return float(ris_per_input(asm).max())


# ---------------------------------------------------------------------------
# local-hidden-state assemblages and their hidden-variable extension


def lhs_assemblage(weights, responses, states) -> Assemblage:
    """rho^(a,x) = sum_l p(l) p(a|x,l) rho_l; ``responses[l, x, a]``, ``states[l]`` normalized."""
    weights = np.asarray(weights, dtype=float)
    responses = np.asarray(responses, dtype=float)
    states = np.asarray(states, dtype=complex)
    return Assemblage(np.einsum("l,lxa,lij->axij", weights, responses, states))


def lhs_extension(weights, responses, states, p_x=None) -> CqState:
    """cq state over (X, A, E) and Bob, with E the hidden variable; I(A;B|EX) vanishes."""
    weights = np.asarray(weights, dtype=float)
    responses = np.asarray(responses, dtype=float)
    states = np.asarray(states, dtype=complex)
    n_x = responses.shape[1]
    p_x = np.full(n_x, 1.0 / n_x) if p_x is None else np.asarray(p_x, dtype=float)
    blocks = np.einsum("x,l,lxa,lij->xalij", p_x, weights, responses, states)
    return CqState(("X", "A", "E"), blocks, quantum="B")


# ---------------------------------------------------------------------------
# isotropic one-sided bounds


def sdi_inner(eps):
    """1 + (e/2) log2(e/2) + (1 - e/2) log2(1 - e/2) = 1 - h(e/2)."""
    return 1.0 - binary_entropy(np.asarray(eps, dtype=float) / 2.0)


def sdi_alpha(p: float, eps, threshold: float = UNSTEERABLE_THRESHOLD):
    """Weight of the unsteerable p=1/2 member in the decomposition of the p assemblage."""
    return (p - np.asarray(eps, dtype=float)) / (threshold - np.asarray(eps, dtype=float))


def sdi_isotropic_upper(p: float) -> float:
    """min_{0<=e<=p} (1 - alpha(e)) (1 - h(e/2)); zero once the assemblage is unsteerable."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"noise parameter {p} outside [0, 1]")
    if p >= UNSTEERABLE_THRESHOLD:
        return 0.0
    _, val = grid_golden_min(lambda e: (1.0 - sdi_alpha(p, e)) * sdi_inner(e), 0.0, p)
    return max(val, 0.0)


def steering_faithfulness_bound(eps: float, n_x: int) -> float:
    """|X| (eps^{1/4} + delta/(1-delta) + 4|X| e^{-eps^{-1/4}/3}), delta = eps^{1/16} |X|^{1/2}."""
    return faithfulness_bound(eps, n_x)


def uniform_p_x(n_x: int) -> np.ndarray:
    return InputDistribution.uniform(n_x, 1).weights[:, 0]
