"""Entropies and conditional mutual information, in bits.

Classical distributions carry named axes so callers can ask for
``cmi(d, ["A"], ["B"], ["X", "Y", "E"])`` directly. Classical-quantum states
hold one sub-normalized operator per classical index tuple; the quantum
factor is addressed by its own name (``"Q"`` unless set otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AxisOverlap, BadNormalization, NegativeEntry, NotPsd, ShapeMismatch

ZERO_EIG = 1e-12
PSD_SLACK = 1e-9
CMI_CLAMP = 1e-10


def entropy_bits(probs) -> float:
    """Shannon entropy of a nonnegative array, with 0 log 0 = 0."""
    q = np.asarray(probs, dtype=float).ravel()
    q = q[q > 0]
    return float(-(q * np.log2(q)).sum())


def binary_entropy(x):
    """h(x) = -x log2 x - (1-x) log2 (1-x), vectorized, h(0) = h(1) = 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    out = np.where((x <= 0) | (x >= 1), 0.0, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class JointDistribution:
    axes: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        axes = tuple(self.axes)
        w = np.asarray(self.weights, dtype=float)
        if len(axes) != w.ndim or len(set(axes)) != len(axes):
            raise ShapeMismatch(f"axes {axes} do not label a {w.ndim}-d tensor")
        if np.any(w < -1e-12):
            raise NegativeEntry("joint distribution has negative weight")
        w = np.clip(w, 0.0, None)
        if abs(w.sum() - 1.0) > 1e-9:
            raise BadNormalization(f"joint distribution sums to {w.sum():.12g}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "weights", w)

    def marginal(self, keep: Iterable[str]) -> np.ndarray:
        keep = set(keep)
        unknown = keep - set(self.axes)
        if unknown:
            raise ShapeMismatch(f"unknown axes {sorted(unknown)}")
        drop = tuple(i for i, name in enumerate(self.axes) if name not in keep)
        return self.weights.sum(axis=drop)


def shannon_entropy(d: JointDistribution, axes: Iterable[str] | None = None) -> float:
    if axes is None:
        return entropy_bits(d.weights)
    return entropy_bits(d.marginal(axes))


def _disjoint(*groups: Sequence[str]) -> None:
    seen: set[str] = set()
    for g in groups:
        g = set(g)
        if seen & g:
            raise AxisOverlap(f"axes {sorted(seen & g)} appear in more than one argument")
        seen |= g


def cmi(d: JointDistribution, k: Sequence[str], l: Sequence[str], m: Sequence[str] = ()) -> float:
    """I(K;L|M) = H(KM) + H(LM) - H(M) - H(KLM); axes outside K, L, M are summed out."""
    _disjoint(k, l, m)
    km, lm, klm = [*k, *m], [*l, *m], [*k, *l, *m]
    val = (
        shannon_entropy(d, km)
        + shannon_entropy(d, lm)
        - shannon_entropy(d, m)
        - shannon_entropy(d, klm)
    )
    if val < -CMI_CLAMP:
        raise ArithmeticError(f"conditional mutual information came out {val:.3g}")
    return max(val, 0.0)


# ---------------------------------------------------------------------------
# quantum


def von_neumann_entropy(op) -> float:
    """-sum lambda log2 lambda over the spectrum of ``op`` (not renormalized)."""
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ShapeMismatch(f"operator must be square, got {op.shape}")
    if op.shape[0] > 64:
        raise ShapeMismatch("operators above dimension 64 are not supported")
    if np.abs(op - op.conj().T).max(initial=0.0) > PSD_SLACK:
        raise NotPsd("operator is not Hermitian")
    evals = np.linalg.eigvalsh((op + op.conj().T) / 2)
    if evals.min(initial=0.0) < -PSD_SLACK:
        raise NotPsd(f"operator has eigenvalue {evals.min():.3g}")
    evals = evals[evals > ZERO_EIG]
    return float(-(evals * np.log2(evals)).sum())


@dataclass(frozen=True)
class CqState:
    """Classical-quantum state sum_c |c><c| (x) blocks[c].

    ``blocks`` has shape ``(*classical_sizes, d, d)``; axis names are given by
    ``classical_axes`` and the quantum factor is called ``quantum``.
    """

    classical_axes: tuple[str, ...]
    blocks: np.ndarray
    quantum: str = "Q"

    def __post_init__(self):
        axes = tuple(self.classical_axes)
        blocks = np.asarray(self.blocks, dtype=complex)
        if blocks.ndim != len(axes) + 2 or blocks.shape[-1] != blocks.shape[-2]:
            raise ShapeMismatch(f"blocks of shape {blocks.shape} do not match axes {axes}")
        if self.quantum in axes or len(set(axes)) != len(axes):
            raise ShapeMismatch("axis names must be distinct")
        herm_err = np.abs(blocks - np.swapaxes(blocks.conj(), -1, -2)).max(initial=0.0)
        if herm_err > PSD_SLACK:
            raise NotPsd("a block is not Hermitian")
        blocks = (blocks + np.swapaxes(blocks.conj(), -1, -2)) / 2
        flat = blocks.reshape(-1, *blocks.shape[-2:])
        if len(flat) and np.linalg.eigvalsh(flat).min() < -PSD_SLACK:
            raise NotPsd("a block has a negative eigenvalue")
        total = np.trace(blocks, axis1=-2, axis2=-1).real.sum()
        if abs(total - 1.0) > 1e-9:
            raise BadNormalization(f"cq state has trace {total:.12g}")
        object.__setattr__(self, "classical_axes", axes)
        object.__setattr__(self, "blocks", blocks)

    def entropy(self, subset: Iterable[str]) -> float:
        subset = set(subset)
        unknown = subset - set(self.classical_axes) - {self.quantum}
        if unknown:
            raise ShapeMismatch(f"unknown axes {sorted(unknown)}")
        drop = tuple(i for i, a in enumerate(self.classical_axes) if a not in subset)
        if self.quantum in subset:
            marg = self.blocks.sum(axis=drop)
            marg = marg.reshape(-1, *marg.shape[-2:])
            evals = np.linalg.eigvalsh(marg).ravel()
            evals = evals[evals > ZERO_EIG]
            return float(-(evals * np.log2(evals)).sum())
        traces = np.trace(self.blocks, axis1=-2, axis2=-1).real
        return entropy_bits(traces.sum(axis=drop))


def cmi_cq(s: CqState, k: Sequence[str], l: Sequence[str], m: Sequence[str] = ()) -> float:
    """Conditional mutual information of a cq state; the quantum factor may sit in any one slot."""
    _disjoint(k, l, m)
    km, lm, klm = [*k, *m], [*l, *m], [*k, *l, *m]
    val = s.entropy(km) + s.entropy(lm) - s.entropy(m) - s.entropy(klm)
    if val < -CMI_CLAMP:
        raise ArithmeticError(f"conditional mutual information came out {val:.3g}")
    return max(val, 0.0)
