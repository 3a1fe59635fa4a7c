"""Key-rate bound curves for the isotropic family.

Upper bounds come from convexity: write the noisy correlation (or assemblage)
as a mixture of a less noisy member and the first local (unsteerable) one,
then bound the less noisy member with its trivial extension. Comparison
curves (Devetak-Winter, the one-sided entropic-uncertainty rate and the
relative entropy of entanglement) are closed forms from the literature.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from ._scalar import grid_golden_min
from .boxes import BELL_LOCAL_THRESHOLD
from .errors import BadRange, OutOfRange
from .infotheory import binary_entropy
from .steering import sdi_isotropic_upper

CURVE_NAMES = ("di_upper", "di_lower", "ree", "sdi_upper", "sdi_lower")

PROVENANCE = {
    "di_upper": "convexity + trivial extension on the isotropic DI correlation",
    "di_lower": "Devetak-Winter rate with CHSH-based Eve bound (Acin et al. 2007)",
    "ree": "relative entropy of entanglement of the two-qubit isotropic state (Vedral-Plenio 1998)",
    "sdi_upper": "convexity + trivial extension on the isotropic assemblage",
    "sdi_lower": "one-sided DI BB84 rate from the entropic uncertainty relation (Branciard et al. 2012)",
}


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"noise parameter {p} outside [0, 1]")


def di_inner(eps):
    """(2-e)/2 log2(2-e) + (e/2) log2 e, which equals 1 - h(e/2)."""
    return 1.0 - binary_entropy(np.asarray(eps, dtype=float) / 2.0)


def di_alpha(p: float, eps):
    eps = np.asarray(eps, dtype=float)
    return (p - eps) / (BELL_LOCAL_THRESHOLD - eps)


def di_isotropic_upper(p: float) -> float:
    """min_{0<=e<=p} (1 - alpha(e)) (1 - h(e/2)); zero once the correlation is local."""
    _check_p(p)
    if p >= BELL_LOCAL_THRESHOLD:
        return 0.0
    _, val = grid_golden_min(lambda e: (1.0 - di_alpha(p, e)) * di_inner(e), 0.0, p)
    return max(val, 0.0)


def di_lower_devetak_winter(p: float) -> float:
    """1 - h(Q) - h((1 + sqrt((S/2)^2 - 1))/2) with Q = p/2 and S = 2 sqrt2 (1 - p), floored at 0."""
    _check_p(p)
    s = 2.0 * np.sqrt(2.0) * (1.0 - p)
    if s <= 2.0:
        return 0.0
    r = 1.0 - binary_entropy(p / 2.0) - binary_entropy((1.0 + np.sqrt((s / 2.0) ** 2 - 1.0)) / 2.0)
    return max(float(r), 0.0)


def sdi_lower(p: float) -> float:
    """1 - h(e_Z) - h(e_X) with both error rates p/2, floored at 0."""
    _check_p(p)
    return max(float(1.0 - 2.0 * binary_entropy(p / 2.0)), 0.0)


def ree_isotropic(p: float) -> float:
    """1 - h(F) for fidelity F = 1 - 3p/4 above 1/2, else 0."""
    _check_p(p)
    f = 1.0 - 0.75 * p
    if f <= 0.5:
        return 0.0
    return max(float(1.0 - binary_entropy(f)), 0.0)


@dataclass(frozen=True)
class ContinuityTerm:
    n: int
    R: float
    eps: float
    value: float


def continuity_term(n: int, R: float, eps: float) -> ContinuityTerm:
    """n R eps + 2[(1 + eps) log2(1 + eps) - eps log2 eps]."""
    if n < 1 or R < 0 or not 0.0 <= eps <= 1.0:
        raise OutOfRange(f"need n >= 1, R >= 0, eps in [0, 1]; got n={n}, R={R}, eps={eps}")
    tail = (1 + eps) * np.log2(1 + eps) - (eps * np.log2(eps) if eps > 0 else 0.0)
    return ContinuityTerm(n, R, eps, float(n * R * eps + 2.0 * tail))


@dataclass(frozen=True)
class BoundCurve:
    label: str
    samples: list[tuple[float, float]]
    provenance: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        ps = [s[0] for s in self.samples]
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise BadRange("curve samples must have strictly increasing p")
        if any(v < 0 for _, v in self.samples):
            raise BadRange("curve values must be nonnegative")

    @property
    def p(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])


CURVE_FUNCS = {
    "di_upper": di_isotropic_upper,
    "di_lower": di_lower_devetak_winter,
    "ree": ree_isotropic,
    "sdi_upper": sdi_isotropic_upper,
    "sdi_lower": sdi_lower,
}


def grid(p_min: float, p_max: float, step: float) -> np.ndarray:
    """p_min, p_min + step, ... up to p_max (included when it lands on the grid)."""
    if not (0.0 <= p_min < p_max <= 1.0) or not step > 0:
        raise BadRange(f"need 0 <= from < to <= 1 and step > 0; got {p_min}, {p_max}, {step}")
    n = int(np.floor((p_max - p_min) / step + 1e-9))
    return np.round(p_min + step * np.arange(n + 1), 12)


def emit_curves(p_min: float, p_max: float, step: float,
                curves: tuple[str, ...] | None = None) -> tuple[dict[str, BoundCurve], str]:
    """Evaluate the selected curves on the grid and render them as CSV.

    Columns follow the fixed order of :data:`CURVE_NAMES`; unselected curves
    are dropped from the header. Values use 10 significant digits.
    """
    selected = [c for c in CURVE_NAMES if curves is None or c in curves]
    unknown = set(curves or ()) - set(CURVE_NAMES)
    if unknown or not selected:
        raise BadRange(f"unknown or empty curve selection: {sorted(unknown)}")
    ps = grid(p_min, p_max, step)
    table = {name: [CURVE_FUNCS[name](float(p)) for p in ps] for name in selected}
    out = {name: BoundCurve(name, list(zip(ps.tolist(), vals)), PROVENANCE[name])
           for name, vals in table.items()}
    buf = io.StringIO()
    buf.write(",".join(["p", *selected]) + "\n")
    for i, p in enumerate(ps):
        buf.write(",".join("%.10g" % v for v in [p, *(table[n][i] for n in selected)]) + "\n")
    return out, buf.getvalue()
