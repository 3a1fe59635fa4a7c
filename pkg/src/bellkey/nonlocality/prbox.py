"""Exact intrinsic non-locality of the PR box by constraint propagation.

Eve's conditional states are labelled by support points ``(x, y, a, b)`` of
the PR box. For fixed (y, b) Alice's no-signaling constraint equates the state
at x=0 with the one at x=1 (the outcome a is forced by a xor b = x y), and for
fixed (x, a) Bob's constraint does the same across y. Following the eight
equalities around the cycle 1 -> 7 -> 4 -> 6 -> 2 -> 8 -> 3 -> 5 -> 1 ties every
support point to every other, so every extension is a product and
I(A;B|XYE) = I(A;B|XY) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..boxes import Correlation, InputDistribution, pr_box
from ..infotheory import JointDistribution, cmi, shannon_entropy
from .extension import NlEstimate, trivial_extension

Label = tuple[int, int, int, int]  # (x, y, a, b)

# numbering of the equalities used in the propagation cycle
PR_CONSTRAINTS: dict[int, tuple[Label, Label]] = {
    1: ((0, 0, 0, 0), (1, 0, 0, 0)),
    2: ((0, 0, 1, 1), (1, 0, 1, 1)),
    3: ((0, 1, 0, 0), (1, 1, 1, 0)),
    4: ((0, 1, 1, 1), (1, 1, 0, 1)),
    5: ((0, 0, 0, 0), (0, 1, 0, 0)),
    6: ((0, 0, 1, 1), (0, 1, 1, 1)),
    7: ((1, 0, 0, 0), (1, 1, 0, 1)),
    8: ((1, 0, 1, 1), (1, 1, 1, 0)),
}
PR_CHAIN = (1, 7, 4, 6, 2, 8, 3, 5, 1)


def support(c: Correlation) -> list[Label]:
    return [(int(x), int(y), int(a), int(b)) for a, b, x, y in zip(*np.nonzero(c.p > 0))]


def ns_constraints(c: Correlation) -> list[tuple[Label, Label]]:
    """Pairwise state equalities forced by no-signaling, read off the support.

    A no-signaling block (fixed (y, b, e) for Alice, fixed (x, a, e) for Bob)
    yields an equality between two states only when each side of the block
    holds a single support point; blocks with several terms constrain sums and
    are skipped.
    """
    supp = set(support(c))
    out = []
    n_a, n_b, n_x, n_y = c.shape
    for y in range(n_y):
        for b in range(n_b):
            sides = [[s for s in supp if s[0] == x and s[1] == y and s[3] == b] for x in range(n_x)]
            if all(len(s) == 1 for s in sides):
                out += [(sides[0][0], sides[x][0]) for x in range(1, n_x)]
    for x in range(n_x):
        for a in range(n_a):
            sides = [[s for s in supp if s[0] == x and s[2] == a and s[1] == y] for y in range(n_y)]
            if all(len(s) == 1 for s in sides):
                out += [(sides[0][0], sides[y][0]) for y in range(1, n_y)]
    return out


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)

    def classes(self) -> list[list]:
        groups: dict = {}
        for i in self.parent:
            groups.setdefault(self.find(i), []).append(i)
        return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def equivalence_classes(labels, equalities) -> list[list[Label]]:
    uf = _UnionFind(labels)
    for s, t in equalities:
        uf.union(s, t)
    return uf.classes()


@dataclass(frozen=True)
class PropagationReport:
    classes: list[list[Label]]
    chain: tuple[int, ...]
    history: list[int]  # number of classes after each step of the chain

    def to_dict(self) -> dict:
        return {
            "n_classes": len(self.classes),
            "class_sizes": [len(c) for c in self.classes],
            "chain": list(self.chain),
            "history": self.history,
        }


def propagate_pr_constraints() -> PropagationReport:
    """Run the cycle of equalities on the PR support and record the class count after each step."""
    c = pr_box()
    labels = support(c)
    derived = {tuple(sorted(e)) for e in ns_constraints(c)}
    listed = {tuple(sorted(e)) for e in PR_CONSTRAINTS.values()}
    if derived != listed:
        raise AssertionError("tabulated PR constraints disagree with the no-signaling derivation")
    uf = _UnionFind(labels)
    history = []
    for k in PR_CHAIN:
        uf.union(*PR_CONSTRAINTS[k])
        history.append(len(uf.classes()))
    return PropagationReport(uf.classes(), PR_CHAIN, history)


def pr_box_exact() -> NlEstimate:
    """Intrinsic non-locality of the PR box, value 1 with kind ``exact``.

    Once propagation collapses all support points into one class, E is
    independent of (A, B, X, Y), so the supremum over input distributions is
    the trivial-extension CMI; it equals 1 at every input pair and hence for
    every input distribution.
    """
    report = propagate_pr_constraints()
    if len(report.classes) != 1:
        raise AssertionError(f"propagation left {len(report.classes)} classes")
    c = pr_box()
    d = InputDistribution.uniform(2, 2)
    e = trivial_extension(c, d)
    joint = JointDistribution(("A", "B", "X", "Y"), c.p * d.weights)
    value = cmi(joint, ["A"], ["B"], ["X", "Y"])
    per_input = {}
    for x in range(2):
        for y in range(2):
            col = JointDistribution(("A", "B"), c.p[:, :, x, y])
            h_a = shannon_entropy(col, ["A"])
            per_input[(x, y)] = {"H(A)": h_a, "H(A|B)": shannon_entropy(col) - shannon_entropy(col, ["B"])}
    return NlEstimate(value, "exact", e, d, derivation="pr-constraint-chain",
                      details={"propagation": report, "per_input": per_input})
