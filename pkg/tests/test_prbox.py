import pytest

from bellkey.boxes import pr_box, uniform_box
from bellkey.nonlocality import PR_CHAIN, PR_CONSTRAINTS, ns_constraints, pr_box_exact, propagate_pr_constraints
from bellkey.nonlocality.prbox import equivalence_classes, support


def test_value_is_one():
    est = pr_box_exact()
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert est.kind == "exact"
    assert est.derivation == "pr-constraint-chain"


def test_single_class_of_eight():
    report = propagate_pr_constraints()
    assert len(report.classes) == 1
    assert len(report.classes[0]) == 8


def test_chain_merges_one_pair_per_step():
    # seven merges take eight singletons to one class; the closing step is redundant
    assert propagate_pr_constraints().history == [7, 6, 5, 4, 3, 2, 1, 1, 1]
    assert PR_CHAIN[0] == PR_CHAIN[-1]


def test_tabulated_constraints_match_derivation():
    derived = {tuple(sorted(e)) for e in ns_constraints(pr_box())}
    assert derived == {tuple(sorted(e)) for e in PR_CONSTRAINTS.values()}


def test_every_constraint_links_support_points():
    supp = set(support(pr_box()))
    for s, t in PR_CONSTRAINTS.values():
        assert s in supp and t in supp


def test_entropies_per_input():
    per = pr_box_exact().details["per_input"]
    for v in per.values():
        assert v["H(A)"] == pytest.approx(1.0)
        assert v["H(A|B)"] == pytest.approx(0.0, abs=1e-12)


def test_uniform_box_has_no_single_term_blocks():
    # every block of the uniform box mixes two outcomes, so nothing propagates
    c = uniform_box()
    assert ns_constraints(c) == []
    assert len(equivalence_classes(support(c), [])) == 16
