from lxml import etree

from geography.geography import torus_blowup
from knef.knef import is_rationally_knef, knef_oracle, oracle_agrees
from manifolds.descriptors import load_manifold
from manifolds.manifolds import rational, surface
from sums.sums import SumDescriptor, SumSide, decide_minimality, sum_chern, sum_euler
from symsum.reports import NAMESPACE, ReportBuilder, region_lines, render


def test_region_text():
    report = ReportBuilder().region([(0, 12)], (0, 12), (0, 12), 0)
    assert render(report) == "region [a_range=0..12 b_range=0..12 r=0 count=1]\n  point [a=0 b=12]\n"


def test_region_structured():
    text = render(ReportBuilder().region([(0, 12), (12, 12)], (0, 12), (0, 12), 0), "structured")
    assert text.startswith("<?xml")
    root = etree.fromstring(text.encode("utf-8"))
    assert root.tag == f"{{{NAMESPACE}}}region"
    assert [point.get("a") for point in root] == ["0", "12"]


def test_region_lines():
    assert region_lines([(0, 12), (12, 12)]) == "0,12\n12,12\n"
    assert region_lines([]) == ""


def test_large_counts_are_humanized():
    assert "samples=10,000" in render(ReportBuilder().lightcone(10000, 7))


def test_invariants_report(descriptors):
    text = render(ReportBuilder().invariants(load_manifold(descriptors / "s2xs2.yml")))
    assert text.startswith("invariants [model=S2xS2 kind=")
    assert "chern [c1_sq=8 c2=4 noether=true]" in text
    assert "surface: 2sigma + 2f [name=torus square=8 genus=1 symplectic=true]" in text


def test_knef_report_with_oracle(descriptors):
    descriptor = load_manifold(descriptors / "ruled.yml")
    M, F = descriptor.model, descriptor.surface("section")
    certificate = is_rationally_knef(M, F)
    oracle = knef_oracle(M, F, coeff_bound=4)
    text = render(ReportBuilder().knef(certificate, oracle, oracle_agrees(certificate, oracle)))
    assert "verdict=ruled_section_exception" in text
    assert "witness: f" in text
    assert "violation=f" in text
    assert "agrees=true" in text


def test_sum_report_is_deterministic(e1_e1):
    decision = decide_minimality(e1_e1)
    builder = ReportBuilder()
    first = render(builder.sum(e1_e1, decision, sum_chern(e1_e1)), "structured")
    second = render(builder.sum(e1_e1, decide_minimality(e1_e1), sum_chern(e1_e1)), "structured")
    assert first == second
    assert 'verdict="minimal_case_iii"' in first
    assert 'c2="24"' in first


def test_sum_report_flags_a_positivity_violation():
    M = rational(1)
    wrong = surface(M, {"H": 4, "E1": 1})
    labels = tuple(f"E{i}" for i in range(1, 18))
    torus = torus_blowup(labels, name="T4#17")
    s = SumDescriptor(
        SumSide(M, wrong), SumSide(torus, surface(torus, {"T1": 1, "T2": 1, **{label: -1 for label in labels}})), 2
    )
    decision = decide_minimality(s)
    text = render(ReportBuilder().sum(s, decision, (None, sum_euler(s))), "structured")
    root = etree.fromstring(text.encode("utf-8"))
    witness = root.find(f"{{{NAMESPACE}}}witness")
    assert witness.text == "E1"
    assert (witness.get("side"), witness.get("positivity_violation")) == ("1", "true")
