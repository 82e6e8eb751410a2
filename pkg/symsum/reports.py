"""Report documents for every command.

Each builder returns an lxml element; ``render`` turns it into pretty-printed XML or an indented text listing of the
same tree. Reports carry no timestamps or worker counts, so identical inputs give identical bytes.
"""

from __future__ import annotations

import re

import humanize
from lxml import etree
from lxml.builder import ElementMaker

from lattice.lattice import pair
from manifolds.manifolds import chern_numbers, noether_check

NAMESPACE = "urn:symsum:report"

_INTEGER = re.compile(r"^-?\d+$")


def _value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "unknown"
    if hasattr(value, "value") and not isinstance(value, (int, str)):
        return str(value.value)
    return str(value)


class ReportBuilder:
    """Builds report trees in the symsum report namespace."""

    def __init__(self):
        self.E = self.__build_namespace(NAMESPACE, "report")

    @staticmethod
    def __build_namespace(uri, short):
        return ElementMaker(namespace=uri, nsmap={short: uri})

    def __element(self, tag, *children, **attributes):
        return getattr(self.E, tag)(*children, **{k: _value(v) for k, v in attributes.items()})

    def __surface(self, name, F):
        return self.__element(
            "surface",
            str(F.cls),
            name=name,
            square=F.square,
            genus=F.genus,
            symplectic=F.symplectic,
        )

    def invariants(self, descriptor):
        M = descriptor.model
        c1_sq, c2 = chern_numbers(M)
        flags = M.flags
        return self.__element(
            "invariants",
            self.__element(
                "lattice",
                " ".join(M.lattice.basis_labels),
                name=M.lattice.name,
                rank=M.lattice.rank,
                b_plus=M.lattice.b_plus,
                b_minus=M.lattice.b_minus,
                even=M.lattice.is_even(),
            ),
            self.__element("canonical", str(M.K)),
            self.__element("omega", str(M.omega_ref), square=pair(M.omega_ref, M.omega_ref)),
            self.__element("chern", c1_sq=c1_sq, c2=c2, noether=noether_check(c1_sq, c2) if c1_sq is not None else None),
            self.__element(
                "flags",
                minimal=flags.minimal,
                minimal_model_kind=flags.minimal_model_kind,
                b_plus=flags.b_plus,
                aspherical=flags.aspherical,
            ),
            *[self.__element("note", note) for note in M.notes],
            *[self.__surface(name, F) for name, F in descriptor.surfaces.items()],
            model=M.name,
            kind=M.kind,
            b1=M.b1,
        )

    def knef(self, certificate, oracle=None, agreement=None):
        children = [
            self.__element("check", f"{check.description}: {check.values}", passed=check.passed)
            for check in certificate.checks
        ]
        children += [self.__element("assumption", text) for text in certificate.assumptions_consumed]
        if certificate.witness is not None:
            children.append(self.__element("witness", str(certificate.witness)))
        children += [self.__element("bound", name=name, value=value) for name, value in certificate.bounds]
        children += [self.__element("note", note) for note in certificate.notes]
        if oracle is not None:
            children.append(
                self.__element(
                    "oracle",
                    oracle.searched,
                    violation=str(oracle.violation) if oracle.violation is not None else "none",
                    value=oracle.value,
                    vacuous=oracle.vacuous,
                    agrees=agreement if agreement is not None else "not applicable",
                )
            )
        return self.__element(
            "knef",
            *children,
            model=certificate.model_name,
            surface=certificate.surface_name,
            verdict=certificate.verdict,
            case=certificate.case,
        )

    def possquare(self, n, coeff_bound, passing, counterexamples, integer_path):
        return self.__element(
            "possquare",
            *[self.__element("counterexample", " ".join(map(str, lam))) for lam in counterexamples],
            *[self.__element("integerCounterexample", a=a, b=b) for a, b in integer_path],
            n=n,
            coeff_bound=coeff_bound,
            passing=passing,
            counterexamples=len(counterexamples),
        )

    def lightcone(self, samples, seed):
        return self.__element("lightcone", samples=samples, seed=seed, held=True)

    def sum(self, s, decision, chern, splittings=None, splitting_bound=None):
        children = [
            self.__element(
                "side",
                self.__surface(side.surface.name, side.surface),
                index=index,
                model=side.model.name,
            )
            for index, side in enumerate(s.sides, start=1)
        ]
        children.append(self.__element("chern", c1_sq=chern[0], c2=chern[1]))
        if decision.witness is not None:
            children.append(
                self.__element(
                    "witness",
                    str(decision.witness),
                    side=decision.witness_side,
                    positivity_violation=decision.positivity_violation,
                )
            )
        if decision.ruled_side is not None:
            children.append(
                self.__element("ruledSide", side=decision.ruled_side, other_minimal=decision.resolved_minimal)
            )
        children += [self.knef(certificate) for certificate in decision.certificates]
        children += [
            self.__element("meets", result.note, side=index, verdict=result.verdict, checked=result.checked)
            for index, result in enumerate(decision.meets, start=1)
        ]
        children += [self.__element("note", note) for note in decision.notes]
        if splittings is not None:
            children.append(
                self.__element(
                    "splittings",
                    *[self.__element("splitting", A1=str(A1), A2=str(A2), d=d) for A1, A2, d in splittings],
                    coeff_bound=splitting_bound,
                    count=len(splittings),
                )
            )
        return self.__element(
            "sum",
            *children,
            genus=s.genus,
            verdict=decision.verdict,
            minimal=decision.is_minimal,
        )

    def invalid_sum(self, validation):
        return self.__element(
            "sum", *[self.__element("violation", text) for text in validation.violations], valid=False
        )

    def lefschetz(self, f1, f2, minimal, reasons):
        return self.__element(
            "lefschetz",
            *[
                self.__element(
                    "fibration",
                    index=index,
                    genus=f.genus,
                    relatively_minimal=f.relatively_minimal,
                    trivial_projection=f.is_trivial_projection,
                )
                for index, f in enumerate((f1, f2), start=1)
            ],
            *[self.__element("reason", reason) for reason in reasons],
            minimal=minimal,
        )

    def blocks(self, blocks):
        return self.__element(
            "blocks",
            *[
                self.__element(
                    "block",
                    self.__surface(block.surface.name, block.surface),
                    *[self.__element("note", note) for note in block.notes],
                    name=block.name,
                    model=block.model.name,
                    abstract=block.abstract,
                    c1_sq=block.chern[0],
                    c2=block.chern[1],
                )
                for block in blocks
            ],
            count=len(blocks),
        )

    def region(self, points, a_range, b_range, r):
        return self.__element(
            "region",
            *[self.__element("point", a=a, b=b) for a, b in points],
            a_range=f"{a_range[0]}..{a_range[1]}",
            b_range=f"{b_range[0]}..{b_range[1]}",
            r=r,
            count=len(points),
        )

    def chain(self, report):
        return self.__element(
            "chain",
            *[
                self.__element(
                    "stage",
                    *[self.__element("note", note) for note in stage.decision.notes],
                    index=stage.index,
                    left=stage.left,
                    right=stage.right,
                    genus=stage.genus,
                    verdict=stage.decision.verdict,
                    c1_sq=stage.chern[0],
                    c2=stage.chern[1],
                )
                for stage in report.stages
            ],
            minimal=report.minimal,
            c1_sq=report.chern[0],
            c2=report.chern[1],
            failed_stage=report.failed_stage,
        )


def region_lines(points):
    """The delimited form of a region: one ``a,b`` line per point."""
    return "".join(f"{a},{b}\n" for a, b in points)


def _humanized(value):
    return humanize.intcomma(int(value)) if _INTEGER.match(value) else value


def _text(element, depth, lines):
    tag = etree.QName(element).localname
    text = (element.text or "").strip()
    attributes = " ".join(f"{key}={_humanized(value)}" for key, value in element.attrib.items())
    line = "  " * depth + tag
    if text:
        line += f": {text}"
    if attributes:
        line += f" [{attributes}]"
    lines.append(line)
    for child in element:
        _text(child, depth + 1, lines)


def render(element, fmt="text"):
    """Render a report tree.

    Args:
        element (lxml.etree._Element): A tree from ReportBuilder.
        fmt (str): ``structured`` for XML, ``text`` for an indented listing.

    Returns:
        str: The rendered report, ending in a newline.

    Examples:
        >>> print(render(ReportBuilder().region([(0, 12)], (0, 12), (0, 12), 0)))
        region [a_range=0..12 b_range=0..12 r=0 count=1]
          point [a=0 b=12]
    """
    if fmt == "structured":
        return etree.tostring(element, xml_declaration=True, encoding="UTF-8", pretty_print=True).decode("utf-8")
    lines = []
    _text(element, 0, lines)
    return "\n".join(lines) + "\n"
