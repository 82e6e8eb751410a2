"""Manifold and sum descriptor files.

A manifold descriptor names a model by kind, spells out its basis labels and lists named surfaces as integer vectors:

.. code-block:: yaml

    manifold:
      name: P1
      kind: rational
      n: 13
      basis: [H, E1, E2, E3, E4, E5, E6, E7, E8, E9, E10, E11, E12, E13]
    surfaces:
      - name: F
        vector: [4, -2, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1]

A sum descriptor points at two manifold descriptors, by path relative to itself or inline, and names a surface of each.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from lattice.errors import DescriptorError, SymsumError
from lattice.lattice import IntersectionLattice
from manifolds.manifolds import (
    ManifoldKind,
    MinimalModelKind,
    ModelFlags,
    general,
    rational,
    ruled_trivial,
    ruled_twisted,
    s2xs2,
    surface,
)
from sums.sums import SumDescriptor, SumSide

logger = logging.getLogger(__name__)

LINE = "__line__"

KINDS = {kind.value: kind for kind in ManifoldKind}
MODEL_KINDS = {kind.value: kind for kind in MinimalModelKind}


class _LineLoader(yaml.SafeLoader):
    """A safe loader that records the 1-based source line of every mapping."""

    def construct_mapping(self, node, deep=False):
        mapping = super().construct_mapping(node, deep=deep)
        mapping[LINE] = node.start_mark.line + 1
        return mapping


@dataclass(frozen=True)
class ManifoldDescriptor:
    """A model together with its named surfaces.

    Attributes:
        model (ManifoldModel): The model the descriptor builds.
        surfaces (dict): Surface name to SurfaceInModel, in file order.
        path (str): The file the descriptor came from, if any.
    """

    model: object
    surfaces: dict = field(default_factory=dict)
    path: str | None = None

    def surface(self, name):
        if name not in self.surfaces:
            known = ", ".join(self.surfaces) or "none"
            raise DescriptorError(f"\nNo surface named {name}. Known surfaces: {known}.", self.path)
        return self.surfaces[name]


def _read(path):
    try:
        with open(path, "r") as stream:
            return yaml.load(stream, Loader=_LineLoader)
    except OSError as error:
        raise DescriptorError(f"\nCannot read descriptor: {error.strerror}.", str(path)) from error
    except yaml.YAMLError as error:
        mark = getattr(error, "problem_mark", None)
        raise DescriptorError(
            f"\nNot valid YAML: {getattr(error, 'problem', error)}.", str(path), mark.line + 1 if mark else None
        ) from error


def _section(document, key, path):
    if not isinstance(document, dict) or not isinstance(document.get(key), dict):
        raise DescriptorError(f"\nThe document must have a mapping under '{key}'.", path, 1)
    return document[key]


def _integer(mapping, key, path, default=None, required=False):
    if key not in mapping:
        if required:
            raise DescriptorError(f"\nMissing required key '{key}'.", path, mapping.get(LINE))
        return default
    value = mapping[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise DescriptorError(f"\n'{key}' must be an integer, got {value!r}.", path, mapping.get(LINE))
    return value


def _vector(mapping, key, rank, path, required=True):
    if key not in mapping:
        if required:
            raise DescriptorError(f"\nMissing required key '{key}'.", path, mapping.get(LINE))
        return None
    value = mapping[key]
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise DescriptorError(f"\n'{key}' must be a list of integers, got {value!r}.", path, mapping.get(LINE))
    if rank is not None and len(value) != rank:
        raise DescriptorError(
            f"\n'{key}' has {len(value)} entries but the basis has {rank}.", path, mapping.get(LINE)
        )
    return tuple(value)


def _flags(section, path):
    raw = section.get("flags", {})
    if not isinstance(raw, dict):
        raise DescriptorError("\n'flags' must be a mapping.", path, section.get(LINE))
    line = raw.get(LINE, section.get(LINE))
    unknown = set(raw) - {"minimal", "minimal_model_kind", "b_plus", "aspherical", LINE}
    if unknown:
        raise DescriptorError(f"\nUnknown flags: {', '.join(sorted(unknown))}.", path, line)
    kind = raw.get("minimal_model_kind")
    if kind is not None and kind not in MODEL_KINDS:
        raise DescriptorError(
            f"\nminimal_model_kind must be one of {', '.join(MODEL_KINDS)}, got {kind!r}.", path, line
        )
    minimal = raw.get("minimal")
    if minimal is not None and not isinstance(minimal, bool):
        raise DescriptorError(f"\n'minimal' must be true or false, got {minimal!r}.", path, line)
    b_plus = _integer(raw, "b_plus", path)
    if b_plus is not None and b_plus < 1:
        raise DescriptorError(f"\n'b_plus' must be a positive integer, got {b_plus}.", path, line)
    return ModelFlags(
        minimal,
        MODEL_KINDS[kind] if kind is not None else None,
        b_plus,
        bool(raw.get("aspherical", False)),
    )


def _general_model(section, path):
    labels = section.get("basis")
    gram = section.get("gram")
    if not isinstance(gram, list) or not all(
        isinstance(row, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in row) for row in gram
    ):
        raise DescriptorError("\n'gram' must be a list of integer rows.", path, section.get(LINE))
    lattice = IntersectionLattice(str(section.get("name", "general")), gram, labels)
    K = _vector(section, "canonical", lattice.rank, path)
    omega = _vector(section, "omega", lattice.rank, path)
    exceptional = section.get("exceptional")
    if exceptional is not None:
        if not isinstance(exceptional, list):
            raise DescriptorError("\n'exceptional' must be a list of vectors.", path, section.get(LINE))
        exceptional = [_vector({"class": e, LINE: section.get(LINE)}, "class", lattice.rank, path) for e in exceptional]
    chern = section.get("asserted_chern")
    if chern is not None:
        chern = _vector(section, "asserted_chern", 2, path)
    return general(
        str(section.get("name", "general")),
        lattice,
        K,
        _integer(section, "b1", path, required=True),
        omega,
        _flags(section, path),
        exceptional_classes=exceptional,
        asserted_chern=chern,
    )


def _builtin_model(kind, section, path):
    n = _integer(section, "n", path, default=0)
    h = _integer(section, "h", path, default=0)
    omega = _vector(section, "omega", None, path, required=False)
    if kind is ManifoldKind.RATIONAL:
        return rational(n, omega)
    if kind is ManifoldKind.RULED_TRIVIAL:
        return ruled_trivial(h, n, omega)
    if kind is ManifoldKind.RULED_TWISTED:
        return ruled_twisted(h, n, omega)
    return s2xs2(n, omega)


def _model(section, path):
    line = section.get(LINE)
    kind = section.get("kind")
    if kind not in KINDS:
        raise DescriptorError(f"\nUnknown kind {kind!r}.\nExpected one of {', '.join(KINDS)}.", path, line)
    kind = KINDS[kind]
    labels = section.get("basis")
    if not isinstance(labels, list) or not all(isinstance(label, str) for label in labels):
        raise DescriptorError("\n'basis' must list the basis labels.", path, line)
    try:
        if kind is ManifoldKind.GENERAL:
            model = _general_model(section, path)
        else:
            model = _builtin_model(kind, section, path)
    except DescriptorError:
        raise
    except SymsumError as error:
        raise DescriptorError(str(error), path, line) from error
    if tuple(labels) != model.lattice.basis_labels:
        raise DescriptorError(
            f"\nBasis labels {labels} do not match the canonical labels {list(model.lattice.basis_labels)} of "
            f"{model.name}.",
            path,
            line,
        )
    if "name" in section and kind is not ManifoldKind.GENERAL:
        model = replace(model, name=str(section["name"]))
    return model


def _surfaces(document, model, path):
    entries = document.get("surfaces", [])
    if not isinstance(entries, list):
        raise DescriptorError("\n'surfaces' must be a list.", path, document.get(LINE))
    found = {}
    for entry in entries:
        if not isinstance(entry, dict) or "name" not in entry:
            raise DescriptorError("\nEvery surface needs a name.", path, document.get(LINE))
        line = entry.get(LINE)
        name = str(entry["name"])
        if name in found:
            raise DescriptorError(f"\nSurface {name} is defined twice.", path, line)
        vector = _vector(entry, "vector", model.lattice.rank, path)
        try:
            found[name] = surface(
                model,
                vector,
                _integer(entry, "genus", path),
                bool(entry.get("symplectic", True)),
                name,
            )
        except DescriptorError:
            raise
        except SymsumError as error:
            raise DescriptorError(str(error), path, line) from error
    return found


def parse_manifold(document, path=None):
    """Build a ManifoldDescriptor from a loaded document."""
    section = _section(document, "manifold", path)
    model = _model(section, path)
    surfaces = _surfaces(document, model, path)
    logger.info("Loaded %s with %s surfaces from %s", model.name, len(surfaces), path or "inline data")
    return ManifoldDescriptor(model, surfaces, path)


def load_manifold(path):
    """Load a manifold descriptor file.

    Args:
        path (str): The YAML file.

    Returns:
        ManifoldDescriptor: The model and its named surfaces.

    Examples:
        >>> load_manifold("descriptors/p1.yml").surface("F").genus
        2
    """
    return parse_manifold(_read(path), str(path))


def load_sum(path):
    """Load a sum descriptor; manifold paths are resolved relative to the sum file.

    Returns:
        SumDescriptor: The two sides and the genus.
    """
    path = str(path)
    section = _section(_read(path), "sum", path)
    genus = _integer(section, "genus", path, required=True)
    sides = []
    for key in ("side1", "side2"):
        side = section.get(key)
        if not isinstance(side, dict):
            raise DescriptorError(f"\nMissing mapping '{key}'.", path, section.get(LINE))
        source = side.get("manifold")
        if isinstance(source, str):
            descriptor = load_manifold(Path(path).parent / source)
        elif isinstance(source, dict):
            descriptor = parse_manifold(source, path)
        else:
            raise DescriptorError(
                f"\n'{key}.manifold' must be a path or an inline descriptor.", path, side.get(LINE)
            )
        if "surface" not in side:
            raise DescriptorError(f"\n'{key}' must name a surface.", path, side.get(LINE))
        try:
            chosen = descriptor.surface(str(side["surface"]))
        except DescriptorError as error:
            raise DescriptorError(error.message, path, side.get(LINE)) from error
        sides.append(SumSide(descriptor.model, chosen))
    return SumDescriptor(sides[0], sides[1], genus)


def _flags_document(flags):
    return {
        "minimal": flags.minimal,
        "minimal_model_kind": flags.minimal_model_kind.value if flags.minimal_model_kind else None,
        "b_plus": flags.b_plus,
        "aspherical": flags.aspherical,
    }


def dump_manifold(descriptor):
    """Serialize a ManifoldDescriptor back to descriptor YAML."""
    model = descriptor.model
    section = {"name": model.name, "kind": model.kind.value}
    if model.kind is ManifoldKind.GENERAL:
        section["basis"] = list(model.lattice.basis_labels)
        section["gram"] = [list(row) for row in model.lattice.gram]
        section["canonical"] = list(model.K.coeffs)
        section["b1"] = model.b1
        section["omega"] = list(model.omega_ref.coeffs)
        section["flags"] = _flags_document(model.flags)
        if model.exceptional_classes is not None:
            section["exceptional"] = [list(e.coeffs) for e in model.exceptional_classes]
        if model.asserted_chern is not None:
            section["asserted_chern"] = list(model.asserted_chern)
    else:
        section["n"] = model.n
        if model.h:
            section["h"] = model.h
        section["basis"] = list(model.lattice.basis_labels)
        section["omega"] = list(model.omega_ref.coeffs)
    surfaces = [
        {"name": name, "vector": list(F.cls.coeffs), "genus": F.genus, "symplectic": F.symplectic}
        for name, F in descriptor.surfaces.items()
    ]
    return yaml.safe_dump({"manifold": section, "surfaces": surfaces}, sort_keys=False, default_flow_style=None)
