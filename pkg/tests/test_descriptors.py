import pytest
import yaml

from lattice.errors import DescriptorError
from manifolds.descriptors import dump_manifold, load_manifold, load_sum, parse_manifold
from manifolds.manifolds import ManifoldKind, chern_numbers


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_p1(descriptors):
    descriptor = load_manifold(descriptors / "p1.yml")
    assert descriptor.model.name == "P1"
    assert chern_numbers(descriptor.model) == (-4, 16)
    F = descriptor.surface("F")
    assert (F.square, F.genus) == (0, 2)


def test_load_general_model(descriptors):
    descriptor = load_manifold(descriptors / "q1.yml")
    M = descriptor.model
    assert M.kind is ManifoldKind.GENERAL
    assert M.lattice.signature == (3, 5)
    assert len(M.exceptional_classes) == 2
    assert chern_numbers(M) == (-2, 2)
    assert descriptor.surface("F").genus == 2


def test_surfaces_keep_file_order(descriptors):
    descriptor = load_manifold(descriptors / "ruled.yml")
    assert list(descriptor.surfaces) == ["section", "double", "slanted"]
    assert descriptor.surface("slanted").genus == 1


def test_unknown_surface(descriptors):
    with pytest.raises(DescriptorError, match="Known surfaces: diagonal, torus"):
        load_manifold(descriptors / "s2xs2.yml").surface("fiber")


def test_unknown_kind_names_the_line(tmp_path):
    path = write(tmp_path, "bad.yml", "manifold:\n  kind: banana\n  basis: [H]\n")
    with pytest.raises(DescriptorError, match="Unknown kind 'banana'") as error:
        load_manifold(path)
    assert error.value.line == 2
    assert str(path) in str(error.value)


def test_basis_must_match_the_canonical_labels(tmp_path):
    path = write(tmp_path, "order.yml", "manifold:\n  kind: rational\n  n: 1\n  basis: [E1, H]\n")
    with pytest.raises(DescriptorError, match="canonical labels"):
        load_manifold(path)


def test_vector_length_is_checked(tmp_path):
    text = "manifold:\n  kind: rational\n  n: 1\n  basis: [H, E1]\nsurfaces:\n  - name: F\n    vector: [3]\n"
    with pytest.raises(DescriptorError, match="has 1 entries") as error:
        load_manifold(write(tmp_path, "short.yml", text))
    assert error.value.line == 6


def test_given_genus_is_checked(tmp_path):
    text = "manifold:\n  kind: rational\n  n: 1\n  basis: [H, E1]\nsurfaces:\n  - name: F\n    vector: [3, 0]\n    genus: 4\n"
    with pytest.raises(DescriptorError, match="adjunction gives 1"):
        load_manifold(write(tmp_path, "genus.yml", text))


def test_duplicate_surface(tmp_path):
    text = (
        "manifold:\n  kind: rational\n  n: 0\n  basis: [H]\n"
        "surfaces:\n  - {name: C, vector: [3]}\n  - {name: C, vector: [4]}\n"
    )
    with pytest.raises(DescriptorError, match="defined twice"):
        load_manifold(write(tmp_path, "twice.yml", text))


def test_invalid_yaml_and_missing_file(tmp_path):
    with pytest.raises(DescriptorError, match="Not valid YAML"):
        load_manifold(write(tmp_path, "broken.yml", "manifold: [1, 2\n"))
    with pytest.raises(DescriptorError, match="Cannot read"):
        load_manifold(tmp_path / "absent.yml")


def test_model_errors_become_descriptor_errors(tmp_path):
    with pytest.raises(DescriptorError, match="h >= 1"):
        load_manifold(write(tmp_path, "ruled.yml", "manifold:\n  kind: ruled_trivial\n  h: 0\n  basis: [sigma, f]\n"))


@pytest.mark.parametrize(
    "b_plus, message", [("0", "positive integer"), ("-1", "positive integer"), ("1", "has b\\+ = 3")]
)
def test_b_plus_flag_is_checked(tmp_path, descriptors, b_plus, message):
    text = (descriptors / "q1.yml").read_text().replace("b_plus: 3", f"b_plus: {b_plus}")
    with pytest.raises(DescriptorError, match=message):
        load_manifold(write(tmp_path, "q1.yml", text))


def test_neither_kind_needs_b_plus(tmp_path, descriptors):
    text = (descriptors / "q1.yml").read_text().replace("    b_plus: 3\n", "")
    with pytest.raises(DescriptorError, match="b_plus is required"):
        load_manifold(write(tmp_path, "q1.yml", text))


def test_dump_and_parse_agree(descriptors):
    descriptor = load_manifold(descriptors / "q1.yml")
    again = parse_manifold(yaml.safe_load(dump_manifold(descriptor)))
    assert again.model.lattice == descriptor.model.lattice
    assert again.model.K == descriptor.model.K
    assert again.model.exceptional_classes == descriptor.model.exceptional_classes
    assert again.surface("F").cls == descriptor.surface("F").cls


def test_load_sum(descriptors):
    s = load_sum(descriptors / "e1_e1_sum.yml")
    assert s.genus == 1
    assert s.side1.model.name == "E(1)"
    assert s.side2.surface.name == "fiber"


def test_load_sum_with_an_inline_side(tmp_path, descriptors):
    text = (
        "sum:\n  genus: 1\n"
        f"  side1: {{manifold: {descriptors / 'e1.yml'}, surface: fiber}}\n"
        "  side2:\n"
        "    surface: T\n"
        "    manifold:\n"
        "      manifold: {kind: rational, n: 0, basis: [H]}\n"
        "      surfaces: [{name: T, vector: [3]}]\n"
    )
    s = load_sum(write(tmp_path, "inline.yml", text))
    assert s.side2.model.name == "CP2#0"
    assert s.side2.surface.square == 9


def test_load_sum_reports_an_unknown_surface(tmp_path, descriptors):
    text = f"sum:\n  genus: 1\n  side1: {{manifold: {descriptors / 'e1.yml'}, surface: nope}}\n  side2: {{manifold: {descriptors / 'e1.yml'}, surface: fiber}}\n"
    path = write(tmp_path, "nope.yml", text)
    with pytest.raises(DescriptorError, match="No surface named nope") as error:
        load_sum(path)
    assert error.value.path == str(path)
    assert error.value.line == 3
