"""Tests for the command-line surface and its exit codes."""

import pytest

from cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main
from topology.samples import sample_text


@pytest.fixture
def sample_file(tmp_path):
    def write(name):
        path = tmp_path / f"{name}.txt"
        path.write_text(sample_text(name)[1])
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_skeleton(capsys, sample_file):
    code, out, _ = run(capsys, "skeleton", sample_file("doubled-tet"))
    assert code == EXIT_OK
    assert out == "V=4 E=6 F=4 T=2\n"


def test_validate_reports_format_error(capsys, tmp_path):
    bad = tmp_path / "bad.tri"
    bad.write_text("tets 1\n0:01 - - -\n")
    code, out, err = run(capsys, "validate", str(bad))
    assert code == EXIT_INPUT
    assert "line 2" in err


def test_validate_lists_every_issue(capsys, tmp_path):
    bad = tmp_path / "bad.tri"
    bad.write_text("tets 2\n0:0123 1:0123 - -\n- - - -\n")
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == EXIT_INPUT
    assert out.splitlines() == [
        "tet 0 face 0: face glued to itself by the identity",
        "tet 0 face 1: non-involutive gluing",
    ]


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "skeleton", str(tmp_path / "absent.tri"))
    assert code == EXIT_INPUT
    assert "error:" in err


def test_refine_push_classify(capsys, sample_file, tmp_path):
    map_dir = tmp_path / "map"
    code, out, _ = run(capsys, "refine", sample_file("single-tet"), "--uniform", "1", "--map-out", str(map_dir))
    assert code == EXIT_OK
    assert out.startswith("tets 4\n")
    assert (map_dir / "source.tri").exists() and (map_dir / "scale.txt").read_text() == "1\n"

    vector = tmp_path / "v.txt"
    vector.write_text("0 1 0 0 0 0 0\n")
    code, pushed, _ = run(capsys, "push", str(vector), "--map", str(map_dir))
    assert code == EXIT_OK
    # children 0, 2 and 3 keep parent vertex 1 at labels 0, 1, 1
    assert pushed == "1 0 0 0 0 0 0\n0 0 0 0 0 0 0\n0 1 0 0 0 0 0\n0 1 0 0 0 0 0\n"

    refined = tmp_path / "pushed.txt"
    refined.write_text(pushed)
    code, out, _ = run(capsys, "classify", str(refined), "--map", str(map_dir))
    assert code == EXIT_OK
    assert out == "0 1 0 0 0 0 0\nspheres 0\n"


def test_cone(capsys, sample_file):
    code, out, _ = run(capsys, "cone", sample_file("single-tet"))
    assert code == EXIT_OK
    assert out.startswith("tets 5\n")


def test_enumerate(capsys, sample_file):
    code, out, _ = run(capsys, "enumerate", sample_file("doubled-tet"), "--max-w1", "3", "--closed")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "count 4"


def test_enumerate_support(capsys, sample_file, tmp_path):
    support = tmp_path / "support.txt"
    support.write_text("0\n")
    code, out, _ = run(capsys, "enumerate", sample_file("single-tet"), "--max-w1", "3", "--support", str(support))
    assert code == EXIT_OK
    assert out.splitlines()[0] == "count 4"


def test_weight_and_components(capsys, sample_file, tmp_path):
    link = tmp_path / "link.txt"
    link.write_text("1 0 0 0 0 0 0\n1 0 0 0 0 0 0\n")
    code, out, _ = run(capsys, "weight", sample_file("doubled-tet"), str(link))
    assert code == EXIT_OK
    assert out == "w1=3 w2=3\n"

    code, out, _ = run(capsys, "components", sample_file("doubled-tet"), str(link))
    assert out == "count 1\nchi 2\n1 0 0 0 0 0 0\n1 0 0 0 0 0 0\n"


def test_weight_of_inadmissible_vector(capsys, sample_file, tmp_path):
    half = tmp_path / "half.txt"
    half.write_text("1 0 0 0 0 0 0\n0 0 0 0 0 0 0\n")
    code, _, err = run(capsys, "weight", sample_file("doubled-tet"), str(half))
    assert code == EXIT_INPUT
    assert "do not match" in err


def test_orient_and_prism(capsys, sample_file, tmp_path):
    code, out, _ = run(capsys, "orient", sample_file("cyclic-triangle"))
    assert code == EXIT_OK
    assert out.startswith("triangles 3\n")

    canonical = tmp_path / "canonical.txt"
    code, out, _ = run(capsys, "prism", sample_file("tetrahedron-boundary"), "--canonical-out", str(canonical))
    assert code == EXIT_OK
    assert out.startswith("tets 12\n")
    assert canonical.read_text().splitlines()[:3] == ["1 0 0 0 0 0 0", "0 0 0 0 1 0 0", "0 0 0 1 0 0 0"]


def test_prism_rejects_cyclic(capsys, sample_file):
    code, _, err = run(capsys, "prism", sample_file("cyclic-triangle"))
    assert code == EXIT_INPUT
    assert "cyclic" in err


def test_verify_weights(capsys):
    code, out, _ = run(capsys, "verify-weights", "--depth", "3", "--no-timing")
    assert code == EXIT_OK
    assert "passed: yes" in out
    assert "elapsed_seconds" not in out


def test_verify_prism_is_deterministic(capsys, sample_file):
    path = sample_file("tetrahedron-boundary")
    first = run(capsys, "verify-prism", path, "--max-w1", "9", "--no-timing")
    second = run(capsys, "verify-prism", path, "--max-w1", "9", "--no-timing")
    assert first[0] == EXIT_OK
    assert first[1] == second[1]


def test_verify_theorem1(capsys, sample_file, tmp_path):
    scale = tmp_path / "scale.txt"
    scale.write_text("1\n")
    code, out, _ = run(capsys, "verify-theorem1", sample_file("single-tet"), "--scale", str(scale), "--max-w1", "4")
    assert code == EXIT_OK
    assert out.startswith("scenario: theorem1\n")


def test_verify_outside(capsys, sample_file):
    code, out, _ = run(capsys, "verify-outside", sample_file("tetrahedron-boundary"), "--scale", "1", "--max-w1", "6")
    assert code == EXIT_OK
    assert "instance: tets=44 prism_tets=12 cone_tets=8" in out


def test_exit_code_constants():
    assert (EXIT_OK, EXIT_FAILED, EXIT_INPUT) == (0, 1, 2)
