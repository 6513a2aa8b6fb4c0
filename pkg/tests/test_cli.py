import io
import subprocess
import sys

import pytest

from markedquiver.cli import EXIT_FAIL, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, fixture_text, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def spec(tmp_path):
    def write(text, name="q.mq"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_validate_fixture(spec):
    code, out, _ = call("validate", spec(fixture_text("example6.mq")))
    assert code == EXIT_OK
    assert "halflinear" in out and "ok" in out


def test_validate_reports_parse_errors(spec):
    code, _, err = call("validate", spec("quiver { vertices: x, x ; arrows: a: x -> x }\nmarking { x: k }\n"))
    assert code == EXIT_USAGE and "line 1" in err


def test_validate_reports_missing_file():
    code, _, err = call("validate", "/nonexistent/spec.mq")
    assert code == EXIT_USAGE and err


def test_classify_gelfand(spec):
    code, out, _ = call("classify", spec(fixture_text("gelfand.mq")))
    assert code == EXIT_OK and "Tame (D̃_4)" in out


def test_classify_with_evidence(spec):
    code, out, _ = call("classify", spec("quiver { vertices: x, y ; arrows: a: x -> y, b: x -> y }\n"
                                         "marking { x: k ; y: k }\n"), "--evidence", "--dim-bound", "2")
    assert code == EXIT_OK
    assert "TameEvidence" in out and "total" in out


def test_classify_reduced_shape(spec):
    code, out, _ = call("classify", spec(fixture_text("example5.mq")))
    assert code == EXIT_OK
    assert "ReducedToVectroid" in out and "vectroid problem: (k^2 + k) + k_2" in out


def test_enumerate(spec):
    code, out, _ = call("enumerate", spec(fixture_text("prop8_chain.mq")), "--dim-bound", "2", "--p", "3")
    assert code == EXIT_OK
    assert "over GF(3)" in out and "[1]" in out


def test_reduce_pendant(spec):
    code, out, _ = call("reduce", spec(fixture_text("example6.mq")), "--arrow", "beta")
    assert code == EXIT_OK
    assert "reducible case 2" in out and "almost equivalent: True" in out


def test_reduce_non_pendant_is_usage_error(spec):
    code, _, err = call("reduce", spec("quiver { vertices: x ; arrows: a: x -> x }\nmarking { x: k }\n"),
                        "--arrow", "a")
    assert code == EXIT_USAGE and "loop" in err


def test_reduce_infinite_subproblem_is_resource_error(spec):
    # k^2 -> k^2 is tame, so its indecomposables never stop
    text = ("quiver { vertices: u, x, y ; arrows: e: u -> x, a: x -> y }\n"
            "marking { u: k ; x: k^2 ; y: k^2 }\n")
    code, _, err = call("reduce", spec(text), "--arrow", "a", "--dim-cap", "4")
    assert code == EXIT_RESOURCE and "resource" in err


@pytest.mark.parametrize("name", ["sec4-reduction", "example6", "prop8", "gelfand-d4", "wild-plane"])
def test_verify_passes(name):
    code, out, _ = call("verify", name)
    assert code == EXIT_OK and out.strip().endswith("PASS")


def test_unknown_command_is_usage_error(capsys):
    assert call("frobnicate")[0] == EXIT_USAGE
    assert call("verify", "nothing")[0] == EXIT_USAGE


def test_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE}) == 4


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "markedquiver.cli", "verify", "gelfand-d4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "PASS" in res.stdout
