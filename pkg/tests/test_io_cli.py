"""Document parsing, serialization round-trips and the CLI surface."""
import json
import subprocess
import sys

import pytest

from pachner33 import io as pio
from pachner33.cli import main
from pachner33.errors import SchemaError


def fixture_path(name):
    import pachner33.fixtures
    from importlib import resources

    return str(resources.files("pachner33.fixtures").joinpath(name))


# ----------------------------------------------------------------- parsing

def test_parse_bundled_fixture():
    doc = pio.load_fixture("boundary_delta5.json")
    c = doc.to_complex()
    assert len(doc.simplices) == 6
    assert c.f_vector() == (6, 15, 20, 15, 6)
    assert doc.coords is not None and len(doc.coords) == 6


def test_parse_rejects_missing_coord_vertex():
    doc = pio.load_fixture("boundary_delta5.json")
    raw = json.loads(pio.serialize_complex(doc))
    del raw["coords"]["3"]
    with pytest.raises(SchemaError, match="vertex 3"):
        pio.parse_complex(json.dumps(raw))


def test_parse_rejects_short_simplex():
    text = '{"format_version": "1", "simplices": [[0, 1, 2, 3]]}'
    with pytest.raises(SchemaError, match="5 vertex ids"):
        pio.parse_complex(text)


def test_parse_rejects_bad_json():
    with pytest.raises(SchemaError, match="invalid JSON"):
        pio.parse_complex("{nope")


def test_parse_rejects_wrong_version():
    text = '{"format_version": "0", "simplices": [[0, 1, 2, 3, 4]]}'
    with pytest.raises(SchemaError, match="format_version"):
        pio.parse_complex(text)


def test_parse_validates_structure():
    text = '{"format_version": "1", "simplices": [[0, 1, 2, 3, 4], [0, 1, 2, 4, 3]]}'
    from pachner33.errors import ComplexStructureError

    with pytest.raises(ComplexStructureError, match="duplicate"):
        pio.parse_complex(text)


def test_serialize_parse_round_trip():
    doc = pio.load_fixture("join_tetra_triangle.json")
    text = pio.serialize_complex(doc)
    doc2 = pio.parse_complex(text)
    assert doc2.simplices == doc.simplices
    assert doc2.metadata == doc.metadata
    assert pio.serialize_complex(doc2) == text
    for v in doc.coords:
        assert doc2.coords[v] == doc.coords[v]  # exact double round-trip


def test_float_formatting_round_trips_exactly():
    values = [0.1, 1.0 / 3.0, 2.0**-52, 1.7976931348623157e308, -1.2345678901234567e-300]
    for x in values:
        assert float(pio.format_float(x)) == x


# --------------------------------------------------------------------- CLI

def run_cli(*argv):
    import contextlib
    import io as _io

    buf = _io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def test_cli_inspect():
    code, out = run_cli("inspect", fixture_path("boundary_delta5.json"))
    assert code == 0
    rep = json.loads(out)
    assert rep["counts"]["simplices"] == 6
    assert rep["closed"] and rep["orientation_consistent"]


def test_cli_compare_delta5_bundled_coords():
    code, out = run_cli("compare", fixture_path("boundary_delta5.json"), "--face", "0,1,2")
    rep = json.loads(out)
    assert code == 0
    assert rep["passed"]
    assert rep["deviation"] <= 1e-6
    assert rep["new_face"] == [3, 4, 5]


def test_cli_compare_join_materializes():
    code, out = run_cli(
        "compare", fixture_path("join_tetra_triangle.json"), "--face", "0,1,2"
    )
    rep = json.loads(out)
    assert code == 0 and rep["materialized"] and rep["passed"]


def test_cli_verify_identities_small():
    code, out = run_cli("verify-identities", "--trials", "3", "--seed", "7")
    rep = json.loads(out)
    assert code == 0
    assert len(rep["checks"]) == 6
    assert all(chk["passed"] for chk in rep["checks"])


def test_cli_check_flat_pass_and_perturbed_fail():
    code, out = run_cli("check-flat", fixture_path("boundary_delta5.json"))
    assert code == 0 and json.loads(out)["passed"]

    code, out = run_cli(
        "check-flat", fixture_path("boundary_delta5.json"), "--perturb", "0,1,1e-3"
    )
    rep = json.loads(out)
    assert code == 1
    assert not rep["passed"]
    assert rep["bad_faces"]  # offending faces are listed


def test_cli_jacobian_reports_rank_and_residuals():
    code, out = run_cli("jacobian", fixture_path("boundary_delta5.json"))
    rep = json.loads(out)
    assert code == 0
    assert rep["rank"] == 1
    assert rep["symmetry_residual"] <= 1e-6
    assert rep["conjugacy_residual"] <= 1e-6
    assert len(rep["matrices"]["dOmega_dL"]) == 20


def test_cli_move_round_trip(tmp_path):
    out_file = tmp_path / "moved.json"
    code, _ = run_cli(
        "move", fixture_path("join_tetra_triangle.json"),
        "--face", "0,1,2", "-o", str(out_file),
    )
    assert code == 0
    moved = pio.load_document(out_file)
    assert moved.to_complex().is_closed
    code2, out2 = run_cli("move", str(out_file), "--face", "4,5,6")
    assert code2 == 0
    rep = json.loads(out2)
    assert rep["new_face"] == [0, 1, 2]


def test_cli_move_rejects_delta5():
    code, out = run_cli("move", fixture_path("boundary_delta5.json"), "--face", "0,1,2")
    rep = json.loads(out)
    assert code == 1
    assert rep["error"]["type"] == "MovePreconditionError"


def test_cli_invariant_reports_value_and_selection():
    code, out = run_cli("invariant", fixture_path("boundary_delta5.json"))
    rep = json.loads(out)
    assert code == 0
    assert rep["value"] != 0.0
    assert rep["selection"]["rank"] == 1
    assert len(rep["selection"]["rows"]) == 1


def test_cli_realize_emits_coords(tmp_path):
    out_file = tmp_path / "realized.json"
    code, _ = run_cli(
        "realize", fixture_path("bipyramid_10cell.json"),
        "--seed", "9", "-o", str(out_file),
    )
    assert code == 0
    doc = pio.load_document(out_file)
    assert doc.coords is not None and len(doc.coords) == 7


def test_cli_unknown_command_exits_2():
    proc = subprocess.run(
        [sys.executable, "-m", "pachner33", "frobnicate"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2


def test_cli_determinism_modulo_timing():
    reports = []
    for _ in range(2):
        code, out = run_cli(
            "compare", fixture_path("boundary_delta5.json"), "--face", "1,2,3"
        )
        assert code == 0
        rep = json.loads(out)
        rep.pop("timing_s")
        reports.append(json.dumps(rep, sort_keys=True))
    assert reports[0] == reports[1]


def test_cli_determinism_with_seed():
    outs = []
    for _ in range(2):
        _, out = run_cli(
            "jacobian", fixture_path("join_tetra_triangle.json")
        )
        rep = json.loads(out)
        rep.pop("timing_s")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]
