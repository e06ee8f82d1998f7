"""Command-line front end: dispatch, serialization, config handling.

Commands run in-process through dispatch() so failures surface as
ordinary assertions; file outputs go to tmp_path.
"""

import json
import math

import numpy as np
import pytest

from todasov.cli import (
    _merge_value_flags,
    dispatch,
    dumps_canonical,
    load_config,
    parse_coeffs,
    parse_grid,
    parse_poly,
)
from todasov.exactpoly import Poly
from todasov.spectral import build_spectral, period_matrix


class TestCanonicalJson:
    def test_floats_fixed_width(self):
        assert dumps_canonical(0.1) == "0.10000000000000001"
        assert dumps_canonical(1.0) == "1"
        assert dumps_canonical(1e-7) == "9.9999999999999995e-08"

    def test_keys_sorted(self):
        assert dumps_canonical({"b": 1, "a": 2}) == \
            '{\n  "a": 2,\n  "b": 1\n}'

    def test_scalar_types(self):
        assert dumps_canonical(None) == "null"
        assert dumps_canonical(True) == "true"
        assert dumps_canonical(np.bool_(False)) == "false"
        assert dumps_canonical(np.float64(0.5)) == "0.5"
        assert dumps_canonical(np.int32(7)) == "7"
        assert dumps_canonical("a\"b\n") == '"a\\"b\\u000a"'

    def test_complex_split(self):
        out = json.loads(dumps_canonical(1 + 2j))
        assert out == {"re": 1.0, "im": 2.0}

    def test_arrays_and_nesting_parse_back(self):
        obj = {"m": [[1.5, -2.0], [0.0, 3.25]], "tags": ["x", "y"]}
        assert json.loads(dumps_canonical(obj)) == obj

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            dumps_canonical(math.inf)

    def test_deterministic(self):
        obj = {"z": [0.1, 0.2], "a": {"k": 1e-17}}
        assert dumps_canonical(obj) == dumps_canonical(obj)


class TestParsers:
    def test_coeff_list(self):
        assert parse_coeffs("-6,0,1").coeffs == Poly([-6.0, 0.0, 1.0]).coeffs

    def test_coeff_list_rejects_junk(self):
        with pytest.raises(ValueError):
            parse_coeffs("1,two,3")

    def test_symbolic_name(self):
        assert parse_poly("b1").coeffs == [0.0, 1.0]

    def test_symbolic_out_of_range(self):
        with pytest.raises(ValueError):
            parse_poly("b2", genus=1)

    def test_grid(self):
        assert parse_grid("-10:10:0.01") == (-10.0, 10.0, 0.01)

    def test_grid_rejects_bad_shapes(self):
        for text in ("1:2", "2:1:0.1", "0:1:0", "0:1:-1"):
            with pytest.raises(ValueError):
                parse_grid(text)

    def test_leading_dash_values_merge(self):
        # coefficient lists and grids may start with a dash; they are
        # folded into --flag=value so the parser cannot eat them
        assert _merge_value_flags(["--t", "-6,0,1", "--nodes", "64"]) == \
            ["--t=-6,0,1", "--nodes", "64"]
        assert _merge_value_flags(["--grid", "-10:10:0.5"]) == \
            ["--grid=-10:10:0.5"]
        assert _merge_value_flags(["--duration", "-2.0"]) == \
            ["--duration", "-2.0"]


class TestConfig:
    def test_parse_and_skip_comments(self, tmp_path):
        f = tmp_path / "c.txt"
        f.write_text("# comment\n\nhbar = 0.5\nlevels=4\n")
        assert load_config(str(f)) == {"hbar": "0.5", "levels": "4"}

    def test_malformed_line_is_named(self, tmp_path):
        f = tmp_path / "c.txt"
        f.write_text("hbar=0.5\njunk\n")
        with pytest.raises(ValueError, match="line 2"):
            load_config(str(f))

    def test_cli_flag_wins(self, tmp_path, capsys):
        f = tmp_path / "c.txt"
        f.write_text("hbar=0.5\n")
        assert dispatch(["--config", str(f), "quantize-bs", "--hbar",
                         "1.0", "--nj", "2"]) == 0
        assert "hbar=1" in capsys.readouterr().out

    def test_config_fills_default(self, tmp_path, capsys):
        f = tmp_path / "c.txt"
        f.write_text("hbar=0.5\n")
        assert dispatch(["--config", str(f), "quantize-bs", "--nj", "2"]) == 0
        assert "hbar=0.5" in capsys.readouterr().out

    def test_unknown_key_rejected(self, tmp_path):
        f = tmp_path / "c.txt"
        f.write_text("volume=11\n")
        assert dispatch(["--config", str(f), "quantize-bs", "--nj", "2"]) == 2


class TestDispatch:
    def test_no_command(self, capsys):
        assert dispatch([]) == 2
        capsys.readouterr()

    def test_unknown_flag(self, capsys):
        assert dispatch(["characters", "--bogus"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_command(self, capsys):
        assert dispatch(["frobnicate"]) == 2
        capsys.readouterr()

    def test_input_error_is_usage_error(self, capsys):
        # a polynomial violating the reality conditions is an input
        # problem, not an identity failure
        assert dispatch(["periods", "--t", "1,0,1"]) == 2
        assert "error" in capsys.readouterr().err


class TestPeriods:
    def test_payload_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "p.json"
        assert dispatch(["periods", "--t", "-6,0,1",
                         "--json", str(out)]) == 0
        capsys.readouterr()
        payload = json.loads(out.read_text())
        assert set(payload) == {"t", "branch_points", "rawPeriods", "A", "J"}
        pd = period_matrix(build_spectral(Poly([-6.0, 0.0, 1.0])))
        assert payload["A"][0][0] == pytest.approx(pd.A[0, 0])
        assert payload["J"][0] == pytest.approx(pd.J[0])
        manifest = json.loads((tmp_path / "p.manifest.json").read_text())
        assert manifest["command"] == "periods"
        assert manifest["params"]["t"] == "-6,0,1"
        assert "numpy" in manifest["versions"]
        assert manifest["summary"]["pass"] is True


class TestEvolve:
    def test_csv_columns_and_conservation(self, tmp_path, capsys):
        phase = tmp_path / "x.json"
        phase.write_text('{"p": [0.4, -0.3, 0.1], "q": [0.5, 0.0, -0.5]}')
        out = tmp_path / "traj.csv"
        assert dispatch(["evolve", "--phase", str(phase), "--flow", "1",
                         "--periods", "1", "--samples", "101",
                         "--csv", str(out)]) == 0
        capsys.readouterr()
        lines = out.read_text().splitlines()
        assert lines[0].split(",") == (
            ["tau"] + [f"p{i}" for i in (1, 2, 3)]
            + [f"q{i}" for i in (1, 2, 3)]
            + ["gamma1", "gamma2", "Lambda1", "Lambda2",
               "t0", "t1", "t2", "t3"])
        assert len(lines) == 102
        t0 = [float(row.split(",")[11]) for row in lines[1:]]
        assert max(t0) - min(t0) < 1e-9
        assert (tmp_path / "traj.manifest.json").exists()


class TestQuantum:
    def test_quantize_exact_payload(self, tmp_path, capsys):
        out = tmp_path / "q.json"
        assert dispatch(["quantize-exact", "--hbar", "1.0", "--levels", "2",
                         "--json", str(out)]) == 0
        capsys.readouterr()
        payload = json.loads(out.read_text())
        levels = payload["levels"]
        assert [row["level"] for row in levels] == [0, 1]
        # ground state of the relative problem at hbar = 1
        assert levels[0]["E"] == pytest.approx(3.0591745969039845, abs=1e-7)
        assert all(row["pass"] for row in levels)

    def test_qfunction_grid_normalization(self, tmp_path, capsys):
        out = tmp_path / "qf.csv"
        assert dispatch(["qfunction", "--level", "0",
                         "--grid", "-3:3:0.1", "--csv", str(out)]) == 0
        capsys.readouterr()
        lines = out.read_text().splitlines()
        assert lines[0] == "gamma,Q,core"
        assert len(lines) == 62
        mid = lines[31].split(",")
        assert float(mid[0]) == 0.0
        assert float(mid[1]) == pytest.approx(1.0, abs=1e-9)

    def test_matrix_element(self, tmp_path, capsys):
        out = tmp_path / "me.json"
        assert dispatch(["matrix-element", "--hbar", "1.0", "--levels",
                         "0,1", "--poly", "b1", "--json", str(out)]) == 0
        capsys.readouterr()
        payload = json.loads(out.read_text())
        assert payload["levels"] == [0, 1]
        assert all(n > 0 for n in payload["norms"])
        assert abs(payload["normalized"]) > 0.1

    def test_bad_levels(self, capsys):
        assert dispatch(["matrix-element", "--levels", "0;1"]) == 2
        capsys.readouterr()


class TestVerify:
    def test_structure_suite(self, capsys):
        assert dispatch(["verify-identities", "--suite", "structure"]) == 0
        out = capsys.readouterr().out
        assert "6/6 identities passed" in out

    def test_classical_suite_genus_one(self, capsys):
        assert dispatch(["verify-identities", "--suite", "classical",
                         "--genus", "1"]) == 0
        capsys.readouterr()

    def test_report_schema(self, tmp_path, capsys):
        rep = tmp_path / "r.json"
        assert dispatch(["verify-identities", "--suite", "exactness",
                         "--report", str(rep)]) == 0
        capsys.readouterr()
        rows = json.loads(rep.read_text())
        assert rows
        for row in rows:
            assert set(row) == {"identity", "inputs", "residual",
                                "tolerance", "pass"}
            assert row["pass"] is True
        assert (tmp_path / "r.manifest.json").exists()

    def test_report_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        dispatch(["verify-identities", "--suite", "exactness",
                  "--report", str(a)])
        dispatch(["verify-identities", "--suite", "exactness",
                  "--report", str(b)])
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_failing_suite_exits_one(self, capsys, monkeypatch):
        from todasov import cli
        monkeypatch.setitem(cli.TOLERANCES, "det", 0.0)
        assert dispatch(["verify-identities", "--suite", "structure"]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_pde_suite(self, capsys):
        assert dispatch(["verify-identities", "--suite", "pde"]) == 0
        out = capsys.readouterr().out
        assert "5/5 identities passed" in out


class TestCharactersCmd:
    def test_equality_verdict(self, capsys):
        assert dispatch(["characters", "--n", "2", "--order", "10"]) == 0
        out = capsys.readouterr().out
        assert "agree to order 10: True" in out
        assert "1, 2, 5" in out


class TestFourierCmd:
    def test_matches_library(self, tmp_path, capsys):
        from todasov.dynamics import fourier_coefficient
        out = tmp_path / "f.json"
        assert dispatch(["fourier", "--t", "-6,0,1", "--poly", "b1",
                         "--k", "1", "--json", str(out)]) == 0
        capsys.readouterr()
        payload = json.loads(out.read_text())
        c = fourier_coefficient(build_spectral(Poly([-6.0, 0.0, 1.0])),
                                Poly([0.0, 1.0]), [1])
        assert payload["abs"] == pytest.approx(abs(c))

    def test_wrong_k_length(self, capsys):
        assert dispatch(["fourier", "--t", "-6,0,1", "--k", "1,2"]) == 2
        capsys.readouterr()
