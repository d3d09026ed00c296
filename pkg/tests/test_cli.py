import csv
import json
import math

import numpy as np
import pytest

from starweyl.cli import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION,
    main,
    parse_config,
    run_command,
    serialize_config,
)
from starweyl.errors import GuardViolation, SchemaError

CLASSICAL = {
    "order": 2,
    "edges": [
        {"length": 1.0, "collar": 0.05, "nu": [0.0], "potentials": [[]]},
        {"length": 1.0, "collar": 0.05, "nu": [0.0], "potentials": [[]]},
        {"length": 1.0, "collar": 0.05, "nu": [0.0], "potentials": [[]]},
    ],
    "gamma": "identity",
    "grid": {"type": "linspace", "start": 2.0, "stop": 4.0, "count": 3},
    "params": {"s": 1, "k": 1, "N": 3, "tolerance": 1e-6},
}


def cfg(**overrides):
    doc = json.loads(json.dumps(CLASSICAL))
    doc.update(overrides)
    return doc


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestParseConfig:
    def test_minimal_classical(self):
        config = parse_config(json.dumps(CLASSICAL))
        assert config.model.order == 2
        assert config.model.p == 3
        assert len(config.grid) == 3

    def test_serialize_round_trip_identity(self):
        config = parse_config(json.dumps(CLASSICAL))
        again = parse_config(serialize_config(config))
        assert config == again
        assert serialize_config(config) == serialize_config(again)

    def test_missing_field(self):
        doc = cfg()
        del doc["edges"]
        with pytest.raises(SchemaError):
            parse_config(json.dumps(doc))

    def test_bad_json(self):
        with pytest.raises(SchemaError):
            parse_config("{not json")

    def test_zero_gamma_diagonal_rejected(self):
        doc = cfg(gamma=[[[0.0, 0.0], [0.0, 1.0]]] * 3)
        with pytest.raises(SchemaError):
            parse_config(json.dumps(doc))

    def test_inadmissible_exponents_forwarded_with_edge_index(self):
        # nu_0 = -0.75 gives xi = (-0.5, 1.5): difference 2 = n
        from starweyl.errors import AdmissibilityViolation

        doc = cfg()
        doc["edges"][0]["nu"] = [-0.75]
        with pytest.raises(AdmissibilityViolation) as exc:
            parse_config(json.dumps(doc))
        assert "edge 1" in str(exc.value)

    def test_complex_exponents_rejected(self):
        # nu_0 = 1.25 gives xi = 0.5 +- i: real-part collision
        from starweyl.errors import AdmissibilityViolation

        doc = cfg()
        doc["edges"][0]["nu"] = [1.25]
        with pytest.raises(AdmissibilityViolation):
            parse_config(json.dumps(doc))

    def test_grid_guard_violation(self):
        doc = cfg(grid={"type": "linspace", "start": 4000.0, "stop": 4100.0, "count": 2})
        with pytest.raises(GuardViolation):
            parse_config(json.dumps(doc))

    def test_rect_grid_row_major(self):
        doc = cfg(grid={"type": "rect", "re": [1.0, 2.0, 2], "im": [0.0, 1.0, 2]})
        config = parse_config(json.dumps(doc))
        assert np.allclose(config.grid, [1.0, 2.0, 1.0 + 1.0j, 2.0 + 1.0j])

    def test_list_grid_complex_pairs(self):
        doc = cfg(grid={"type": "list", "points": [[1.0, 0.5], 3.0]})
        config = parse_config(json.dumps(doc))
        assert np.allclose(config.grid, [1.0 + 0.5j, 3.0])


class TestRunCommand:
    def test_weyl_row_count_matches_grid(self, tmp_path):
        config = parse_config(json.dumps(CLASSICAL))
        code, files = run_command(config, "weyl", str(tmp_path))
        assert code == EXIT_OK
        rows = read_rows(tmp_path / "weyl.csv")
        assert len(rows) - 1 == len(config.grid)

    def test_weyl_eigenvalue_row_flagged_not_fatal(self, tmp_path):
        doc = cfg(grid={"type": "list", "points": [-(math.pi**2) / 4, 3.0]})
        config = parse_config(json.dumps(doc))
        code, _ = run_command(config, "weyl", str(tmp_path))
        assert code == EXIT_OK
        rows = read_rows(tmp_path / "weyl.csv")
        flag_col = rows[0].index("flag")
        assert rows[1][flag_col] == "1"
        assert rows[2][flag_col] == "0"

    def test_determinism_byte_identical(self, tmp_path):
        config = parse_config(json.dumps(CLASSICAL))
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir(), b.mkdir()
        run_command(config, "weyl", str(a))
        run_command(config, "weyl", str(b))
        assert (a / "weyl.csv").read_bytes() == (b / "weyl.csv").read_bytes()

    def test_roundtrip_passes_tolerance(self, tmp_path):
        config = parse_config(json.dumps(CLASSICAL))
        code, _ = run_command(config, "roundtrip", str(tmp_path))
        assert code == EXIT_OK
        rows = read_rows(tmp_path / "roundtrip.csv")
        assert float(rows[1][0]) <= 1e-8

    def test_eigs_locates_spectrum(self, tmp_path):
        doc = cfg()
        doc["params"]["interval"] = [-12.0, -0.5]
        doc["params"]["grid_size"] = 120
        config = parse_config(json.dumps(doc))
        code, _ = run_command(config, "eigs", str(tmp_path))
        assert code == EXIT_OK
        rows = read_rows(tmp_path / "eigs.csv")
        found = sorted(float(r[0]) for r in rows[1:])
        assert abs(found[0] + math.pi**2) < 1e-6
        assert abs(found[1] + math.pi**2 / 4) < 1e-6

    def test_plot_files_rendered(self, tmp_path):
        config = parse_config(json.dumps(CLASSICAL))
        _, files = run_command(config, "internal", str(tmp_path), plot=True)
        assert "internal.png" in files
        assert (tmp_path / "internal.png").stat().st_size > 0


class TestMainExitCodes:
    def test_validation_failure_is_2(self, tmp_path):
        doc = cfg()
        doc["edges"][0]["nu"] = [1.25]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        assert main(["validate", str(path), "--out", str(tmp_path)]) == EXIT_VALIDATION

    def test_missing_file_is_4(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.json")]) == 4

    def test_ok_run_is_0(self, tmp_path):
        path = tmp_path / "ok.json"
        path.write_text(json.dumps(CLASSICAL))
        assert main(["validate", str(path), "--out", str(tmp_path)]) == EXIT_OK

    def test_roundtrip_tolerance_violation_is_3(self, tmp_path):
        doc = cfg()
        doc["params"]["tolerance"] = 1e-18  # unattainable
        path = tmp_path / "tight.json"
        path.write_text(json.dumps(doc))
        assert main(["roundtrip", str(path), "--out", str(tmp_path)]) == EXIT_NUMERICAL
