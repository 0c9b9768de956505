import json
import math

import pytest

from mlk.cli import main

TERM_TAU_2I = -1.3137383138033930
WEAK_TAU_2I_HALF = -1.3142782908110466
TERM_IDENTITY_G2 = -2.9826069522587457


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def tau_2i_doc():
    return {"g": 1, "degree": 1, "embeddings": [{"re": [[0.0]], "im": [[2.0]]}]}


class TestBoundCommand:
    def test_golden_tau_2i(self, tmp_path, capsys):
        path = write(tmp_path, "a.json", tau_2i_doc())
        code, out, _ = run(capsys, ["bound", path])
        assert code == 0
        doc = json.loads(out)
        assert doc["height_lower_bound"] == pytest.approx(TERM_TAU_2I, abs=1e-5)
        assert doc["simplified_lower_bound"] == pytest.approx(WEAK_TAU_2I_HALF, abs=1e-5)
        assert doc["per_embedding"][0]["rho"] == pytest.approx(1 / math.sqrt(2), abs=1e-7)

    def test_golden_g2_identity(self, tmp_path, capsys):
        doc = {
            "g": 2,
            "degree": 1,
            "embeddings": [{"re": [[0.0, 0.0], [0.0, 0.0]], "im": [[1.0, 0.0], [0.0, 1.0]]}],
        }
        path = write(tmp_path, "b.json", doc)
        code, out, _ = run(capsys, ["bound", path])
        assert code == 0
        assert json.loads(out)["height_lower_bound"] == pytest.approx(TERM_IDENTITY_G2, abs=1e-5)

    def test_incomplete_embeddings_exit3(self, tmp_path, capsys):
        doc = tau_2i_doc()
        doc["degree"] = 2
        path = write(tmp_path, "c.json", doc)
        code, out, err = run(capsys, ["bound", path])
        assert code == 3
        assert "incomplete embedding data" in err

    def test_empty_embeddings_exit2(self, tmp_path, capsys):
        path = write(tmp_path, "d.json", {"g": 1, "degree": 1, "embeddings": []})
        code, _, err = run(capsys, ["bound", path])
        assert code == 2

    def test_unknown_field_rejected(self, tmp_path, capsys):
        doc = tau_2i_doc()
        doc["extra"] = 1
        path = write(tmp_path, "e.json", doc)
        code, _, err = run(capsys, ["bound", path])
        assert code == 2
        assert "unknown fields" in err

    def test_invalid_matrix_names_embedding(self, tmp_path, capsys):
        doc = {
            "g": 1,
            "degree": 2,
            "embeddings": [{"re": [[0.0]], "im": [[1.0]]}, {"re": [[0.0]], "im": [[-1.0]]}],
        }
        path = write(tmp_path, "f.json", doc)
        code, _, err = run(capsys, ["bound", path])
        assert code == 3
        assert "embedding 1" in err

    def test_bad_json_exit2(self, tmp_path, capsys):
        p = tmp_path / "g.json"
        p.write_text("{not json")
        code, _, _ = run(capsys, ["bound", str(p)])
        assert code == 2

    def test_missing_file_exit2(self, capsys):
        code, _, _ = run(capsys, ["bound", "/nonexistent/input.json"])
        assert code == 2

    def test_flat_row_major_matrices_accepted(self, tmp_path, capsys):
        doc = {
            "g": 2,
            "embeddings": [{"re": [0.0, 0.0, 0.0, 0.0], "im": [1.0, 0.0, 0.0, 1.0]}],
        }
        path = write(tmp_path, "h.json", doc)
        code, out, _ = run(capsys, ["bound", path])
        assert code == 0
        assert json.loads(out)["degree"] == 1  # defaults to len(embeddings)

    def test_epsilon_option(self, tmp_path, capsys):
        path = write(tmp_path, "i.json", tau_2i_doc())
        _, out_half, _ = run(capsys, ["bound", path])
        code, out_quarter, _ = run(capsys, ["bound", path, "--epsilon", "0.25"])
        assert code == 0
        a = json.loads(out_half)["simplified_lower_bound"]
        b = json.loads(out_quarter)["simplified_lower_bound"]
        assert a != b


class TestRhoCommand:
    def test_tau_2i(self, tmp_path, capsys):
        path = write(tmp_path, "a.json", tau_2i_doc())
        code, out, _ = run(capsys, ["rho", path])
        assert code == 0
        entry = json.loads(out)["per_embedding"][0]
        assert entry["rho"] == pytest.approx(0.7071068, abs=1e-6)
        assert entry["rho_clamped"] == pytest.approx(0.7071068, abs=1e-6)
        assert entry["lambda_matches_rho"] is True

    def test_g2_identity_clamped(self, tmp_path, capsys):
        doc = {
            "g": 2,
            "degree": 1,
            "embeddings": [{"re": [[0.0, 0.0], [0.0, 0.0]], "im": [[1.0, 0.0], [0.0, 1.0]]}],
        }
        path = write(tmp_path, "b.json", doc)
        code, out, _ = run(capsys, ["rho", path])
        entry = json.loads(out)["per_embedding"][0]
        assert entry["rho"] == pytest.approx(1.0, abs=1e-9)
        assert entry["rho_clamped"] == pytest.approx(0.7236013, abs=1e-6)

    def test_reduction_invariance(self, tmp_path, capsys):
        raw = {"g": 1, "degree": 1, "embeddings": [{"re": [[0.7]], "im": [[2.0]]}]}
        reduced = {"g": 1, "degree": 1, "embeddings": [{"re": [[-0.3]], "im": [[2.0]]}]}
        _, out_a, _ = run(capsys, ["rho", write(tmp_path, "a.json", raw)])
        _, out_b, _ = run(capsys, ["rho", write(tmp_path, "b.json", reduced)])
        ra = json.loads(out_a)["per_embedding"][0]["rho"]
        rb = json.loads(out_b)["per_embedding"][0]["rho"]
        assert ra == pytest.approx(rb, rel=1e-9)


class TestVerifyCommand:
    def test_lattice_suite_passes(self, capsys):
        code, out, _ = run(capsys, ["verify", "--suite", "lattice", "--random", "20",
                                    "--seed", "7", "--dim", "3"])
        assert code == 0
        doc = json.loads(out)
        assert doc["all_passed"] is True
        assert sum(c["name"].startswith("deep_point") for c in doc["checks"]) == 20
        assert all(c["pass"] for c in doc["checks"])

    def test_oracle_suite_passes(self, capsys):
        code, out, _ = run(capsys, ["verify", "--suite", "oracle"])
        assert code == 0
        assert json.loads(out)["all_passed"] is True

    def test_chain_suite_on_tau_i(self, tmp_path, capsys):
        doc = {"g": 1, "degree": 1, "embeddings": [{"re": [[0.0]], "im": [[1.0]]}],
               "options": {"budget": 16384}}
        path = write(tmp_path, "tau_i.json", doc)
        code, out, _ = run(capsys, ["verify", path, "--suite", "chain"])
        assert code == 0
        report = json.loads(out)
        assert report["all_passed"] is True
        assert all(c["slack"] >= -1e-6 for c in report["checks"])

    def test_reruns_are_bit_identical(self, capsys):
        _, out_a, _ = run(capsys, ["verify", "--suite", "lattice", "--random", "5",
                                   "--seed", "3", "--dim", "2"])
        _, out_b, _ = run(capsys, ["verify", "--suite", "lattice", "--random", "5",
                                   "--seed", "3", "--dim", "2"])
        assert out_a == out_b

    def test_outputs_reparse(self, capsys):
        _, out, _ = run(capsys, ["verify", "--suite", "integrals", "--random", "10",
                                 "--seed", "1", "--dim", "2"])
        doc = json.loads(out)
        assert {"tool", "input_digest", "checks", "all_passed"} <= set(doc)
