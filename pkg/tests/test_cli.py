import json
from pathlib import Path

import numpy as np
import pytest

from setree import circa, forward, star_tree, weights_to_json
from setree.cli import main

from test_encoder import make_weights

DATA = Path(__file__).parent / "data"

K3_EDGES = "0 1\n0 2\n1 2\n"
P3_EDGES = "0 1\n1 2\n"
P7_EDGES = "".join(f"{i} {i + 1}\n" for i in range(6))


@pytest.fixture
def k3_file(tmp_path):
    path = tmp_path / "k3.edges"
    path.write_text(K3_EDGES)
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run(capsys, argv)
    assert code == 0, err
    assert err == ""
    return json.loads(out)


class TestIngest:
    def test_edge_list(self, capsys, k3_file):
        doc = run_json(capsys, ["ingest", "--input", k3_file])
        assert doc == {"vertices": 3, "edges": 3, "volume": 6}

    def test_taxonomy(self, capsys):
        doc = run_json(
            capsys,
            ["ingest", "--input", str(DATA / "mini_taxonomy.txt"), "--format", "taxonomy"],
        )
        assert doc["vertices"] == 13
        assert doc["edges"] == 12
        assert doc["labels"] == 12
        assert doc["depth"] == 3
        assert doc["root"] == "catalog"
        assert "multi_parent_labels" not in doc


class TestEntropy:
    def test_star_default(self, capsys, k3_file):
        doc = run_json(capsys, ["entropy", "--input", k3_file])
        assert doc["total"] == 1.584963
        assert doc["log_base"] == 2
        assert list(doc["terms"]) == ["0", "1", "2"]

    def test_tree_from_file(self, capsys, k3_file, tmp_path):
        tree_path = tmp_path / "tree.json"
        code, out, err = run(
            capsys,
            ["circa", "--input", k3_file, "--k", "2", "--output", str(tmp_path / "c.json")],
        )
        assert code == 0
        circa_doc = json.loads((tmp_path / "c.json").read_text())
        tree_path.write_text(json.dumps(circa_doc["tree"]))
        doc = run_json(capsys, ["entropy", "--input", k3_file, "--tree", str(tree_path)])
        assert doc["total"] == 1.389975

    def test_wrong_graph_for_tree(self, capsys, k3_file, tmp_path):
        from setree import from_edge_list

        g3 = from_edge_list(K3_EDGES)
        tree_path = tmp_path / "tree.json"
        tree_path.write_text(json.dumps(star_tree(g3).to_json()))
        p3_file = tmp_path / "p3.edges"
        p3_file.write_text(P3_EDGES)
        code, out, err = run(
            capsys, ["entropy", "--input", str(p3_file), "--tree", str(tree_path)]
        )
        assert code == 1
        assert err.startswith("error:")
        assert "different graph" in err


class TestCirca:
    def test_triangle(self, capsys, k3_file):
        doc = run_json(capsys, ["circa", "--input", k3_file, "--k", "2"])
        assert doc["entropy"] == 1.389975
        assert doc["k"] == 2
        assert len(doc["tree"]["nodes"]) == 6
        assert "trace" not in doc

    def test_trace(self, capsys, k3_file):
        doc = run_json(capsys, ["circa", "--input", k3_file, "--k", "2", "--trace"])
        assert doc["trace"]["stage1_deltas"] == [-0.1949875]
        assert doc["trace"]["stage2_deltas"] == []
        assert doc["trace"]["h_max"] == 2

    def test_byte_identical_reruns(self, capsys, k3_file):
        _, out1, _ = run(capsys, ["circa", "--input", k3_file, "--k", "2", "--trace"])
        _, out2, _ = run(capsys, ["circa", "--input", k3_file, "--k", "2", "--trace"])
        assert out1 == out2

    def test_taxonomy_input(self, capsys):
        doc = run_json(
            capsys,
            [
                "circa",
                "--input", str(DATA / "mini_taxonomy.txt"),
                "--format", "taxonomy",
                "--k", "2",
            ],
        )
        assert doc["k"] == 2
        assert len(doc["tree"]["nodes"]) >= 14


class TestRandomTree:
    def test_deterministic_default_seed(self, capsys, k3_file):
        _, out1, _ = run(capsys, ["random-tree", "--input", k3_file, "--k", "2"])
        _, out2, _ = run(capsys, ["random-tree", "--input", k3_file, "--k", "2"])
        assert out1 == out2
        doc = json.loads(out1)
        assert doc["seed"] == 0
        assert doc["entropy"] >= 1.389975 - 1e-6

    def test_seed_flag(self, capsys, k3_file):
        doc = run_json(capsys, ["random-tree", "--input", k3_file, "--k", "2", "--seed", "9"])
        assert doc["seed"] == 9


class TestCompare:
    def test_small_graph_includes_brute_force(self, capsys, k3_file):
        doc = run_json(capsys, ["compare", "--input", k3_file, "--k", "2", "--trials", "10"])
        assert doc["trials"] == 10
        assert doc["circa_entropy"] == 1.389975
        assert doc["brute_force_entropy"] == 1.389975
        assert doc["random_min_entropy"] >= doc["brute_force_entropy"] - 1e-6
        assert doc["random_mean_entropy"] >= doc["random_min_entropy"]

    def test_larger_graph_skips_brute_force(self, capsys, tmp_path):
        path = tmp_path / "p7.edges"
        path.write_text(P7_EDGES)
        doc = run_json(capsys, ["compare", "--input", str(path), "--k", "2", "--trials", "5"])
        assert "brute_force_entropy" not in doc

    def test_bad_trials(self, capsys, k3_file):
        code, _, err = run(capsys, ["compare", "--input", k3_file, "--k", "2", "--trials", "0"])
        assert code == 1
        assert "trials" in err


class TestEncode:
    def test_matches_library_forward(self, capsys, tmp_path):
        from setree import from_edge_list

        g = from_edge_list(K3_EDGES)
        t, _ = circa(g, 1)
        w = make_weights(
            n_labels=3, d_h=2, d_v=2, k=1,
            w_d=np.array([[1.0], [2.0], [3.0]]),
            b_h=np.full((3, 2), 0.25),
            w_c=np.arange(12, dtype=np.float64).reshape(4, 3) / 10.0,
            b_c=np.array([0.1, -0.2, 0.3]),
        )
        tree_path = tmp_path / "tree.json"
        tree_path.write_text(t.to_json_str())
        weights_path = tmp_path / "weights.json"
        weights_path.write_text(json.dumps(weights_to_json(w)))
        vec_path = tmp_path / "doc.vec"
        vec_path.write_text("1.5 -0.5\n")
        doc = run_json(
            capsys,
            [
                "encode",
                "--tree", str(tree_path),
                "--weights", str(weights_path),
                "--input", str(vec_path),
            ],
        )
        h_t, p = forward(t, w, np.array([1.5, -0.5]))
        assert doc["h_t"] == [float(f"{x:.7g}") for x in h_t]
        assert doc["probabilities"] == [float(f"{x:.7g}") for x in p]

    def test_bad_vector_file(self, capsys, tmp_path, k3_file):
        from setree import from_edge_list

        t, _ = circa(from_edge_list(K3_EDGES), 1)
        tree_path = tmp_path / "tree.json"
        tree_path.write_text(t.to_json_str())
        weights_path = tmp_path / "weights.json"
        weights_path.write_text(json.dumps(weights_to_json(make_weights(n_labels=3,
            w_d=np.ones((3, 1)), b_h=np.zeros((3, 2)), w_c=np.zeros((4, 3)), b_c=np.zeros(3)))))
        vec_path = tmp_path / "doc.vec"
        vec_path.write_text("one two\n")
        code, _, err = run(
            capsys,
            ["encode", "--tree", str(tree_path), "--weights", str(weights_path),
             "--input", str(vec_path)],
        )
        assert code == 1
        assert "numbers" in err


class TestEvaluate:
    def test_perfect(self, capsys, tmp_path):
        pred = tmp_path / "pred.txt"
        gold = tmp_path / "gold.txt"
        pred.write_text("0.9 0.1\n0.2 0.8\n")
        gold.write_text("1 0\n0 1\n")
        doc = run_json(capsys, ["evaluate", "--pred", str(pred), "--gold", str(gold)])
        assert doc == {
            "documents": 2, "labels": 2, "threshold": 0.5,
            "micro_f1": 1.0, "macro_f1": 1.0,
        }

    def test_threshold_flag(self, capsys, tmp_path):
        pred = tmp_path / "pred.txt"
        gold = tmp_path / "gold.txt"
        pred.write_text("0.9 0.6\n")
        gold.write_text("1 0\n")
        doc = run_json(
            capsys,
            ["evaluate", "--pred", str(pred), "--gold", str(gold), "--threshold", "0.7"],
        )
        assert doc["micro_f1"] == 1.0
        assert doc["threshold"] == 0.7

    def test_comments_and_blank_lines_ignored(self, capsys, tmp_path):
        pred = tmp_path / "pred.txt"
        gold = tmp_path / "gold.txt"
        pred.write_text("# header\n0.9\n\n0.1\n")
        gold.write_text("1\n0\n")
        doc = run_json(capsys, ["evaluate", "--pred", str(pred), "--gold", str(gold)])
        assert doc["documents"] == 2
        assert doc["micro_f1"] == 1.0

    def test_ragged_rows_report_line(self, capsys, tmp_path):
        pred = tmp_path / "pred.txt"
        gold = tmp_path / "gold.txt"
        pred.write_text("0.9 0.1\n0.2\n")
        gold.write_text("1 0\n0 1\n")
        code, _, err = run(capsys, ["evaluate", "--pred", str(pred), "--gold", str(gold)])
        assert code == 1
        assert "line 2" in err


class TestSweepK:
    def test_triangle_sweep(self, capsys, k3_file):
        doc = run_json(
            capsys,
            ["sweep-k", "--input", k3_file, "--k-min", "1", "--k-max", "3"],
        )
        assert [r["k"] for r in doc["results"]] == [1, 2, 3]
        assert [r["entropy"] for r in doc["results"]] == [1.584963, 1.389975, 1.389975]

    def test_default_range(self, capsys, k3_file):
        doc = run_json(capsys, ["sweep-k", "--input", k3_file])
        assert [r["k"] for r in doc["results"]] == [1, 2, 3, 4]

    def test_bad_range(self, capsys, k3_file):
        code, _, err = run(
            capsys, ["sweep-k", "--input", k3_file, "--k-min", "3", "--k-max", "2"]
        )
        assert code == 1
        assert "k-max" in err


class TestOutputAndErrors:
    def test_output_file(self, capsys, tmp_path, k3_file):
        out_path = tmp_path / "result.json"
        code, out, err = run(
            capsys, ["entropy", "--input", k3_file, "--output", str(out_path)]
        )
        assert code == 0
        assert out == ""
        doc = json.loads(out_path.read_text())
        assert doc["total"] == 1.584963
        assert out_path.read_text().endswith("\n")

    def test_missing_file(self, capsys, tmp_path):
        code, out, err = run(capsys, ["ingest", "--input", str(tmp_path / "nope.edges")])
        assert code == 1
        assert out == ""
        assert err.startswith("error:")
        assert err.count("\n") == 1

    def test_parse_error_carries_line_number(self, capsys, tmp_path):
        path = tmp_path / "bad.edges"
        path.write_text("0 1\n2 2\n")
        code, _, err = run(capsys, ["ingest", "--input", str(path)])
        assert code == 1
        assert "line 2" in err

    def test_bad_k(self, capsys, k3_file):
        code, _, err = run(capsys, ["circa", "--input", k3_file, "--k", "0"])
        assert code == 1
        assert "at least 1" in err

    def test_unknown_subcommand_exits_two(self, capsys, k3_file):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate", "--input", k3_file])
        assert exc.value.code == 2

    def test_malformed_tree_json(self, capsys, k3_file, tmp_path):
        tree_path = tmp_path / "tree.json"
        tree_path.write_text('{"root": 0}')
        code, _, err = run(
            capsys, ["entropy", "--input", k3_file, "--tree", str(tree_path)]
        )
        assert code == 1
        assert err.startswith("error:")
