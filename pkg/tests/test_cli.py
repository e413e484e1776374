import hashlib
import json
from pathlib import Path

import pytest

from contextjoin.cli import main

INDEX_FILES = ["catalog.json", "inverted.cjii", "minhash.cjmh", "metadata.cjem", "values.cjem"]


def checksum_dir(path: Path) -> dict[str, str]:
    return {
        name: hashlib.sha256((path / name).read_bytes()).hexdigest()
        for name in INDEX_FILES
    }


@pytest.fixture(scope="module")
def indexed_lake(tmp_path_factory, example_lake_dir):
    idx = tmp_path_factory.mktemp("idx")
    code = main(["index", "--lake", str(example_lake_dir), "--out", str(idx), "--seed", "5"])
    assert code == 0
    return idx


class TestIndexCommand:
    def test_creates_all_files_and_summary(self, tmp_path, example_lake_dir, capsys):
        code = main(["index", "--lake", str(example_lake_dir), "--out", str(tmp_path / "idx")])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["tables"] == 4
        assert summary["columns"] == 13
        for name in INDEX_FILES:
            assert (tmp_path / "idx" / name).exists()
            assert summary["index_bytes"][name] > 0

    def test_missing_lake_flag_usage_error(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["index", "--out", "x"])
        assert err.value.code == 2

    def test_same_seed_identical_checksums(self, tmp_path, example_lake_dir):
        for out in ("a", "b"):
            assert (
                main(
                    [
                        "index",
                        "--lake",
                        str(example_lake_dir),
                        "--out",
                        str(tmp_path / out),
                        "--seed",
                        "7",
                    ]
                )
                == 0
            )
        assert checksum_dir(tmp_path / "a") == checksum_dir(tmp_path / "b")

    def test_nonexistent_lake_is_engine_error(self, tmp_path, capsys):
        code = main(["index", "--lake", str(tmp_path / "void"), "--out", str(tmp_path / "idx")])
        assert code == 1
        assert "error" in capsys.readouterr().err


class TestSearchCommand:
    def test_jsonl_output(self, indexed_lake, capsys):
        code = main(
            [
                "search",
                "--idx",
                str(indexed_lake),
                "--query-table",
                "texas_child_population",
                "--query-column",
                "County",
                "-k",
                "10",
            ]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert 0 < len(lines) <= 10
        rows = [json.loads(line) for line in lines]
        assert rows[0]["rank"] == 1
        assert rows[0]["table"] == "child_assistance_recipients"
        assert set(rows[0]) == {"rank", "table", "column", "closeness", "criteria", "sources"}

    def test_adhoc_csv_query(self, indexed_lake, tmp_path, capsys):
        query = tmp_path / "q.csv"
        query.write_text("County\nHarris\nDallas\nTravis\nMadison\n", encoding="utf-8")
        code = main(
            [
                "search",
                "--idx",
                str(indexed_lake),
                "--query-table",
                str(query),
                "--query-column",
                "County",
                "-k",
                "5",
            ]
        )
        assert code == 0
        assert capsys.readouterr().out.strip()

    def test_only_single_criterion(self, indexed_lake, capsys):
        code = main(
            [
                "search",
                "--idx",
                str(indexed_lake),
                "--query-table",
                "texas_child_population",
                "--query-column",
                "County",
                "--only",
                "value_semantics",
            ]
        )
        assert code == 0
        assert capsys.readouterr().out.strip()

    def test_minhash_mode(self, indexed_lake, capsys):
        code = main(
            [
                "search",
                "--idx",
                str(indexed_lake),
                "--query-table",
                "texas_child_population",
                "--query-column",
                "County",
                "--minhash",
            ]
        )
        assert code == 0
        top = json.loads(capsys.readouterr().out.splitlines()[0])
        assert top["table"] == "child_assistance_recipients"

    def test_explain_adds_contributions(self, indexed_lake, capsys):
        code = main(
            [
                "search",
                "--idx",
                str(indexed_lake),
                "--query-table",
                "texas_child_population",
                "--query-column",
                "County",
                "--explain",
            ]
        )
        assert code == 0
        top = json.loads(capsys.readouterr().out.splitlines()[0])
        assert "contributions" in top
        assert set(top["contributions"]) == set(top["criteria"])

    def test_unknown_column_exit_3_with_suggestions(self, indexed_lake, capsys):
        code = main(
            [
                "search",
                "--idx",
                str(indexed_lake),
                "--query-table",
                "texas_child_population",
                "--query-column",
                "Counyt",
            ]
        )
        assert code == 3
        assert "County" in capsys.readouterr().err


class TestEvaluateCommand:
    def test_single_report(self, indexed_lake, example_gt_path, capsys):
        code = main(
            ["evaluate", "--idx", str(indexed_lake), "--gt", str(example_gt_path), "-k", "10"]
        )
        assert code == 0
        out, err = capsys.readouterr()
        report = json.loads(out.strip())
        assert report["label"] == "full"
        assert report["mrr"] == 1.0
        assert "MRR" in err  # aligned table on stderr

    def test_ablate_single_emits_seven(self, indexed_lake, example_gt_path, capsys):
        code = main(
            [
                "evaluate",
                "--idx",
                str(indexed_lake),
                "--gt",
                str(example_gt_path),
                "--ablate",
                "single",
            ]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 7
        assert all(json.loads(line)["label"].startswith("only:") for line in lines)

    def test_k_sweep_rows(self, indexed_lake, example_gt_path, capsys):
        code = main(
            [
                "evaluate",
                "--idx",
                str(indexed_lake),
                "--gt",
                str(example_gt_path),
                "--k-sweep",
                "1..5",
            ]
        )
        assert code == 0
        ks = [json.loads(line)["k"] for line in capsys.readouterr().out.strip().splitlines()]
        assert ks == [1, 2, 3, 4, 5]

    def test_csv_per_query_rows(self, indexed_lake, example_gt_path, capsys):
        code = main(
            ["evaluate", "--idx", str(indexed_lake), "--gt", str(example_gt_path), "--csv"]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("label,k,query_table")
        assert len(lines) == 2

    def test_malformed_ground_truth_exit_4_with_line(self, indexed_lake, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "query_table,query_column,target_table,target_column\nq,c\n", encoding="utf-8"
        )
        code = main(["evaluate", "--idx", str(indexed_lake), "--gt", str(bad)])
        assert code == 4
        assert "line 2" in capsys.readouterr().err
