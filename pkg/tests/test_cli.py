import json

import pytest

from wl2link.cli import main
from wl2link.generate import cycle_graph, path_graph
from wl2link.graph import disjoint_union


def write_edgelist(path, g):
    path.write_text("".join(f"{u} {v}\n" for u, v in g.edge_list()))
    return str(path)


@pytest.fixture
def c6_file(tmp_path):
    return write_edgelist(tmp_path / "c6.edgelist", cycle_graph(6))


@pytest.fixture
def k2_files(tmp_path):
    k2 = path_graph(2)
    k2k2, _ = disjoint_union(k2, k2)
    return (
        write_edgelist(tmp_path / "k2.edgelist", k2),
        write_edgelist(tmp_path / "k2k2.edgelist", k2k2),
    )


class TestRefine:
    def test_c6_wl1_single_class(self, c6_file, capsys):
        assert main(["refine", "--graph", c6_file, "--test", "WL1"]) == 0
        out = capsys.readouterr().out
        assert "stable_at: 1" in out
        assert "iteration 0: 1 classes" in out

    def test_path3_two_classes(self, tmp_path, capsys):
        path = write_edgelist(tmp_path / "p3.edgelist", path_graph(3))
        assert main(["refine", "--graph", path, "--test", "WL1"]) == 0
        out = capsys.readouterr().out
        assert "2 classes" in out.splitlines()[-1]

    def test_json_schema(self, c6_file, capsys):
        assert main(
            ["--output", "json", "refine", "--graph", c6_file, "--test", "WL2",
             "--mask", "0,1"]
        ) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["test"] == "WL2"
        assert d["mask"] == [0, 1]
        assert all(len(row) == 3 for row in d["colors"]["0"])

    def test_bogus_kind_usage_error(self, c6_file, capsys):
        assert main(["refine", "--graph", c6_file, "--test", "BOGUS"]) == 1
        assert "valid" in capsys.readouterr().err

    def test_missing_file_runtime_error(self, capsys):
        assert main(["refine", "--graph", "/nonexistent", "--test", "WL1"]) == 2
        assert capsys.readouterr().err.startswith("error:")


class TestDistinguish:
    def test_f3_wl2(self, k2_files, capsys):
        k2, k2k2 = k2_files
        assert main(
            ["distinguish", "--graph-a", k2, "--link-a", "0,1",
             "--graph-b", k2k2, "--link-b", "0,1", "--test", "WL2"]
        ) == 0
        assert "distinguished at iteration 1" in capsys.readouterr().out

    def test_same_instance(self, c6_file, capsys):
        assert main(
            ["distinguish", "--graph-a", c6_file, "--link-a", "0,1",
             "--graph-b", c6_file, "--link-b", "0,1", "--test", "FWL2"]
        ) == 0
        assert "indistinguishable" in capsys.readouterr().out

    def test_bad_pair_usage_error(self, c6_file, capsys):
        assert main(
            ["distinguish", "--graph-a", c6_file, "--link-a", "0;1",
             "--graph-b", c6_file, "--link-b", "0,1", "--test", "WL1"]
        ) == 1


class TestFixturesCommand:
    def test_writes_manifest_and_validates(self, tmp_path, capsys):
        out = tmp_path / "fx"
        assert main(["fixtures", "--out", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        names = {entry["name"] for entry in manifest}
        assert {"F3-graph-size", "F4a-common-neighbor", "F4b-antipodal-vs-cross"} <= names
        for entry in manifest:
            for side in ("a", "b"):
                assert (out / entry["files"][side]).exists()
        f3 = next(e for e in manifest if e["name"] == "F3-graph-size")
        assert f3["expected"]["WL2"] == {"distinguished": True, "iteration": 1}
        assert f3["expected"]["WL1"]["distinguished"] is False


class TestPowerCheckCommand:
    def test_fixtures_corpus_json(self, capsys):
        assert main(
            ["--output", "json", "power-check", "--corpus", "fixtures",
             "--tests", "WL1,WL2,FWL2"]
        ) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["kinds"] == ["WL1", "WL2", "FWL2"]
        assert d["implications"]["WL1->WL2"]["holds"] is True
        assert d["implications"]["WL2->WL1"]["holds"] is False

    def test_unknown_corpus(self, capsys):
        assert main(["power-check", "--corpus", "bogus"]) == 1


class TestPredictCommand:
    def test_deterministic_json(self, capsys):
        argv = ["--output", "json", "predict", "--generate", "er:n=50,p=0.15,seed=4",
                "--test", "WL2_Local", "--seed", "3"]
        assert main(argv) == 0
        first = json.loads(capsys.readouterr().out)
        assert main(argv) == 0
        second = json.loads(capsys.readouterr().out)
        for key in ("val_auc", "test_auc", "n", "m", "dataset", "kind"):
            assert first[key] == second[key]

    def test_requires_one_source(self, capsys):
        assert main(["predict", "--test", "WL1"]) == 1

    def test_seed_flag_after_subcommand(self, capsys):
        assert main(
            ["predict", "--generate", "er:n=50,p=0.15,seed=4", "--test", "WL1",
             "--seed", "2", "--output", "json"]
        ) == 0
        assert json.loads(capsys.readouterr().out)["split_seed"] == 2

    def test_quiet_table(self, capsys):
        assert main(
            ["--quiet", "predict", "--generate", "er:n=50,p=0.15,seed=4",
             "--test", "WL1"]
        ) == 0
        assert capsys.readouterr().out == ""
