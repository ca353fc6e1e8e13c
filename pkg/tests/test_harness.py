import csv

import numpy as np
import pytest

from voronoi_bayes import harness as hs
from voronoi_bayes.cli import main
from voronoi_bayes.distributions import CasePreset, Normal
from voronoi_bayes.spaces import SupportWindow

SEEDS = tuple(range(1, 21))


def _rows(text):
    return list(csv.DictReader(text.splitlines()))


class TestConfusionSummary:
    def test_orientation(self):
        s = hs.ConfusionSummary.from_labels([1, 1, 1, 2, 2, 2], [1, 2, 2, 1, 2, 2])
        assert (s.minus1, s.zero, s.plus1) == (2, 3, 1)
        assert s.misclassification_probability == 0.5

    def test_published_row_sums(self):
        s = hs.ConfusionSummary(8, 174, 18)
        assert s.total == 200
        assert s.misclassification_probability == pytest.approx(0.13)


class TestRunExperiment:
    def test_case3_nn1(self):
        res = hs.run_experiment(hs.ExperimentConfig("case3", methods=("NN1",), seeds=SEEDS))
        assert res.aggregate("NN1").misclass_mean <= 0.05

    @pytest.mark.parametrize("method", ["NN1", "NN25", "LDA", "QDA", "G-Ker", "E-Ker"])
    def test_no_signal(self, method):
        same = CasePreset("same", "N(0,1) twice", Normal(0, 1), Normal(0, 1),
                          SupportWindow.interval(-4, 4), SupportWindow.interval(-4, 4), ("NN1",))
        res = hs.run_experiment(hs.ExperimentConfig(same, methods=(method,), seeds=tuple(range(10))))
        assert res.aggregate(method).misclass_mean == pytest.approx(0.5, abs=0.1)

    def test_tallies_sum_to_test_size(self):
        res = hs.run_experiment(hs.ExperimentConfig("case2", seeds=(1, 2)))
        assert all(s.total == 200 for s in res.summaries.values())

    def test_aggregates_are_probabilities(self):
        res = hs.run_experiment(hs.ExperimentConfig("case4", seeds=(1, 2, 3)))
        for a in res.aggregates().values():
            assert 0 <= a.misclass_mean <= 1
            assert a.misclass_sd is not None

    def test_infeasible_method_recorded(self):
        res = hs.run_experiment(hs.ExperimentConfig("case6", methods=("NN1", "G-Ker"), seeds=(1,)))
        assert "G-Ker" in res.errors and "1D" in res.errors["G-Ker"]
        assert res.methods == ["NN1"]

    def test_k_larger_than_training_set(self):
        res = hs.run_experiment(hs.ExperimentConfig("case3", n_train=5, methods=("NN10", "NN1"), seeds=(1,)))
        assert "NN10" in res.errors
        assert res.methods == ["NN1"]

    def test_case1_orientation(self):
        res = hs.run_experiment(hs.ExperimentConfig("case1", seeds=SEEDS))
        nn1 = res.aggregate("NN1")
        assert nn1.plus1 > nn1.minus1

    def test_thread_count_does_not_change_results(self, monkeypatch):
        cfg = hs.ExperimentConfig("case7", seeds=(3, 1, 2))
        monkeypatch.setenv(hs.THREADS_ENV, "1")
        serial = hs.results_csv(hs.run_experiment(cfg))
        monkeypatch.setenv(hs.THREADS_ENV, "3")
        assert hs.results_csv(hs.run_experiment(cfg)) == serial

    @pytest.mark.parametrize(
        "kwargs",
        [{"n_train": 1}, {"methods": ()}, {"methods": ("SVM",)}, {"seeds": ()},
         {"window1": SupportWindow.disc(3)}, {"r": 0.0}],
    )
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValueError):
            hs.ExperimentConfig("case1", **kwargs)

    def test_window_override(self):
        cfg = hs.ExperimentConfig("case5", window1=SupportWindow.interval(-5, 5))
        assert cfg.windows == (SupportWindow.interval(-5, 5), SupportWindow.interval(-15, 21))


class TestExport:
    def test_row_counts(self, tmp_path):
        res = hs.run_experiment(hs.ExperimentConfig("case3", methods=("NN1", "LDA"), seeds=(1, 2, 3)))
        path = tmp_path / "out.csv"
        hs.export_results(res, path)
        rows = hs.read_results(path)
        assert sum(not r["agg"] for r in rows) == 6
        assert sum(r["agg"] for r in rows) == 2

    def test_round_trip(self, tmp_path):
        res = hs.run_experiment(hs.ExperimentConfig("case1", seeds=(4, 5)))
        path = tmp_path / "out.csv"
        hs.export_results(res, path)
        for row in hs.read_results(path):
            if not row["agg"]:
                s = res.summaries[(row["seed"], row["method"])]
                assert (row["minus1"], row["zero"], row["plus1"]) == (s.minus1, s.zero, s.plus1)

    def test_misclass_column_recomputable(self, tmp_path):
        res = hs.run_experiment(hs.ExperimentConfig("case4", seeds=(1, 2, 3)))
        path = tmp_path / "out.csv"
        hs.export_results(res, path)
        for row in hs.read_results(path):
            total = row["minus1"] + row["zero"] + row["plus1"]
            assert row["misclass_prob"] == pytest.approx((row["minus1"] + row["plus1"]) / total, rel=1e-12)

    def test_canonical_order(self):
        res = hs.run_experiment(hs.ExperimentConfig("case3", methods=("QDA", "NN1"), seeds=(2, 1)))
        detail = [r for r in hs.results_rows(res) if r["agg"] == "false"]
        assert [(r["seed"], r["method"]) for r in detail] == [(1, "NN1"), (1, "QDA"), (2, "NN1"), (2, "QDA")]

    def test_empty_results(self, tmp_path):
        cfg = hs.ExperimentConfig("case1", seeds=(1,))
        with pytest.raises(ValueError):
            hs.export_results(hs.ExperimentResult(cfg), tmp_path / "x.csv")

    def test_unwritable_path(self, tmp_path):
        res = hs.run_experiment(hs.ExperimentConfig("case3", methods=("NN1",), seeds=(1,)))
        with pytest.raises(OSError):
            hs.export_results(res, tmp_path / "missing" / "x.csv")


class TestPlotData:
    def test_case1_gap_between_lobes(self, tmp_path):
        cfg = hs.ExperimentConfig("case1", methods=("NN25",))
        path = tmp_path / "plot.csv"
        hs.export_density_plot_data(cfg, 1, path)
        rows = list(csv.DictReader(path.open()))
        assert len(rows[0]) == 2 + 2 * 2
        gap = [float(r["fhat_class1"]) for r in rows if 2 < float(r["x"]) < 5]
        assert gap and max(gap) < 0.05
        lobe = [float(r["fhat_class1"]) for r in rows if 0.2 < float(r["x"]) < 0.8]
        assert np.median(lobe) > 0.2

    def test_grid_spans_windows(self):
        cfg = hs.ExperimentConfig("case1")
        grid = hs.plot_grid(cfg, 100)
        assert len(grid) >= 500
        assert grid[0] == -8.5 and grid[-1] == 15.5
        assert any(w.contains([grid[0]]).all() for w in cfg.windows)
        assert any(w.contains([grid[-1]]).all() for w in cfg.windows)

    def test_true_pdf_columns(self):
        rows = hs.density_plot_rows(hs.ExperimentConfig("case4", methods=("NN1",)), 0, 500)
        assert len(rows) == 500
        assert rows[0]["true_pdf_class1"] == 0.0

    def test_planar_case_rejected(self):
        with pytest.raises(ValueError, match="1D-only"):
            hs.density_plot_rows(hs.ExperimentConfig("case6"), 0)


class TestConfigFile:
    def test_parse(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# case 2 with a denser reference sample\n"
            "case = case2\n"
            "n_uniforms = 2500   # trailing comment\n"
            "\n"
            "methods = NN1, NN10\n"
            "seeds = 1..3,7\n"
            "window1 = interval:-4,9\n"
        )
        cfg = hs.load_config(path)
        assert cfg.case_name == "case2"
        assert cfg.n_uniforms == 2500
        assert cfg.methods == ("NN1", "NN10")
        assert cfg.seeds == (1, 2, 3, 7)
        assert cfg.windows[0] == SupportWindow.interval(-4, 9)

    def test_override(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("case = case3\nn_train = 50\n")
        assert hs.load_config(path, n_train=80).n_train == 80

    @pytest.mark.parametrize("text", ["case case1", "colour = red", "= 3"])
    def test_bad_lines(self, text):
        with pytest.raises(ValueError, match="line 1"):
            hs.parse_config_text(text)

    def test_windows(self):
        assert hs.parse_window("annulus:4,11") == SupportWindow.annulus(4, 11)
        assert hs.parse_window("disc:18") == SupportWindow.disc(18)
        assert hs.parse_window("rectangle:0,0,1,2") == SupportWindow.rectangle((0, 0), (1, 2))
        with pytest.raises(ValueError):
            hs.parse_window("ellipse:1,2")

    def test_seeds(self):
        assert hs.parse_seeds("1..20") == tuple(range(1, 21))
        assert hs.parse_seeds("5") == (5,)
        with pytest.raises(ValueError):
            hs.parse_seeds("3..1")


class TestCli:
    def test_list_cases(self, capsys):
        assert main(["list-cases"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 7

    def test_run_case3(self, tmp_path):
        out = tmp_path / "c3.csv"
        assert main(["run-case", "case3", "--seeds", "1..20", "--out", str(out)]) == 0
        agg = {r["method"]: r for r in csv.DictReader(out.open()) if r["agg"] == "true"}
        assert float(agg["NN1"]["misclass_prob"]) <= 0.05

    def test_verify_theory(self, capsys):
        assert main(["verify-theory", "--n", "100", "--m", "2", "--replications", "100000"]) == 0
        rows = _rows(capsys.readouterr().out)
        assert rows[0]["var_pass"] == "true"

    def test_verify_theory_normal(self, capsys):
        assert main(["verify-theory", "--dist", "normal", "--n", "500", "--replications", "2000"]) == 0
        assert _rows(capsys.readouterr().out)[0]["n"] == "500"

    def test_plot_data(self, capsys):
        assert main(["plot-data", "case3", "--grid", "500", "--methods", "NN10"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 501

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("case = case3\nmethods = NN1\nseeds = 1,2\n")
        assert main(["run-case", "--config", str(cfg)]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 1 + 2 + 1

    @pytest.mark.parametrize(
        "argv, message",
        [
            (["run-case", "case8"], "case1"),
            (["run-case", "case1", "--methods", "SVM"], "NN1"),
            (["run-case", "case1", "--seeds", "x"], ""),
            (["run-case"], "case"),
            (["plot-data", "case6"], "1D-only"),
            (["verify-theory", "--m", "200"], "m < n"),
            (["bogus"], ""),
        ],
    )
    def test_config_errors(self, argv, message, capsys):
        assert main(argv) == 1
        assert message in capsys.readouterr().err

    def test_runtime_error(self, tmp_path, capsys):
        code = main(["run-case", "case3", "--methods", "NN1", "--out", str(tmp_path / "no" / "x.csv")])
        assert code == 2

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert main(["run-case", "case1", "--seeds", "1..3", "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()
