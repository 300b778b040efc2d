import numpy as np
import pytest

from methodagree.cli import main
from methodagree.io import parse_paired, parse_report

PAIRED = "subject,a,b\n" + "".join(
    f"{i},{100 + i},{101 + i + (i % 3)}\n" for i in range(1, 13)
)

REPLICATED = "subject,method,replicate,value\n" + "".join(
    f"s{i},A,1,{100 + i}\ns{i},A,2,{102 + i}\n"
    f"s{i},B,1,{99 + 2 * i}\ns{i},B,2,{103 + i}\n"
    for i in range(1, 9)
)


@pytest.fixture
def paired_csv(tmp_path):
    path = tmp_path / "pairs.csv"
    path.write_text(PAIRED, encoding="utf-8")
    return path


@pytest.fixture
def replicated_csv(tmp_path):
    path = tmp_path / "reps.csv"
    path.write_text(REPLICATED, encoding="utf-8")
    return path


class TestAnalyze:
    def test_weighted_with_explicit_variances(self, paired_csv, tmp_path, capsys):
        report = tmp_path / "rep.json"
        plot = tmp_path / "plot.svg"
        code = main([
            "analyze", "--input", str(paired_csv),
            "--swa", "2.0", "--swb", "4.5",
            "--report", str(report), "--plot", str(plot),
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "axis: weighted average" in out
        assert "k:" in out and "bias:" in out and "loa:" in out
        result = parse_report(report.read_text(encoding="utf-8"))
        assert result.weights.alpha == 4.5
        assert result.weights.beta == 2.0
        assert plot.read_text(encoding="utf-8").startswith("<?xml")

    def test_classic_mode(self, paired_csv, capsys):
        code = main(["analyze", "--input", str(paired_csv), "--classic"])
        assert code == 0
        assert "axis: arithmetic mean" in capsys.readouterr().out

    def test_classic_warns_when_variances_supplied(self, paired_csv, capsys):
        code = main([
            "analyze", "--input", str(paired_csv), "--classic",
            "--swa", "1.0", "--swb", "2.0",
        ])
        captured = capsys.readouterr()
        assert code == 0
        assert "ignores" in captured.err

    def test_replicates_variance_source(self, replicated_csv, capsys):
        code = main(["analyze", "--replicates", str(replicated_csv)])
        assert code == 0
        assert "weighted average" in capsys.readouterr().out

    def test_zero_variances_rejected(self, paired_csv, capsys):
        code = main([
            "analyze", "--input", str(paired_csv), "--swa", "0", "--swb", "0",
        ])
        captured = capsys.readouterr()
        assert code == 2
        assert "degenerate weights" in captured.err

    def test_swa_without_swb_rejected(self, paired_csv, capsys):
        code = main(["analyze", "--input", str(paired_csv), "--swa", "1.0"])
        assert code == 2
        assert "--swb" in capsys.readouterr().err

    def test_conflicting_variance_sources_rejected(
        self, paired_csv, replicated_csv, capsys
    ):
        code = main([
            "analyze", "--input", str(paired_csv),
            "--replicates", str(replicated_csv),
            "--swa", "1.0", "--swb", "2.0",
        ])
        assert code == 2
        assert "conflict" in capsys.readouterr().err

    def test_no_variance_source_rejected(self, paired_csv, capsys):
        code = main(["analyze", "--input", str(paired_csv)])
        assert code == 2
        assert "weighted analysis needs" in capsys.readouterr().err

    def test_no_input_rejected(self, capsys):
        code = main(["analyze", "--swa", "1.0", "--swb", "2.0"])
        assert code == 2
        assert "--input" in capsys.readouterr().err

    def test_constant_axis_exits_3(self, tmp_path, capsys):
        path = tmp_path / "flat.csv"
        path.write_text(
            "subject,a,b\n1,100,100\n2,100,100\n3,100,100\n", encoding="utf-8"
        )
        code = main(["analyze", "--input", str(path), "--classic"])
        assert code == 3
        assert "constant" in capsys.readouterr().err

    def test_direction_flag(self, paired_csv, capsys):
        main(["analyze", "--input", str(paired_csv), "--classic", "--direction", "a-b"])
        assert "direction: a-b" in capsys.readouterr().out


class TestSimulate:
    def test_writes_all_artifacts(self, tmp_path, capsys):
        out = tmp_path / "sim"
        code = main(["simulate", "--case", "a", "--out", str(out)])
        assert code == 0
        for name in (
            "pairs.csv",
            "report_mean.json",
            "report_weighted.json",
            "plot_mean.svg",
            "plot_weighted.svg",
        ):
            assert (out / name).is_file(), name

    def test_case_a_weighted_report_shows_no_trend(self, tmp_path):
        out = tmp_path / "sim"
        main(["simulate", "--case", "a", "--out", str(out)])
        res = parse_report((out / "report_weighted.json").read_text(encoding="utf-8"))
        assert res.fit.r == pytest.approx(0.0, abs=1e-9)
        assert res.fit.p_value == pytest.approx(1.0, abs=1e-9)

    def test_case_b_reports_agree_across_axes(self, tmp_path):
        out = tmp_path / "sim"
        main(["simulate", "--case", "b", "--out", str(out)])
        classic = parse_report((out / "report_mean.json").read_text(encoding="utf-8"))
        weighted = parse_report(
            (out / "report_weighted.json").read_text(encoding="utf-8")
        )
        assert weighted.fit.slope == pytest.approx(classic.fit.slope, abs=1e-9)
        assert weighted.fit.r == pytest.approx(classic.fit.r, abs=1e-9)
        assert weighted.fit.p_value == pytest.approx(classic.fit.p_value, abs=1e-9)

    def test_exact_moment_stats_are_seed_independent(self, tmp_path):
        stats = []
        for seed in ("7", "8"):
            out = tmp_path / f"sim{seed}"
            main(["simulate", "--case", "d", "--seed", seed, "--out", str(out)])
            res = parse_report((out / "report_mean.json").read_text(encoding="utf-8"))
            stats.append((res.fit.r, res.fit.p_value, res.fit.slope))
        np.testing.assert_allclose(stats[0], stats[1], atol=1e-9)

    def test_pairs_file_parses(self, tmp_path):
        out = tmp_path / "sim"
        main(["simulate", "--case", "c", "--n", "50", "--out", str(out)])
        sample = parse_paired((out / "pairs.csv").read_text(encoding="utf-8"))
        assert sample.n == 50

    def test_bad_case_rejected(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--case", "q", "--out", str(tmp_path)])
        assert exc.value.code == 2


class TestTable1:
    def test_prints_reference_cells(self, capsys):
        assert main(["table1"]) == 0
        out = capsys.readouterr().out
        assert "case" in out
        assert "0.22" in out
        assert "<0.001" in out
        assert "-0.10 (-0.15 – -0.06)" in out
        assert "0.01 (-0.09 – 0.10)" in out


class TestPredictCov:
    def test_equal_variance_case(self, capsys):
        assert main([
            "predict-cov", "--alpha", "1", "--beta", "1", "--swa", "2", "--swb", "2",
        ]) == 0
        assert capsys.readouterr().out.strip() == "0"

    def test_unequal_case_with_direction(self, capsys):
        main([
            "predict-cov", "--alpha", "1", "--beta", "1",
            "--swa", "0.25", "--swb", "20.25", "--direction", "b-a",
        ])
        assert capsys.readouterr().out.strip() == "10"


class TestReplicateVariance:
    def test_prints_both_methods(self, tmp_path, capsys):
        path = tmp_path / "reps.csv"
        path.write_text(
            "subject,method,replicate,value\n"
            "s1,A,1,0\ns1,A,2,2\ns2,A,1,10\ns2,A,2,14\n"
            "s1,B,1,5\ns1,B,2,5\ns2,B,1,6\ns2,B,2,6\n",
            encoding="utf-8",
        )
        assert main(["replicate-variance", "--input", str(path)]) == 0
        out = capsys.readouterr().out
        assert "s_w2 A: 5" in out
        assert "s_w2 B: 0" in out

    def test_missing_file_exits_2(self, tmp_path, capsys):
        code = main(["replicate-variance", "--input", str(tmp_path / "nope.csv")])
        assert code == 2


class TestDeterminism:
    def test_simulate_twice_is_byte_identical(self, tmp_path):
        d1, d2 = tmp_path / "one", tmp_path / "two"
        for d in (d1, d2):
            main(["simulate", "--case", "c", "--seed", "5", "--out", str(d)])
        for name in (
            "pairs.csv",
            "report_mean.json",
            "report_weighted.json",
            "plot_mean.svg",
            "plot_weighted.svg",
        ):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes(), name

    def test_analyze_twice_is_byte_identical(self, paired_csv, tmp_path):
        outs = []
        for tag in ("one", "two"):
            report = tmp_path / f"rep_{tag}.json"
            plot = tmp_path / f"plot_{tag}.svg"
            main([
                "analyze", "--input", str(paired_csv),
                "--swa", "2.0", "--swb", "4.5",
                "--report", str(report), "--plot", str(plot),
            ])
            outs.append((report.read_bytes(), plot.read_bytes()))
        assert outs[0] == outs[1]
