import json

import pytest

from mqc.cli import main
from mqc.formats import read_instance, read_samples
from mqc.ising import energy


@pytest.fixture
def suite(tmp_path):
    out = tmp_path / "suite"
    assert main(["generate", "--class", "normal", "--spec", "1,2,4", "--count", "3",
                 "--seed", "10", "--out", str(out)]) == 0
    return out


def sample_file(suite, tmp_path, reads=20):
    inst = suite / "normal-1x2x4-s10.json"
    out = tmp_path / "reads.json"
    assert main(["sample", "--instance", str(inst), "--reads", str(reads), "--sweeps", "3",
                 "--seed", "4", "--out", str(out)]) == 0
    return inst, out


class TestPvalue:
    def test_published(self, capsys):
        assert main(["pvalue", "--nb", "50", "--nw", "0"]) == 0
        assert capsys.readouterr().out.strip() == "8.8818e-16"

    def test_negative_is_contract_error(self, capsys):
        assert main(["pvalue", "--nb", "-1", "--nw", "0"]) == 2
        assert "error" in capsys.readouterr().err

    def test_usage(self, capsys):
        assert main(["pvalue", "--nb", "3"]) == 1
        assert main(["frobnicate"]) == 1
        assert main([]) == 1
        assert capsys.readouterr().out == ""


class TestPipeline:
    def test_generate(self, suite):
        manifest = json.loads((suite / "manifest.json").read_text())
        assert manifest == {"class": "normal", "spec": [1, 2, 4], "seeds": [10, 11, 12]}
        assert read_instance(suite / "normal-1x2x4-s11.json").num_spins == 16

    def test_sample(self, suite, tmp_path):
        _, out = sample_file(suite, tmp_path)
        assert read_samples(out).shape == (20, 16)
        meta = json.loads((tmp_path / "reads.meta.json").read_text())
        assert meta["sampler"]["num_reads"] == 20 and meta["sampler"]["seed"] == 4

    def test_correct_rmqc_one_matches_mqc(self, suite, tmp_path):
        inst, reads = sample_file(suite, tmp_path)
        energies = {}
        for extra, name in ((["--method", "mqc"], "m.json"), (["--method", "rmqc", "--r", "1", "--seed", "3"], "r.json")):
            out = tmp_path / name
            assert main(["correct", "--instance", str(inst), "--samples", str(reads), "--out", str(out)] + extra) == 0
            meta = json.loads((tmp_path / name.replace(".json", ".meta.json")).read_text())
            assert meta["input_count"] == 20
            assert meta["energy"] == energy(read_instance(inst), read_samples(out)[0])
            energies[name] = meta["energy"]
        assert energies["m.json"] == energies["r.json"]
        assert json.loads((tmp_path / "r.meta.json").read_text())["r"] == 1

    def test_correct_sqc(self, suite, tmp_path):
        inst, reads = sample_file(suite, tmp_path)
        out = tmp_path / "s.json"
        assert main(["correct", "--instance", str(inst), "--samples", str(reads), "--method", "sqc",
                     "--out", str(out)]) == 0
        assert read_samples(out).shape == (20, 16)

    def test_rmqc_needs_r(self, suite, tmp_path):
        inst, reads = sample_file(suite, tmp_path)
        assert main(["correct", "--instance", str(inst), "--samples", str(reads), "--method", "rmqc",
                     "--out", str(tmp_path / "x.json")]) == 1

    def test_dimension_mismatch(self, suite, tmp_path):
        _, reads = sample_file(suite, tmp_path)
        other = tmp_path / "small"
        main(["generate", "--class", "binary", "--spec", "1,1,2", "--count", "1", "--out", str(other)])
        code = main(["correct", "--instance", str(other / "binary-1x1x2-s0.json"), "--samples", str(reads),
                     "--method", "mqc", "--out", str(tmp_path / "x.json")])
        assert code == 2

    def test_missing_file(self, tmp_path, capsys):
        assert main(["oracle", "--instance", str(tmp_path / "nope.json")]) == 2
        assert capsys.readouterr().err

    def test_oracle(self, suite, capsys):
        assert main(["oracle", "--instance", str(suite / "normal-1x2x4-s10.json")]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["state"]) == 16

    def test_oracle_cap(self, suite, monkeypatch):
        monkeypatch.setenv("MQC_BRUTE_FORCE_CAP", "8")
        assert main(["oracle", "--instance", str(suite / "normal-1x2x4-s10.json")]) == 2


class TestBench:
    def test_micro_suite(self, suite, tmp_path):
        report = tmp_path / "report.json"
        csv = tmp_path / "report.csv"
        args = ["bench", "--suite", str(suite / "manifest.json"), "--methods", "raw,sqc,mqc,rmqc2",
                "--reads-grid", "10,20", "--repeats", "2", "--report", str(report), "--csv", str(csv)]
        assert main(args) == 0
        doc = json.loads(report.read_text())
        assert len(doc["per_instance"]) == 3 * 2 * 2 * 4
        assert csv.read_text().count("\n") == 1 + 48

        again = tmp_path / "again.json"
        assert main(args[:-4] + ["--workers", "2", "--report", str(again)]) == 0
        strip = lambda d: [{k: v for k, v in r.items() if k != "wall_time_s"} for r in d["per_instance"]]
        assert strip(json.loads(again.read_text())) == strip(doc)

    def test_bad_method(self, suite, tmp_path):
        assert main(["bench", "--suite", str(suite / "manifest.json"), "--methods", "raw,magic",
                     "--report", str(tmp_path / "r.json")]) == 2

    def test_plot(self, suite, tmp_path):
        pytest.importorskip("matplotlib")
        report = tmp_path / "report.json"
        main(["bench", "--suite", str(suite / "manifest.json"), "--reads-grid", "10,20",
              "--report", str(report)])
        png = tmp_path / "fig.png"
        assert main(["plot", "--report", str(report), "--out", str(png)]) == 0
        assert png.read_bytes()[:4] == b"\x89PNG"
