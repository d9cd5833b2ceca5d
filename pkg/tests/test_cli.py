import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from fso_noma import cli

BASE = {
    "scenario": "cli-test",
    "atmosphere": {"visibility_km": 16.0, "wavelength_nm": 1550.0},
    "rytov_variances": [1.0],
    "users": [
        {"distance_km": 1.0, "target_rate": 0.5, "mu": 0.5},
        {"distance_km": 3.0, "target_rate": 0.5, "mu": 0.5},
    ],
    "zeta_db": [5.0],
    "rho_db": {"values": [20.0, 30.0]},
    "mc": {"n_trials": 5000, "seed": 33, "chunk_size": 2048},
}


def write_config(tmp_path: Path, out_name: str, **overrides) -> Path:
    doc = dict(BASE, output=str(tmp_path / out_name), **overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc, indent=1))
    return path


class TestOutageCommand:
    def test_writes_expected_csv(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "o.csv")
        assert cli.main(["outage", str(cfg)]) == 0
        data = (tmp_path / "o.csv").read_text().splitlines()
        assert data[0] == ("rho_dB,user_rank,zeta_dB,rytov_var,target_rate,"
                           "outage_theory,outage_mc,mc_stderr,n_trials")
        assert len(data) == 1 + 2 * 2  # 2 rho x 2 users
        first = data[1].split(",")
        assert first[0] == "20" and first[1] == "1"
        assert 0.0 <= float(first[5]) <= 1.0
        assert first[8] == "5000"

    def test_byte_identical_rerun_and_threads(self, tmp_path):
        cfg = write_config(tmp_path, "a.csv")
        assert cli.main(["outage", str(cfg)]) == 0
        a = (tmp_path / "a.csv").read_bytes()
        assert cli.main(["--threads", "4", "outage", str(cfg)]) == 0
        b = (tmp_path / "a.csv").read_bytes()
        assert a == b

    def test_seed_override_changes_mc(self, tmp_path):
        cfg = write_config(tmp_path, "s.csv")
        cli.main(["outage", str(cfg)])
        a = (tmp_path / "s.csv").read_bytes()
        cli.main(["--seed", "34", "outage", str(cfg)])
        b = (tmp_path / "s.csv").read_bytes()
        assert a != b

    def test_trials_override(self, tmp_path):
        cfg = write_config(tmp_path, "t.csv")
        cli.main(["outage", str(cfg), "--trials", "2000"])
        rows = (tmp_path / "t.csv").read_text().splitlines()[1:]
        assert all(r.rsplit(",", 1)[1] == "2000" for r in rows)

    def test_out_override(self, tmp_path):
        cfg = write_config(tmp_path, "ignored.csv")
        target = tmp_path / "elsewhere" / "o.csv"
        assert cli.main(["--out", str(target), "outage", str(cfg)]) == 0
        assert target.exists()

    def test_rate_sweep_rows(self, tmp_path):
        cfg = write_config(tmp_path, "r.csv",
                           target_rate_sets=[[0.3, 0.3], [0.8, 0.8]],
                           rho_db={"values": [25.0]})
        cli.main(["outage", str(cfg)])
        rows = (tmp_path / "r.csv").read_text().splitlines()[1:]
        rates = {r.split(",")[4] for r in rows}
        assert rates == {"0.3", "0.8"}

    def test_empty_sweep_exit_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "o.csv", rho_db={"values": []})
        assert cli.main(["outage", str(cfg)]) == 2
        assert "rho_db" in capsys.readouterr().err

    def test_bad_json_exit_2_with_line(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{\n "scenario": "x",\n}\n')
        assert cli.main(["outage", str(path)]) == 2
        assert "broken.json:" in capsys.readouterr().err

    def test_numeric_failure_exit_3(self, tmp_path, monkeypatch, capsys):
        from fso_noma.quadrature import QuadratureError

        def boom(cfg):
            raise QuadratureError("stalled", 0.1, 0.5)

        monkeypatch.setattr(cli, "outage_per_user", boom)
        cfg = write_config(tmp_path, "o.csv")
        assert cli.main(["outage", str(cfg)]) == 3
        assert "numeric failure" in capsys.readouterr().err


class TestSumrateCommand:
    def test_schema_and_schemes(self, tmp_path):
        cfg = write_config(tmp_path, "sr.csv", rho_db={"values": [20.0]},
                           mc={"n_trials": 5000, "seed": 33, "chunk_size": 2048})
        assert cli.main(["sumrate", str(cfg)]) == 0
        rows = (tmp_path / "sr.csv").read_text().splitlines()
        assert rows[0] == "rho_dB,scheme,rytov_var,zeta_dB,sum_rate,stderr,method"
        body = [r.split(",") for r in rows[1:]]
        assert len(body) == 4  # 2 schemes x (theory + mc)
        assert {r[1] for r in body} == {"noma", "oma"}
        methods = {r[6] for r in body}
        assert methods == {"quadrature", "mc"}
        theory_rows = [r for r in body if r[6] == "quadrature"]
        assert all(r[5] == "" for r in theory_rows)

    def test_single_scheme_only(self, tmp_path):
        cfg = write_config(tmp_path, "sr1.csv", schemes=["oma"],
                           rho_db={"values": [20.0]})
        cli.main(["sumrate", str(cfg)])
        body = (tmp_path / "sr1.csv").read_text().splitlines()[1:]
        assert all(r.split(",")[1] == "oma" for r in body)

    def test_zero_mu_oma_rows_zero(self, tmp_path):
        users = [dict(u, mu=0.0) for u in BASE["users"]]
        cfg = write_config(tmp_path, "z.csv", users=users, schemes=["oma"],
                           rho_db={"values": [20.0]})
        cli.main(["sumrate", str(cfg)])
        body = (tmp_path / "z.csv").read_text().splitlines()[1:]
        assert all(float(r.split(",")[4]) == 0.0 for r in body)

    def test_byte_identical_with_threads(self, tmp_path):
        cfg = write_config(tmp_path, "d.csv", rho_db={"values": [25.0]})
        cli.main(["sumrate", str(cfg)])
        a = (tmp_path / "d.csv").read_bytes()
        cli.main(["sumrate", str(cfg), "--threads", "8"])
        assert a == (tmp_path / "d.csv").read_bytes()


class TestValidateCommand:
    def test_quick_passes(self, capsys):
        assert cli.main(["validate", "--quick"]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 5
        assert "FAIL" not in out

    def test_corrupted_fixture_names_file(self, tmp_path, monkeypatch, capsys):
        src = Path(cli.__file__).parent / "data"
        dst = tmp_path / "data"
        shutil.copytree(src, dst)
        table = json.loads((dst / "gg_cdf_reference.json").read_text())
        table["settings"][0]["points"][0]["cdf"] += 0.5
        (dst / "gg_cdf_reference.json").write_text(json.dumps(table))
        monkeypatch.setenv("FSO_NOMA_DATA_DIR", str(dst))
        assert cli.main(["validate", "--quick"]) == 1
        out = capsys.readouterr().out
        assert "FAIL cdf-reference-table" in out
        assert "gg_cdf_reference.json" in out


class TestFormatting:
    def test_nine_significant_digits(self):
        assert cli._fmt(0.123456789123) == "0.123456789"
        assert cli._fmt(1e-8) == "1e-08"
        assert cli._fmt(12345) == "12345"
        assert cli._fmt("") == ""
        assert cli._fmt(None) == ""

    def test_csv_lf_line_endings(self, tmp_path):
        cfg = write_config(tmp_path, "lf.csv", rho_db={"values": [20.0]})
        cli.main(["outage", str(cfg)])
        raw = (tmp_path / "lf.csv").read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path, "m.csv")
    proc = subprocess.run(
        [sys.executable, "-m", "fso_noma.cli", "outage", str(cfg)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "m.csv").exists()
