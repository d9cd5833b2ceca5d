import json
import shutil
from pathlib import Path

import fso_noma
from fso_noma import validate


def test_all_checks_pass_quick():
    results = validate.run_checks(quick=True)
    assert len(results) == 5
    for res in results:
        assert res.passed, f"{res.name}: {res.detail}"


def test_check_names_stable():
    names = [fn.__name__ for fn in validate.ALL_CHECKS]
    assert names == ["check_pdf_normalization", "check_cdf_reference",
                     "check_sampler_moments", "check_order_statistics_ks",
                     "check_telescoping_identity"]


def test_crashing_check_reported_as_failure(monkeypatch):
    def boom(quick=False):
        raise RuntimeError("synthetic")

    monkeypatch.setattr(validate, "ALL_CHECKS", [boom])
    results = validate.run_checks()
    assert len(results) == 1
    assert not results[0].passed
    assert "synthetic" in results[0].detail


def test_data_dir_override(tmp_path, monkeypatch):
    src = Path(fso_noma.__file__).parent / "data"
    shutil.copytree(src, tmp_path / "data")
    bad = json.loads((tmp_path / "data" / "gg_cdf_reference.json").read_text())
    bad["settings"][0]["points"][3]["cdf"] -= 0.01
    (tmp_path / "data" / "gg_cdf_reference.json").write_text(json.dumps(bad))
    monkeypatch.setenv("FSO_NOMA_DATA_DIR", str(tmp_path / "data"))
    res = validate.check_cdf_reference()
    assert not res.passed
    assert "gg_cdf_reference.json" in res.detail
