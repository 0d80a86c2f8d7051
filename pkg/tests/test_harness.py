import csv
import json

import numpy as np
import pytest

from sparsepca import gen_orthogonal_spectra, harness
from sparsepca.errors import InvalidInput, MissingData, ParseError
from sparsepca.harness import (ExperimentConfig, RunRecord, emit_boxplot_data, emit_table,
                               load_config, load_matrix_csv, run_experiment, save_matrix_csv,
                               write_report)
from sparsepca.pca import SPARSE_METHODS


@pytest.fixture(scope="module")
def nonortho_records():
    return run_experiment(ExperimentConfig(experiment="nonorthogonal", A=3))


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_matrix_round_trip(tmp_path, rng):
    X = rng.standard_normal((4, 3)) * 10.0 ** rng.integers(-20, 20, (4, 3))
    save_matrix_csv(X, tmp_path / "x.csv")
    np.testing.assert_array_equal(load_matrix_csv(tmp_path / "x.csv"), X)


def test_exported_spectra_shape(tmp_path):
    save_matrix_csv(gen_orthogonal_spectra().X, tmp_path / "x.csv")
    rows = _read(tmp_path / "x.csv")
    assert len(rows) == 6 and all(len(r) == 20 for r in rows)


@pytest.mark.parametrize("text, row, column", [
    ("a,b\n", 2, None),
    ("", 1, None),
    ("a,b\n1,2\n3\n", 3, None),
    ("a,b\n1,2\n3,x\n", 3, 2),
    ("a,b\n1,nan\n", 2, 2),
])
def test_matrix_parse_errors(tmp_path, text, row, column):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ParseError) as exc:
        load_matrix_csv(path)
    assert exc.value.row == row and exc.value.column == column


def test_config_validation():
    for kwargs in ({"repetitions": 0}, {"methods": ()}, {"methods": ("LDA",)},
                   {"experiment": "bogus"}, {"score_modes": ("raw",)},
                   {"experiment": "file"}):
        with pytest.raises(InvalidInput):
            ExperimentConfig(**kwargs).validate()


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# desk run\nexperiment = montecarlo\nmethods = SPCA, PMD-O\n"
                    "repetitions = 3\nseed = 9   # first seed\ncenter = yes\nknob.PMD-O = 4.5\n")
    cfg = load_config(path)
    assert cfg.experiment == "montecarlo" and cfg.methods == ("SPCA", "PMD-O")
    assert cfg.repetitions == 3 and cfg.seed == 9 and cfg.center
    assert cfg.metaparameters == {"PMD-O": 4.5}
    path.write_text("colour = blue\n")
    with pytest.raises(ParseError):
        load_config(path)
    path.write_text("repetitions = many\n")
    with pytest.raises(ParseError):
        load_config(path)


def test_nonorthogonal_records(nonortho_records):
    sparse = [r for r in nonortho_records if r.method in SPARSE_METHODS]
    assert len(sparse) == 16 and all(r.ok for r in sparse)
    for r in sparse:
        if r.score_mode == "corrected":
            assert r.stats.tot_pt == pytest.approx(1.0, abs=1e-6)
    assert nonortho_records[0].method == "Simulated"
    keys = [(r.method, r.score_mode, r.seed) for r in nonortho_records]
    assert len(keys) == len(set(keys))


def test_orthogonal_all_methods_fit():
    records = run_experiment(ExperimentConfig(experiment="orthogonal", A=2))
    assert all(r.ok and r.stats.rss <= 1e-6 for r in records)


def test_tables(tmp_path, nonortho_records):
    t1 = emit_table(nonortho_records, "table1", tmp_path / "t1.csv")
    assert _read(tmp_path / "t1.csv") == t1
    assert t1[0] == ["statistic", "Simulated", *SPARSE_METHODS]
    assert t1[1][1] == "0.4282" and t1[4][1] == "0.1717"
    t2 = {row[0]: row[1:] for row in emit_table(nonortho_records, "table2", tmp_path / "t2.csv")}
    assert t2["TotPT*"] == ["1.0000"] * 8
    col = SPARSE_METHODS.index("PMD-O")
    for label in ("TotQR", "TotT", "TotPT"):
        assert t2[label][col] == "1.0000"
    with pytest.raises(InvalidInput):
        emit_table(nonortho_records, "table3", tmp_path / "t3.csv")


def test_table_missing_methods(tmp_path, nonortho_records):
    partial = [r for r in nonortho_records if r.method not in ("PMD-M", "GPCA-O")]
    with pytest.raises(MissingData) as exc:
        emit_table(partial, "table2", tmp_path / "t.csv")
    assert exc.value.missing == ["PMD-M", "GPCA-O"]


def test_failed_run_is_recorded(monkeypatch):
    from sparsepca.errors import RankExhausted

    def boom(*args, **kwargs):
        raise RankExhausted("nothing left", component=1)

    monkeypatch.setattr(harness, "fit_method", boom)
    cfg = ExperimentConfig(experiment="nonorthogonal", methods=("PMD-O", "PCA"),
                           metaparameters={"PMD-O": 2.0})
    records = run_experiment(cfg)
    failed = [r for r in records if not r.ok]
    assert len(failed) == 4 and failed[0].error.startswith("RankExhausted")
    assert failed[0].stats is None


def test_montecarlo_outputs_deterministic(tmp_path):
    cfg = ExperimentConfig(experiment="montecarlo", repetitions=2, seed=11)
    outs = []
    for name in ("a", "b"):
        records = run_experiment(cfg)
        d = tmp_path / name
        d.mkdir()
        write_report(records, d / "report.json", cfg)
        for stat in ("macs", "rss", "tot_pt"):
            emit_boxplot_data(records, stat, d / f"{stat}.csv")
        outs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert outs[0] == outs[1]

    rows = _read(tmp_path / "a" / "macs.csv")[1:]
    assert {r[0] for r in rows} == {"11", "12"}
    for seed, method, mode, _, value in rows:
        if method in ("PMD-O", "GPCA-O") and mode == "naive":
            assert float(value) == pytest.approx(0.0, abs=1e-9)
    for seed, method, mode, _, value in _read(tmp_path / "a" / "tot_pt.csv")[1:]:
        if mode == "corrected":
            assert float(value) == pytest.approx(1.0, abs=1e-6)
    rss = {(s, m, mode): float(v) for s, m, mode, _, v in _read(tmp_path / "a" / "rss.csv")[1:]}
    for (s, m, mode), v in rss.items():
        if mode == "corrected":
            assert v <= rss[(s, m, "naive")] + 1e-15
    doc = json.loads((tmp_path / "a" / "report.json").read_text())
    assert doc["failed"] == 0 and "wall_time" not in doc["records"][0]


def test_boxplot_unknown_statistic(tmp_path):
    with pytest.raises(InvalidInput):
        emit_boxplot_data([], "median", tmp_path / "x.csv")


def test_file_experiment(tmp_path, nonortho):
    save_matrix_csv(nonortho.X, tmp_path / "x.csv")
    cfg = ExperimentConfig(experiment="file", data_path=str(tmp_path / "x.csv"), A=3,
                           methods=("PMD-PD", "GPCA-M"), target_nnz=30)
    records = run_experiment(cfg)
    assert [r.method for r in records] == ["PMD-PD", "PMD-PD", "GPCA-M", "GPCA-M"]
    assert all(r.ok for r in records)


def test_record_serialization():
    r = RunRecord("PCA", "none", "naive", 1, None, wall_time=2.5)
    assert "wall_time" not in r.as_dict() and r.as_dict(timing=True)["wall_time"] == 2.5
