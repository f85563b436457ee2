
import numpy as np
import pytest

from polydec import bench, cli
from polydec.cppnet import read_samples
from polydec.errors import ConfigError
from conftest import C1_PATH


def tiny_spec(**kw):
    kw.setdefault("snrs_db", (3.0,))
    kw.setdefault("decoder", "bp")
    kw.setdefault("min_block_errors", 5)
    kw.setdefault("max_frames", 200)
    kw.setdefault("seed", 9)
    return bench.SweepSpec(**kw)


def test_starved_row_flagged(c1_code):
    spec = tiny_spec(snrs_db=(100.0,), max_frames=64)
    row = bench.run_sweep(c1_code, spec).rows[0]
    assert row.block_errors == 0
    assert row.bler == 0.0
    assert row.starved


def test_sweep_deterministic_reruns(c1_code):
    spec = tiny_spec(decoder="pdd", min_block_errors=3, max_frames=96)
    a = bench.report_to_csv(bench.run_sweep(c1_code, spec))
    b = bench.report_to_csv(bench.run_sweep(c1_code, spec))
    assert a == b


def test_sweep_serial_parallel_identical(c1_code, monkeypatch):
    spec = tiny_spec(decoder="pdd", min_block_errors=3, max_frames=96)
    monkeypatch.setenv("POLYDEC_THREADS", "1")
    serial = bench.report_to_csv(bench.run_sweep(c1_code, spec))
    monkeypatch.setenv("POLYDEC_THREADS", "4")
    parallel = bench.report_to_csv(bench.run_sweep(c1_code, spec))
    assert serial == parallel


def test_bler_decreases_with_snr(c1_code):
    spec = tiny_spec(decoder="bp", snrs_db=(1.0, 3.0, 5.0), min_block_errors=30, max_frames=3000)
    rows = bench.run_sweep(c1_code, spec).rows
    assert rows[0].bler > rows[1].bler > rows[2].bler


def test_iteration_cost_example():
    assert bench.iteration_cost(6) == (18, 12)


def test_ops_per_call_reproduces_published_complexity():
    muls, adds = bench.ops_per_call(20.3675, 6)
    assert muls == pytest.approx(366.61, rel=0.10)
    assert adds == pytest.approx(244.41, rel=0.10)
    muls, adds = bench.ops_per_call(11.0653, 6, net_cost=(2, 7))
    assert muls == pytest.approx(201.17, rel=0.10)
    assert adds == pytest.approx(139.78, rel=0.10)


def test_measured_counters_match_formula(c1_code):
    spec = tiny_spec(decoder="pdd", min_block_errors=2, max_frames=32)
    row = bench.run_sweep(c1_code, spec).rows[0]
    want_muls, want_adds = bench.ops_per_call(row.mean_proj_iters, 6)
    assert row.mean_muls == pytest.approx(want_muls, rel=1e-12)
    assert row.mean_adds == pytest.approx(want_adds, rel=1e-12)


def test_collect_samples_round_trip(c1_code, tmp_path):
    paths = bench.collect_samples(
        c1_code, tmp_path, snr_db=5.0, train_target=400, val_target=80, seed=3,
        max_frames=500,
    )
    assert set(paths) == {6}
    train_path, val_path = paths[6]
    with open(train_path) as fh:
        train = read_samples(fh)
    with open(val_path) as fh:
        val = read_samples(fh)
    assert len(train) == 400 and len(val) == 80
    assert all(s.k_iters >= 2 for s in train + val)
    assert all(s.features.size == 6 for s in train)
    labels = np.array([s.label for s in train])
    assert np.all(labels > 0)


def test_collect_samples_partial_warns(c1_code, tmp_path, capsys):
    bench.collect_samples(
        c1_code, tmp_path, snr_db=5.0, train_target=10_000, val_target=100,
        seed=3, max_frames=3,
    )
    err = capsys.readouterr().err
    assert "partial" in err
    with open(tmp_path / "samples_d6.csv") as fh:
        assert len(read_samples(fh)) < 10_000


def test_collect_samples_k_min_validation(c1_code, tmp_path):
    with pytest.raises(ConfigError):
        bench.collect_samples(c1_code, tmp_path, k_min=1)


def test_histogram_normalization_and_csv(c1_code):
    hist = bench.iteration_histogram(c1_code, snr_db=5.0, frames=40, seed=5)
    total = hist.sum()
    assert total > 0
    text = bench.histogram_to_csv(hist)
    lines = text.strip().splitlines()[1:]
    freqs = [float(ln.split(",")[2]) for ln in lines]
    assert sum(freqs) == pytest.approx(1.0, abs=1e-12)
    assert hist[1] > 0  # single-evaluation projections exist


def test_histogram_rejects_bp(c1_code):
    with pytest.raises(ConfigError):
        bench.iteration_histogram(c1_code, snr_db=3.0, frames=5, decoder="bp")


def test_spec_validation():
    with pytest.raises(ConfigError):
        bench.SweepSpec(snrs_db=())
    with pytest.raises(ConfigError):
        bench.SweepSpec(snrs_db=(3.0,), min_block_errors=0)
    with pytest.raises(ConfigError):
        bench.SweepSpec(snrs_db=(3.0,), decoder="magic")


# ---------------------------------------------------------------------------
# CLI


def test_cli_simulate_and_exit_codes(tmp_path):
    out = tmp_path / "r.csv"
    rc = cli.main(
        [
            "simulate", "--code", C1_PATH, "--decoder", "bp", "--snr", "4.0",
            "--min-errors", "2", "--max-frames", "64", "--seed", "1",
            "--out", str(out),
        ]
    )
    assert rc == 0
    text = out.read_text()
    assert text.startswith(bench.CSV_HEADER)
    assert len(text.strip().splitlines()) == 2


def test_cli_rejects_unknown_decoder():
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "--code", C1_PATH, "--decoder", "nope", "--snr", "3"])
    assert exc.value.code == 2


def test_cli_ncpp_without_weights_is_config_error():
    rc = cli.main(
        ["simulate", "--code", C1_PATH, "--projector", "ncpp", "--snr", "3",
         "--min-errors", "1", "--max-frames", "8"]
    )
    assert rc == 2


def test_cli_missing_code_file():
    rc = cli.main(["simulate", "--code", "/nonexistent.alist", "--snr", "3"])
    assert rc == 2


def test_cli_hist(tmp_path):
    out = tmp_path / "h.csv"
    rc = cli.main(
        ["hist", "--code", C1_PATH, "--snr", "5.0", "--frames", "10",
         "--seed", "2", "--out", str(out)]
    )
    assert rc == 0
    assert out.read_text().startswith("k_iters,count,frequency")


def test_cli_collect_samples(tmp_path):
    rc = cli.main(
        ["collect-samples", "--code", C1_PATH, "--snr", "5.0", "--train", "50",
         "--val", "10", "--max-frames", "200", "--seed", "3", "--out", str(tmp_path)]
    )
    assert rc == 0
    assert (tmp_path / "samples_d6.csv").exists()
    assert (tmp_path / "samples_d6.val.csv").exists()


def test_cli_proj_bench(tmp_path):
    out = tmp_path / "p.csv"
    rc = cli.main(
        ["proj-bench", "--degrees", "3,6", "--count", "500", "--seed", "4",
         "--oracle-checks", "20", "--out", str(out)]
    )
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3
    for ln in lines[1:]:
        assert float(ln.split(",")[4]) <= 1e-4  # gap vs oracle
