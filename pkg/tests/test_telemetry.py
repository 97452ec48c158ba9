import numpy as np

from thrustwalk.telemetry import N_COLUMNS, log_columns, read_csv, write_csv


def test_column_order_is_stable():
    cols = log_columns()
    assert cols[0] == "t"
    assert len(cols) == len(set(cols)) == N_COLUMNS
    assert cols.index("p_x") < cols.index("margin") < cols.index("thrust_0")


def test_empty_log_writes_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv([], path, {"note": "empty"})
    lines = path.read_text().splitlines()
    assert lines[0] == "# note=empty"
    assert lines[1].split(",") == log_columns()
    assert len(lines) == 2


def test_round_trip_is_exact(tmp_path, rng):
    rows = [rng.normal(scale=10.0 ** rng.integers(-8, 8), size=N_COLUMNS) for _ in range(17)]
    path = tmp_path / "log.csv"
    write_csv(rows, path, {"config_hash": "abc123", "dt": "0.0005"})
    cols, meta = read_csv(path)
    assert meta["config_hash"] == "abc123"
    table = np.stack([cols[name] for name in log_columns()], axis=1)
    for i, row in enumerate(rows):
        assert np.array_equal(table[i], row)  # bit-exact via repr round trip
