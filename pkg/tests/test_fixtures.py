import csv
from pathlib import Path

from reprokg.en50549 import apr_spec, nor_spec
from reprokg.fixtures import PN, UN, generate_synthetic_trace, write_fixture_tree

from conftest import FIXTURES


def test_regeneration_is_byte_identical(tmp_path):
    written = write_fixture_tree(tmp_path)
    assert written
    for p in written:
        rel = Path(p).relative_to(tmp_path)
        assert (FIXTURES / rel).read_bytes() == Path(p).read_bytes(), rel


def test_committed_logs_have_expected_rows():
    for name, rows in (("nor", 1800), ("apr", 1440)):
        with open(FIXTURES / "ucd" / "logs" / f"{name}.csv", newline="") as fh:
            data = list(csv.reader(fh))
        assert len(data) == rows + 1
        assert data[0][0] == "time"


def test_stripped_logs_drop_breaker():
    header = (FIXTURES / "ucd-stripped" / "logs" / "nor.csv").read_text().splitlines()[0]
    assert "BRK" not in header


def test_generator_is_deterministic():
    a = generate_synthetic_trace(nor_spec(UN), 1, 0.002, seed=9)
    b = generate_synthetic_trace(nor_spec(UN), 1, 0.002, seed=9)
    assert a.rows == b.rows and a.times == b.times


def test_sample_rate_scales_rows():
    assert len(generate_synthetic_trace(apr_spec(PN), 2, 0)) == 2880


def test_disconnect_zeroes_every_channel():
    trace = generate_synthetic_trace(apr_spec(PN), 1, 0.002, disconnect_at=700, seed=1)
    after = [row for t, row in zip(trace.times, trace.rows) if t >= 700]
    assert after and all(v == 0.0 for row in after for v in row)
    before = [row for t, row in zip(trace.times, trace.rows) if t < 700]
    assert all(v != 0.0 for row in before for v in row[:1])
