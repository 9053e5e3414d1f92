import numpy as np
import pytest

from locscape.fieldio import read_field, write_field
from locscape.grid import GridShape, PotentialSpec, make_potential

from conftest import random_field


def test_round_trip_is_bit_exact(tmp_path, convention):
    f = random_field(GridShape(32, convention), 5, -1e3, 1e3)
    write_field(tmp_path / "f.lsf", f)
    g = read_field(tmp_path / "f.lsf")
    assert g.shape == f.shape
    assert f.values.tobytes() == g.values.tobytes()


def test_header_layout(tmp_path):
    V = make_potential(PotentialSpec(1.0, 3), GridShape.domain(8))
    write_field(tmp_path / "v.lsf", V)
    raw = (tmp_path / "v.lsf").read_bytes()
    assert raw.startswith(b"LSF1 n=8 h=0.125\n")
    assert len(raw) == len(b"LSF1 n=8 h=0.125\n") + 8 * 64
    payload = np.frombuffer(raw[len(b"LSF1 n=8 h=0.125\n"):], dtype="<f8")
    assert np.array_equal(payload, V.values.ravel())


def test_size_mismatch_rejected(tmp_path):
    p = tmp_path / "bad.lsf"
    p.write_bytes(b"LSF1 n=8 h=1.0\n" + np.zeros(63).tobytes())
    with pytest.raises(ValueError, match="payload"):
        read_field(p)


def test_nan_payload_rejected(tmp_path):
    p = tmp_path / "nan.lsf"
    data = np.zeros(64)
    data[5] = np.nan
    p.write_bytes(b"LSF1 n=8 h=1.0\n" + data.astype("<f8").tobytes())
    with pytest.raises(ValueError, match="non-finite"):
        read_field(p)


@pytest.mark.parametrize("header", [b"LSF2 n=8 h=1.0\n", b"LSF1 n=x h=1.0\n", b"garbage", b"LSF1 n=8 h=0.3\n"])
def test_malformed_header_rejected(tmp_path, header):
    p = tmp_path / "h.lsf"
    p.write_bytes(header + np.zeros(64).tobytes())
    with pytest.raises(ValueError):
        read_field(p)
