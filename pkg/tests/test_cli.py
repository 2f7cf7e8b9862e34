import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldbachlab.cache import CacheHeader, CorruptCache, fnv1a64, load_cache, save_cache
from goldbachlab.cli import main
from goldbachlab.config import ConfigError, load_config
from goldbachlab.primes import sieve_primes


@pytest.fixture(scope="module")
def table():
    return sieve_primes(2, 10**6)


def test_fnv_vectors():
    # published FNV-1a 64 test vectors
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_cache_roundtrip(tmp_path, table):
    p = tmp_path / "c.gblb"
    hdr = save_cache(table, p)
    raw1 = p.read_bytes()
    assert raw1[:5] == b"GBLB1" and len(raw1) == 39 + hdr.bitmap_len
    assert hdr.bitmap_len == math.ceil((10**6 - 2) / 2 / 8)
    back = load_cache(p)
    assert np.array_equal(back.bits, table.bits) and back.count() == 78498
    save_cache(back, p)
    assert p.read_bytes() == raw1
    assert CacheHeader.unpack(raw1) == hdr


def test_cache_truncated_and_bad_magic(tmp_path, table):
    p = tmp_path / "c.gblb"
    save_cache(table, p)
    raw = p.read_bytes()
    p.write_bytes(raw[:-1])
    with pytest.raises(CorruptCache):
        load_cache(p)
    p.write_bytes(raw[:20])
    with pytest.raises(CorruptCache):
        load_cache(p)
    p.write_bytes(b"XXXXX" + raw[5:])
    with pytest.raises(CorruptCache):
        load_cache(p)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 8 * 2000 - 1))
def test_cache_single_bit_flip(tmp_path_factory, bit):
    t = sieve_primes(2, 32_000)
    p = tmp_path_factory.mktemp("flip") / "c.gblb"
    save_cache(t, p)
    raw = bytearray(p.read_bytes())
    raw[39 + bit // 8] ^= 1 << (bit % 8)
    p.write_bytes(bytes(raw))
    with pytest.raises(CorruptCache):
        load_cache(p)


def _cfg(tmp_path, text):
    p = tmp_path / "run.ini"
    p.write_text(text)
    return str(p)


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")
    with pytest.raises(ConfigError):
        load_config(_cfg(tmp_path, "[family]\nbogus = 1\n"))
    with pytest.raises(ConfigError):
        load_config(_cfg(tmp_path, "[nosuch]\nx = 1\n"))
    with pytest.raises(ConfigError):
        load_config(_cfg(tmp_path, "[family]\nN0 = 2000\n"))
    with pytest.raises(ConfigError):
        load_config(_cfg(tmp_path, "[family]\nk = 4\nN0 = 2001\n"))
    rc = load_config(_cfg(tmp_path, "[family]\nk = 4\nN0 = 40001\n[scaling]\nks = 4, 5\n"))
    assert rc.family().X == 10**4 and rc.scaling_ks == (4, 5)


def test_identities_exit_codes(tmp_path):
    out = tmp_path / "o"
    assert main(["identities", "--out", str(out)]) == 0
    rep = json.loads((out / "identities.json").read_text())
    assert rep["all_ok"] and set(rep) >= {"partition", "orthogonality", "buchstab", "sandwich"}
    bad = _cfg(tmp_path, "[identities]\ncorrupt_lambda_one = true\n")
    assert main(["identities", "--config", bad, "--out", str(out)]) == 1
    assert main(["identities", "--config", str(tmp_path / "nope.ini"), "--out", str(out)]) == 2


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_verify_single_and_threads(tmp_path):
    one = _cfg(tmp_path, "[verify]\nN0_lo = 200011\nN0_hi = 200011\n")
    assert main(["verify", "--config", one, "--out", str(tmp_path / "a")]) == 0
    assert len(_rows(tmp_path / "a" / "verify.csv")) == 1
    band = _cfg(tmp_path, "[verify]\nN0_lo = 200001\nN0_hi = 200041\n")
    main(["verify", "--config", band, "--out", str(tmp_path / "t1"), "--threads", "1"])
    main(["verify", "--config", band, "--out", str(tmp_path / "t4"), "--threads", "4"])
    b1 = (tmp_path / "t1" / "verify.csv").read_bytes()
    assert b1 == (tmp_path / "t4" / "verify.csv").read_bytes()
    assert b1.count(b"\r\n") == 22
    rows = _rows(tmp_path / "t1" / "verify.csv")
    assert [int(r["N0"]) for r in rows] == list(range(200001, 200042, 2))
    summary = json.loads((tmp_path / "t1" / "verify_summary.json").read_text())
    assert summary["zero_count"] == sum(1 for r in rows if r["raw_count"] == "0")


def test_verify_row_error_recorded(tmp_path):
    # N0 = 19 is below the family range, so the row records an error
    cfg = _cfg(tmp_path, "[verify]\nN0_lo = 19\nN0_hi = 2001\n")
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "verify.csv")
    assert rows[0]["error"].startswith("TooSmall") and not rows[-1]["error"]
    summary = json.loads((tmp_path / "verify_summary.json").read_text())
    assert 19 in summary["errors"] and 2001 not in summary["errors"]


def test_scaling_roundtrip(tmp_path):
    cfg = _cfg(tmp_path, "[scaling]\nks = 3 4\nn_N0 = 2\n")
    assert main(["scaling", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "scaling.csv")
    names = {r["diagnostic"] for r in rows}
    for n in names:
        assert sorted(int(r["k"]) for r in rows if r["diagnostic"] == n) == [3, 4]
    js = json.loads((tmp_path / "scaling.json").read_text())
    for r in rows:
        assert float(r["value"]) == js[r["k"]][r["diagnostic"]]
        assert math.isfinite(float(r["value"]))
    bad = _cfg(tmp_path, "[scaling]\nks = 4\n")
    assert main(["scaling", "--config", bad, "--out", str(tmp_path)]) == 2


def test_other_commands(tmp_path):
    cfg = _cfg(tmp_path, "[primes]\nhi = 100000\n[singular]\nN0s = 101 1001\ncutoff = 1000\n[buchstab]\nu_max = 3\nstep = 0.001\n")
    for c in ("primes", "singular", "buchstab", "arcs", "expsum"):
        assert main([c, "--config", cfg, "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "primes.json").read_text())["count"] == 9592
    assert len(_rows(tmp_path / "singular.csv")) == 2
    arcs = json.loads((tmp_path / "arcs.json").read_text())
    assert arcs["uncovered"] == [] and arcs["min_cover"] >= 1
    assert len(_rows(tmp_path / "expsum_c0.csv")) == 1000
    assert main(["arcs", "--config", _cfg(tmp_path, "[arcs]\nX = 1000\nQ0 = 999\n"), "--out", str(tmp_path)]) == 2
