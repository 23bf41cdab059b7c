import pytest

from binsum import oeis, seqcore
from binsum.oeis import SEQUENCES


def _bfile(kernel, n):
    return "# test\n" + "".join(f"{i} {kernel(i)}\n" for i in range(n))


class Transport:
    def __init__(self, payload=None, error=None):
        self.payload = payload
        self.error = error
        self.calls = []

    def __call__(self, url):
        self.calls.append(url)
        if self.error:
            raise self.error
        return self.payload


def _forbidden(url):
    raise AssertionError(f"offline mode opened {url}")


def test_parse_bfile():
    terms = oeis.parse_bfile("# A000045\n\n0 0\n1 1\n 2 1 \n")
    assert terms == {0: 0, 1: 1, 2: 1}
    for bad in ("0 0\n1", "0 x\n", "0 0\n0 0\n", "0 0\n2 1\n", "# only\n", "0 1 2\n"):
        with pytest.raises(oeis.BFileError):
            oeis.parse_bfile(bad)


def test_fixtures_match_kernels():
    for info in SEQUENCES.values():
        terms = oeis.parse_bfile(oeis.fixture_text(info))
        assert min(terms) == 0 and len(terms) >= 50
        assert all(info.kernel(i) == v for i, v in terms.items())


def test_offline_uses_fixture_without_network(tmp_path):
    res = oeis.check("fib", 50, offline=True, transport=_forbidden, directory=tmp_path)
    assert res.ok and res.message() == "OK (50 terms)"
    res = oeis.check("lucas", 1, offline=True, transport=_forbidden, directory=tmp_path)
    assert res.message() == "OK (1 term)"
    assert not list(tmp_path.iterdir())


def test_offline_prefers_valid_cache(tmp_path):
    (tmp_path / "b000032.txt").write_text(_bfile(seqcore.lucas_num, 60))
    terms, source = oeis.load_terms(SEQUENCES["lucas"], True, _forbidden, tmp_path)
    assert len(terms) == 60 and source.endswith("b000032.txt")


def test_online_downloads_and_caches(tmp_path):
    t = Transport(_bfile(seqcore.fib, 80).encode())
    res = oeis.check("fib", 70, transport=t, directory=tmp_path)
    assert res.ok and t.calls == ["https://oeis.org/A000045/b000045.txt"]
    assert (tmp_path / "b000045.txt").exists()
    oeis.check("fib", 70, transport=t, directory=tmp_path)
    assert len(t.calls) == 1


def test_corrupt_cache_redownloads_online(tmp_path):
    (tmp_path / "b000045.txt").write_text("garbage\n")
    t = Transport(_bfile(seqcore.fib, 55).encode())
    assert oeis.check("fib", 50, transport=t, directory=tmp_path).ok
    assert len(t.calls) == 1
    assert oeis.parse_bfile((tmp_path / "b000045.txt").read_text())[54] == seqcore.fib(54)


def test_corrupt_cache_offline_is_network_error(tmp_path):
    (tmp_path / "b000045.txt").write_text("0 0\n1\n")
    with pytest.raises(oeis.NetworkError, match="corrupt"):
        oeis.check("fib", 10, offline=True, transport=_forbidden, directory=tmp_path)


def test_network_failure(tmp_path):
    t = Transport(error=OSError("no route"))
    with pytest.raises(oeis.NetworkError):
        oeis.check("fib", 10, transport=t, directory=tmp_path)
    with pytest.raises(oeis.NetworkError):
        oeis.check("fib", 10, transport=Transport(b"<html>"), directory=tmp_path)


def test_mismatch_reported(tmp_path):
    text = _bfile(seqcore.fib, 20).replace("\n7 13\n", "\n7 14\n")
    (tmp_path / "b000045.txt").write_text(text)
    res = oeis.check("fib", 20, offline=True, directory=tmp_path)
    assert not res.ok and res.mismatch == (7, 14, 13)
    assert "index 7" in res.message()


def test_cache_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv("BINSUM_CACHE_DIR", str(tmp_path))
    assert oeis.cache_dir() == tmp_path
    monkeypatch.delenv("BINSUM_CACHE_DIR")
    assert oeis.cache_dir().name == "binsum"


def test_limit_checks(tmp_path):
    with pytest.raises(ValueError):
        oeis.check("fib", 0, offline=True, directory=tmp_path)
    with pytest.raises(ValueError):
        oeis.check("fib", 10 ** 6, offline=True, directory=tmp_path)
