"""Cross-check of the sequence kernels against OEIS b-files.

Downloads go through an injectable ``transport(url) -> bytes`` and are
cached under ``$BINSUM_CACHE_DIR`` (default ``~/.cache/binsum``). Offline
runs never call the transport: they read a valid cache file or the bundled
fixture, and a corrupt cache file is an error rather than silently ignored.
"""

from __future__ import annotations

import os
import urllib.error
import urllib.request
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from . import seqcore

CACHE_ENV = "BINSUM_CACHE_DIR"
TIMEOUT = 20.0


@dataclass(frozen=True)
class SeqInfo:
    name: str
    anumber: str
    kernel: Callable[[int], int]

    @property
    def bfile(self) -> str:
        return f"b{self.anumber[1:]}.txt"

    @property
    def url(self) -> str:
        return f"https://oeis.org/{self.anumber}/{self.bfile}"


SEQUENCES = {
    "fib": SeqInfo("fib", "A000045", seqcore.fib),
    "lucas": SeqInfo("lucas", "A000032", seqcore.lucas_num),
}


class BFileError(ValueError):
    pass


class NetworkError(Exception):
    """Download failed, or offline mode found nothing usable."""


def parse_bfile(text: str) -> dict:
    """``index value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BFileError(f"line {lineno}: expected 'index value', got {raw!r}")
        try:
            idx, val = int(parts[0]), int(parts[1])
        except ValueError:
            raise BFileError(f"line {lineno}: non-integer field in {raw!r}") from None
        if idx in out:
            raise BFileError(f"line {lineno}: index {idx} repeated")
        out[idx] = val
    if not out:
        raise BFileError("no terms")
    lo = min(out)
    if sorted(out) != list(range(lo, lo + len(out))):
        raise BFileError("indices are not consecutive")
    return out


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "binsum"


def fixture_text(info: SeqInfo) -> str:
    return resources.files("binsum").joinpath("data", info.bfile).read_text()


def urllib_transport(url: str) -> bytes:
    try:
        with urllib.request.urlopen(url, timeout=TIMEOUT) as resp:
            return resp.read()
    except (urllib.error.URLError, OSError) as exc:
        raise NetworkError(f"could not fetch {url}: {exc}") from None


def load_terms(info: SeqInfo, offline: bool = False,
               transport: Optional[Callable[[str], bytes]] = None,
               directory: Optional[Path] = None) -> tuple:
    """Return (terms dict, source description)."""
    directory = directory if directory is not None else cache_dir()
    path = directory / info.bfile
    if path.exists():
        try:
            return parse_bfile(path.read_text()), str(path)
        except (BFileError, UnicodeDecodeError, OSError) as exc:
            if offline:
                raise NetworkError(
                    f"cached {path} is corrupt ({exc}); rerun without --offline to re-download"
                ) from None
    if offline:
        return parse_bfile(fixture_text(info)), f"bundled {info.bfile}"
    transport = transport or urllib_transport
    try:
        data = transport(info.url)
    except NetworkError:
        raise
    except Exception as exc:
        raise NetworkError(f"could not fetch {info.url}: {exc}") from None
    try:
        text = data.decode("utf-8") if isinstance(data, bytes) else str(data)
        terms = parse_bfile(text)
    except (BFileError, UnicodeDecodeError) as exc:
        raise NetworkError(f"downloaded {info.url} is not a b-file: {exc}") from None
    try:
        directory.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError:
        pass  # an unwritable cache only costs a re-download next time
    return terms, info.url


@dataclass
class CheckResult:
    sequence: str
    checked: int
    mismatch: Optional[tuple] = None  # (index, oeis value, computed value)
    source: str = ""

    @property
    def ok(self) -> bool:
        return self.mismatch is None

    def message(self) -> str:
        if self.ok:
            unit = "term" if self.checked == 1 else "terms"
            return f"OK ({self.checked} {unit})"
        i, want, got = self.mismatch
        return f"MISMATCH at index {i}: OEIS has {want}, computed {got}"


def check(name: str, limit: int, offline: bool = False,
          transport: Optional[Callable[[str], bytes]] = None,
          directory: Optional[Path] = None) -> CheckResult:
    """Compare the first ``limit`` b-file terms with the kernel."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    info = SEQUENCES[name]
    terms, source = load_terms(info, offline, transport, directory)
    start = min(terms)
    if len(terms) < limit:
        raise ValueError(f"{source} has only {len(terms)} terms, fewer than {limit}")
    for i in range(start, start + limit):
        got = info.kernel(i)
        if got != terms[i]:
            return CheckResult(name, i - start + 1, (i, terms[i], got), source)
    return CheckResult(name, limit, None, source)
