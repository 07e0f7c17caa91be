from hypothesis import given
from hypothesis import strategies as st

from heckeavg.cache import ENV_VAR, FILENAME, MAGIC, TraceCache, default_cache_dir
from heckeavg.trace import FORMULA_VERSION

keys = st.tuples(st.integers(1, 2**40), st.integers(2, 2**20), st.integers(1, 2**40))


def test_roundtrip(tmp_path):
    cache = TraceCache(tmp_path)
    assert len(cache) == 0 and not cache.dirty
    cache[(1, 12, 4)] = -1472
    cache[(37, 2, 4)] = 0
    cache[(5, 300, 4)] = -(3**400)
    assert cache.dirty
    cache.save()
    assert not cache.dirty
    again = TraceCache(tmp_path)
    assert dict(again) == dict(cache)
    assert again.path.read_bytes().startswith(MAGIC)


@given(st.dictionaries(keys, st.integers(-(10**60), 10**60), max_size=30))
def test_roundtrip_property(tmp_path_factory, entries):
    d = tmp_path_factory.mktemp("c")
    cache = TraceCache(d)
    cache.update(entries)
    cache.save()
    assert dict(TraceCache(d)) == entries


def test_version_mismatch_is_ignored(tmp_path):
    old = TraceCache(tmp_path, version="older-formula")
    old[(1, 12, 2)] = 999
    old.save()
    assert len(TraceCache(tmp_path)) == 0
    assert TraceCache(tmp_path, version="older-formula")[(1, 12, 2)] == 999
    assert FORMULA_VERSION != "older-formula"


def test_corrupt_files_are_ignored(tmp_path):
    (tmp_path / FILENAME).write_bytes(b"garbage")
    assert len(TraceCache(tmp_path)) == 0
    good = TraceCache(tmp_path)
    good[(1, 12, 2)] = -24
    good.save()
    blob = (tmp_path / FILENAME).read_bytes()
    (tmp_path / FILENAME).write_bytes(blob[:-1])
    assert len(TraceCache(tmp_path)) == 0
    (tmp_path / FILENAME).write_bytes(blob + b"\0")
    assert len(TraceCache(tmp_path)) == 0


def test_save_creates_directory_and_leaves_no_temp_files(tmp_path):
    target = tmp_path / "a" / "b"
    cache = TraceCache(target)
    cache[(3, 8, 4)] = 1
    cache.save()
    assert sorted(p.name for p in target.iterdir()) == [FILENAME]


def test_env_var(monkeypatch, tmp_path):
    monkeypatch.delenv(ENV_VAR, raising=False)
    assert default_cache_dir() is None
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert default_cache_dir() == tmp_path
