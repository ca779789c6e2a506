"""Tests for the thread-pool helpers"""

import threading

from elbowsig.utils.parallel import default_threads, parallel_map


def test_default_threads_env(monkeypatch):
    monkeypatch.setenv("ELBOWSIG_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("ELBOWSIG_THREADS", "0")
    assert default_threads() == 1


def test_default_threads_bad_env(monkeypatch):
    """A non-integer setting falls back to the core count"""
    monkeypatch.setenv("ELBOWSIG_THREADS", "many")
    assert default_threads() >= 1


def test_parallel_map_keeps_order():
    items = list(range(50))
    assert parallel_map(lambda x: x * x, items, threads=8) == [x * x for x in items]


def test_parallel_map_inline():
    """threads=1 runs every item on the calling thread"""
    caller = threading.get_ident()
    idents = parallel_map(lambda _: threading.get_ident(), range(5), threads=1)
    assert set(idents) == {caller}


def test_parallel_map_empty():
    assert parallel_map(lambda x: x, [], threads=4) == []


if __name__ == "__main__":
    test_parallel_map_keeps_order()
    test_parallel_map_inline()
    print("All parallel tests passed!")
