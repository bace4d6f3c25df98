import pytest

from dualgrad.schedule import (
    BranchError, ProcessScheduler, SequentialScheduler, ThreadScheduler,
    make_scheduler,
)

SCHEDULERS = [SequentialScheduler, lambda: ThreadScheduler(4),
              lambda: ProcessScheduler(4)]


@pytest.mark.parametrize("factory", SCHEDULERS)
def test_fork_join_returns_both(factory):
    s = factory()
    assert s.fork_join(lambda: 1, lambda: 2) == (1, 2)


@pytest.mark.parametrize("factory", SCHEDULERS)
def test_nested_forks_no_deadlock(factory):
    s = factory()

    def tree(depth):
        if depth == 0:
            return 1
        l, r = s.fork_join(lambda: tree(depth - 1), lambda: tree(depth - 1))
        return l + r

    assert tree(4) == 16


def test_thread_scheduler_propagates_left_exception():
    s = ThreadScheduler(4)

    def boom():
        raise ValueError("branch failed")

    with pytest.raises(ValueError):
        s.fork_join(boom, lambda: 2)


def test_process_scheduler_propagates_left_exception():
    s = ProcessScheduler(4)
    calls = []

    def boom():
        raise ValueError("branch failed")

    with pytest.raises(BranchError) as exc:
        s.fork_join(boom, lambda: calls.append(1) or 2)
    assert "branch failed" in str(exc.value)
    assert calls == [1]  # the right branch still ran


def test_process_scheduler_right_exception_wins():
    s = ProcessScheduler(4)

    def boom():
        raise KeyError("right side")

    with pytest.raises(KeyError):
        s.fork_join(lambda: 1, boom)


def test_process_scheduler_big_payload():
    s = ProcessScheduler(2)
    blob = list(range(300_000))
    l, r = s.fork_join(lambda: blob, lambda: "ok")
    assert l == blob and r == "ok"


def test_worker_exhaustion_degrades_inline():
    s = ProcessScheduler(1)  # zero fork slots: everything runs inline
    assert s.fork_join(lambda: 1, lambda: 2) == (1, 2)


def test_make_scheduler():
    assert isinstance(make_scheduler(1), SequentialScheduler)
    assert isinstance(make_scheduler(4), ProcessScheduler)
    assert isinstance(make_scheduler(4, "thread"), ThreadScheduler)
