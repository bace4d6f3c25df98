"""Fork-join schedulers.

Three interchangeable implementations of a single operation:

    fork_join(left, right) -> (left(), right())

* ``SequentialScheduler`` runs left then right on the calling thread; it is
  the deterministic scheduler used by tests and by ``--threads 1``.
* ``ThreadScheduler`` runs the left branch on a freshly spawned thread and
  the right branch inline.  Spawning per fork (instead of queueing into a
  fixed pool) means nested forks can never deadlock: a fork's continuation
  is never parked behind its own children.  Under CPython's GIL this gives
  concurrency but no wall-clock speedup for interpreter work.
* ``ProcessScheduler`` forks a child process for the left branch (when a
  worker slot is free) and runs the right branch inline; the child sends
  its pickled result back over a pipe.  This is the scheduler that yields
  real parallel speedup for pure-Python work.

Branch callables handed to ``ProcessScheduler`` must return picklable
values and must not rely on mutating shared state: all engine state that
crosses a fork is returned through the branch result (message passing).
"""
from __future__ import annotations

import gc
import multiprocessing
import os
import pickle
import struct
import tempfile
import threading
import traceback


class SequentialScheduler:
    """Deterministic left-then-right execution."""

    parallel = False

    def fork_join(self, left, right):
        return left(), right()


class ThreadScheduler:
    parallel = True

    def __init__(self, workers: int | None = None):
        # Cap concurrent spawned branches; extra forks degrade to inline.
        self._slots = threading.Semaphore(max(1, (workers or 4) - 1))

    def fork_join(self, left, right):
        if not self._slots.acquire(blocking=False):
            return left(), right()
        box = {}

        def run():
            try:
                box["ok"] = left()
            except BaseException as exc:  # propagated after join
                box["err"] = exc

        t = threading.Thread(target=run, daemon=True)
        t.start()
        try:
            rv = right()
        finally:
            t.join()
            self._slots.release()
        if "err" in box:
            raise box["err"]
        return box["ok"], rv


class BranchError(RuntimeError):
    """A forked child process raised; carries the child's traceback text."""


def _scratch_dir() -> str:
    # tmpfs when available: child results move at memory speed.
    if os.path.isdir("/dev/shm") and os.access("/dev/shm", os.W_OK):
        return "/dev/shm"
    return tempfile.gettempdir()


class ProcessScheduler:
    """os.fork-based fork-join: the left branch runs in a forked child
    (when a worker slot is free) and hands its pickled result back through
    an unlinked temp file whose description is shared across the fork.

    A file instead of a pipe keeps the child's critical path free of
    backpressure: the parent reads the result only after the join, at
    memory speed on tmpfs.
    """

    parallel = True

    def __init__(self, workers: int):
        self._slots = multiprocessing.Semaphore(max(0, workers - 1))

    def fork_join(self, left, right):
        if not self._slots.acquire(block=False):
            return left(), right()
        fd, path = tempfile.mkstemp(prefix="dualgrad-fj-", dir=_scratch_dir())
        os.unlink(path)
        pid = os.fork()
        if pid == 0:
            # Child: compute the left branch, ship it back, and vanish
            # without running any parent atexit/teardown machinery.  GC is
            # off in the child: collector scans write to the headers of
            # inherited objects and would copy-on-write most of the heap.
            gc.disable()
            try:
                try:
                    payload = pickle.dumps(("ok", left()),
                                           protocol=pickle.HIGHEST_PROTOCOL)
                except BaseException:
                    payload = pickle.dumps(("err", traceback.format_exc()),
                                           protocol=pickle.HIGHEST_PROTOCOL)
                os.write(fd, struct.pack("<Q", len(payload)))
                written = 0
                view = memoryview(payload)
                while written < len(payload):
                    written += os.write(fd, view[written:])
            finally:
                os._exit(0)
        right_exc = None
        try:
            rv = right()
        except BaseException as exc:
            right_exc = exc
        os.waitpid(pid, 0)
        self._slots.release()
        try:
            os.lseek(fd, 0, os.SEEK_SET)
            header = os.read(fd, 8)
            (size,) = struct.unpack("<Q", header)
            buf = bytearray()
            while len(buf) < size:
                chunk = os.read(fd, min(1 << 24, size - len(buf)))
                if not chunk:
                    raise EOFError("truncated fork-join result")
                buf += chunk
            tag, lv = pickle.loads(bytes(buf))
        except BaseException:
            tag, lv = "err", "child produced no readable result"
        finally:
            os.close(fd)
        if right_exc is not None:
            raise right_exc
        if tag == "err":
            raise BranchError(f"forked branch failed:\n{lv}")
        return lv, rv


def make_scheduler(threads: int, kind: str = "process"):
    """Scheduler for a requested worker count (1 means sequential)."""
    if threads <= 1:
        return SequentialScheduler()
    if kind == "thread":
        return ThreadScheduler(threads)
    return ProcessScheduler(threads)
