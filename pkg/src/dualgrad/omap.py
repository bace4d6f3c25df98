"""Persistent integer-keyed ordered map (treap) with operation counters.

The staged engines need a balanced search structure supporting
insert-or-combine, lookup, delete-max, and union-with-combine, all
O(log n).  Priorities are a deterministic hash of the key (splitmix64),
so map shape is reproducible run to run.  Every node visit bumps a shared
step counter; the complexity assertions in the test suite read it.
"""
from __future__ import annotations

_M64 = (1 << 64) - 1


def _prio(k: int) -> int:
    z = (k + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


class _Node:
    __slots__ = ("key", "prio", "val", "left", "right")

    def __init__(self, key, prio, val, left, right):
        self.key = key
        self.prio = prio
        self.val = val
        self.left = left
        self.right = right


class Steps:
    """Shared step counter; one per engine run."""

    __slots__ = ("n",)

    def __init__(self):
        self.n = 0


def _split(node, key, steps):
    """(keys < key, value at key or None-marker, keys > key)."""
    if node is None:
        return None, None, None
    steps.n += 1
    if key < node.key:
        l, m, r = _split(node.left, key, steps)
        return l, m, _Node(node.key, node.prio, node.val, r, node.right)
    if key > node.key:
        l, m, r = _split(node.right, key, steps)
        return _Node(node.key, node.prio, node.val, node.left, l), m, r
    return node.left, node, node.right


def _join(a, b, steps):
    """Join two treaps, all keys in a < all keys in b."""
    if a is None:
        return b
    if b is None:
        return a
    steps.n += 1
    if a.prio >= b.prio:
        return _Node(a.key, a.prio, a.val, a.left, _join(a.right, b, steps))
    return _Node(b.key, b.prio, b.val, _join(a, b.left, steps), b.right)


def _insert(node, key, val, combine, steps):
    if node is None:
        steps.n += 1
        return _Node(key, _prio(key), val, None, None)
    steps.n += 1
    if key == node.key:
        newval = combine(node.val, val) if combine is not None else val
        return _Node(node.key, node.prio, newval, node.left, node.right)
    if key < node.key:
        child = _insert(node.left, key, val, combine, steps)
        if child.prio > node.prio:
            # rotate right
            return _Node(child.key, child.prio, child.val, child.left,
                         _Node(node.key, node.prio, node.val, child.right,
                               node.right))
        return _Node(node.key, node.prio, node.val, child, node.right)
    child = _insert(node.right, key, val, combine, steps)
    if child.prio > node.prio:
        # rotate left
        return _Node(child.key, child.prio, child.val,
                     _Node(node.key, node.prio, node.val, node.left,
                           child.left),
                     child.right)
    return _Node(node.key, node.prio, node.val, node.left, child)


def _get(node, key, steps):
    while node is not None:
        steps.n += 1
        if key == node.key:
            return node
        node = node.left if key < node.key else node.right
    return None


def _delete_max(node, steps):
    """Returns (max_key, max_val, rest)."""
    steps.n += 1
    if node.right is None:
        return node.key, node.val, node.left
    k, v, rest = _delete_max(node.right, steps)
    return k, v, _Node(node.key, node.prio, node.val, node.left, rest)


def _union(a, b, combine, steps):
    if a is None:
        return b
    if b is None:
        return a
    steps.n += 1
    if a.prio < b.prio:
        a, b = b, a
    l, m, r = _split(b, a.key, steps)
    val = combine(a.val, m.val) if m is not None else a.val
    return _Node(a.key, a.prio, val,
                 _union(a.left, l, combine, steps),
                 _union(a.right, r, combine, steps))


def _items(node):
    stack, out = [], []
    while node is not None or stack:
        while node is not None:
            stack.append(node)
            node = node.left
        node = stack.pop()
        out.append((node.key, node.val))
        node = node.right
    return out


class OMap:
    """Persistent ordered map; operations return fresh maps sharing the
    step counter."""

    __slots__ = ("root", "steps")

    def __init__(self, root=None, steps: Steps | None = None):
        self.root = root
        self.steps = steps if steps is not None else Steps()

    def is_empty(self) -> bool:
        return self.root is None

    def insert_with(self, key, val, combine=None) -> "OMap":
        return OMap(_insert(self.root, key, val, combine, self.steps),
                    self.steps)

    def get(self, key, default=None):
        node = _get(self.root, key, self.steps)
        return default if node is None else node.val

    def max_key(self):
        node = self.root
        if node is None:
            return None
        self.steps.n += 1
        while node.right is not None:
            self.steps.n += 1
            node = node.right
        return node.key

    def delete_max(self):
        """Returns (key, val, rest_map)."""
        if self.root is None:
            raise KeyError("delete_max of empty map")
        k, v, rest = _delete_max(self.root, self.steps)
        return k, v, OMap(rest, self.steps)

    def union_with(self, other: "OMap", combine) -> "OMap":
        return OMap(_union(self.root, other.root, combine, self.steps),
                    self.steps)

    def items(self):
        return _items(self.root)

    def keys(self):
        return [k for k, _ in _items(self.root)]

    def __len__(self):
        return len(_items(self.root))
