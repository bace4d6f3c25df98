import random

from dualgrad.omap import OMap, Steps


def test_insert_get():
    m = OMap()
    m = m.insert_with(3, "a").insert_with(1, "b").insert_with(2, "c")
    assert m.get(1) == "b" and m.get(2) == "c" and m.get(3) == "a"
    assert m.get(9, "missing") == "missing"
    assert m.keys() == [1, 2, 3]


def test_insert_combine():
    m = OMap().insert_with(5, 2.0)
    m = m.insert_with(5, 3.0, lambda a, b: a + b)
    assert m.get(5) == 5.0
    assert len(m) == 1


def test_delete_max_order():
    rng = random.Random(7)
    keys = rng.sample(range(1000), 60)
    m = OMap()
    for k in keys:
        m = m.insert_with(k, k)
    seen = []
    while not m.is_empty():
        k, v, m = m.delete_max()
        assert v == k
        seen.append(k)
    assert seen == sorted(keys, reverse=True)


def test_union_with():
    a = OMap().insert_with(1, 1.0).insert_with(2, 2.0)
    b = OMap().insert_with(2, 3.0).insert_with(4, 4.0)
    u = a.union_with(b, lambda x, y: x + y)
    assert dict(u.items()) == {1: 1.0, 2: 5.0, 4: 4.0}
    # persistence: the inputs are untouched
    assert dict(a.items()) == {1: 1.0, 2: 2.0}
    assert dict(b.items()) == {2: 3.0, 4: 4.0}


def test_against_dict_model():
    rng = random.Random(99)
    m = OMap()
    model = {}
    for _ in range(3000):
        op = rng.random()
        if op < 0.55 or not model:
            k = rng.randrange(200)
            m = m.insert_with(k, 1.0, lambda a, b: a + b)
            model[k] = model.get(k, 0.0) + 1.0
        elif op < 0.8:
            k = rng.randrange(250)
            assert m.get(k) == model.get(k)
        else:
            k, v, m = m.delete_max()
            mk = max(model)
            assert (k, v) == (mk, model.pop(mk))
    assert dict(m.items()) == model


def test_steps_grow_logarithmically():
    # Inserting n sequential keys costs O(n log n) node visits in total.
    for n in (256, 1024, 4096):
        steps = Steps()
        m = OMap(steps=steps)
        for k in range(n):
            m = m.insert_with(k, float(k))
        import math
        assert steps.n <= 6 * n * math.log2(n), (n, steps.n)


def test_max_key():
    assert OMap().max_key() is None
    m = OMap().insert_with(4, 0).insert_with(9, 0).insert_with(2, 0)
    assert m.max_key() == 9
