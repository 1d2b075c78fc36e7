import random

import pytest

from khcurves.algebra import AlgebraElement, PathBasis
from khcurves.fields import field_make
from khcurves.tangles import (
    Crossing, HAdd, IdH, IdV, OrientationError, State, TangleError, VAdd,
    build_raw, count_closed_components, deloop, dd_of_tangle, mirror_expr,
    orientation_data, parse_tangle, reduce_morphism, compose_reduced,
    saddle_neutral, _surface, translate, trace_strands, twist,
)

Q = field_make("Q")
F2 = field_make("F2")
F3 = field_make("F3")

T23 = "hadd(twist(idv,v,2), twist(idv,v,-3))"


def test_parse():
    assert parse_tangle("idh") == IdH()
    assert parse_tangle("x+") == Crossing("A")
    e = parse_tangle("twist(idv, v, 3)")
    assert e == VAdd(VAdd(VAdd(IdV(), Crossing("B")), Crossing("B")), Crossing("B"))
    e2 = parse_tangle(T23)
    assert isinstance(e2, HAdd)
    with pytest.raises(TangleError):
        parse_tangle("hadd(idh")
    with pytest.raises(TangleError):
        parse_tangle("twist(idv, x, 3)")


def test_strands_and_closed_components():
    assert count_closed_components(parse_tangle("idv")) == 0
    assert count_closed_components(parse_tangle(T23)) == 0
    assert count_closed_components(
        parse_tangle("hadd(twist(idv,v,2), twist(idv,v,-2))")) == 1


def test_orientation_defaults():
    np, nm, _ = orientation_data(parse_tangle("twist(idv,v,3)"))
    assert (np, nm) == (3, 0)
    np, nm, _ = orientation_data(parse_tangle("twist(idv,v,-3)"))
    assert (np, nm) == (0, 3)
    np, nm, _ = orientation_data(parse_tangle(T23))
    assert (np, nm) == (0, 5)


def test_orientation_explicit():
    e = parse_tangle("idv")
    np, nm, dirs = orientation_data(e, {"nw": "in", "sw": "out", "ne": "out", "se": "in"})
    assert dirs["nw"] == "in"
    with pytest.raises(OrientationError):
        orientation_data(e, {"nw": "in", "sw": "in", "ne": "out", "se": "out"})


def test_saddle_squared_is_dot_minus_h():
    # two saddles compose to the dotted identity minus H id
    h, v = State("h", ()), State("v", ())
    f = reduce_morphism(h, v, {(_surface(saddle_neutral(h, v)), 0): Q.one}, Q)
    g = reduce_morphism(v, h, {(_surface(saddle_neutral(v, h)), 0): Q.one}, Q)
    comp = compose_reduced(h, v, h, g, f, Q)
    # one term with a dot on the non-special curve, one with -H
    assert len(comp) == 2
    dotted = [k for k in comp if k[0]]
    plain = [k for k in comp if not k[0]]
    assert comp[dotted[0]] == 1 and dotted[0][1] == 0
    assert comp[plain[0]] == -1 and plain[0][1] == 1


def test_closed_torus_and_sphere():
    # a sphere component evaluates to 0, a torus to 2, a dotted sphere to 1
    h = State("h", ())
    from khcurves.tangles import identity_neutral, _comp
    base = identity_neutral(h)
    mor = {(_surface(base + [_comp([], 0, 0)]), 0): Q.one}
    assert reduce_morphism(h, h, mor, Q) == {}
    mor = {(_surface(base + [_comp([], 1, 0)]), 0): Q.one}
    red = reduce_morphism(h, h, mor, Q)
    assert red == {(frozenset(), 0): 2}
    mor = {(_surface(base + [_comp([], 0, 1)]), 0): Q.one}
    assert reduce_morphism(h, h, mor, Q) == {(frozenset(), 0): 1}


def test_single_crossings():
    cx = dd_of_tangle("x-", Q)
    assert cx.grading_multiset() == [("b", 2, 1), ("c", 1, 0)]
    cx = dd_of_tangle("x+", Q)
    assert cx.grading_multiset() == [("b", -2, -1), ("c", -1, 0)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_vertical_twists(n):
    cx = dd_of_tangle(f"twist(idv,v,{n})", Q)
    expected = [("c", n, 0)] + [("b", n + 2 * k - 1, k) for k in range(1, n + 1)]
    assert cx.grading_multiset() == sorted(expected)
    # arrow pattern: S, D, S^2, D, S^2, ...
    letters = sorted((cx.gen(s).h, next(iter(e.terms)).letter,
                      next(iter(e.terms)).power) for (s, t), e in cx.diff.items())
    want = [(0, "S", 1)] + [(k, "D", 1) if k % 2 == 1 else (k, "S", 2)
                            for k in range(1, n)]
    assert letters == sorted(want)


def test_mirror_of_twist():
    m = dd_of_tangle(f"twist(idv,v,-3)", Q)
    expected = dd_of_tangle("twist(idv,v,3)", Q).mirror()
    assert m.grading_multiset() == expected.grading_multiset()


def test_t23_fixture():
    cx = dd_of_tangle(T23, Q)
    assert len(cx) == 9
    assert cx.grading_multiset() == sorted([
        ("c", -12, -5), ("c", -10, -4), ("b", -9, -3), ("b", -7, -2),
        ("b", -11, -4), ("b", -9, -3), ("b", -7, -2), ("b", -5, -1),
        ("c", -4, 0)])
    assert cx.validate() == []


def test_t22_fixture():
    cx = dd_of_tangle("hadd(twist(idv,v,2), twist(idv,v,-2))", Q, loop_dirs=(-1,))
    assert cx.grading_multiset() == sorted([
        ("c", -9, -4), ("b", -8, -3), ("b", -6, -2),
        ("b", -6, -2), ("b", -4, -1), ("c", -3, 0)])


def test_raw_d_squared():
    for text in ["twist(idv,v,2)", "twist(idh,h,2)", T23]:
        raw = build_raw(parse_tangle(text), Q)
        assert raw.validate() == []


def test_face_signs():
    # every square of the cube carries an odd number of minus signs: the two
    # ways around each square cancel termwise
    raw = build_raw(parse_tangle("hadd(twist(idv,v,1), twist(idv,v,-2))"), Q)
    by_src = {}
    for (s, t), m in raw.diff.items():
        by_src.setdefault(s, []).append((t, m))
    squares = 0
    for o in raw.objects:
        targets = {}
        for y, m1 in by_src.get(o.id, ()):
            for z, m2 in by_src.get(y, ()):
                targets.setdefault(z, []).append((y, m1, m2))
        for z, ways in targets.items():
            if len(ways) == 2:
                squares += 1
                comp = {}
                for y, m1, m2 in ways:
                    c = compose_reduced(o.state, raw.object(y).state,
                                        raw.object(z).state, m2, m1, Q)
                    for k, v in c.items():
                        comp[k] = Q.add(comp.get(k, Q.zero), v)
                assert all(Q.is_zero(v) for v in comp.values())
    assert squares > 0


def random_expression(rng, max_crossings=6):
    n = rng.randint(1, max_crossings)

    def build(budget):
        if budget == 0:
            return rng.choice([IdH(), IdV()]), 0
        choice = rng.random()
        if choice < 0.35 or budget == 1:
            return Crossing(rng.choice("AB")), 1
        op = rng.choice([HAdd, VAdd])
        left_budget = rng.randint(0, budget)
        a, used_a = build(left_budget)
        b, used_b = build(budget - used_a)
        if op is HAdd:
            return HAdd(a, b), used_a + used_b
        return VAdd(a, b), used_a + used_b

    expr, _ = build(n)
    return expr


@pytest.mark.parametrize("field", [Q, F2, F3])
def test_random_expressions_validate(field):
    rng = random.Random(hash(field.name()) % 1000)
    for _ in range(12):
        expr = random_expression(rng, 5)
        cx = dd_of_tangle(expr, field, reduce=False)
        assert cx.validate() == []
        red = cx.reduce()
        assert red.validate() == []


def test_mirror_route_agreement():
    for text in ["twist(idv,v,2)", "x-", "hadd(twist(idv,v,1),twist(idv,v,-2))"]:
        e = parse_tangle(text)
        a = dd_of_tangle(mirror_expr(e), Q)
        b = dd_of_tangle(e, Q).mirror().reduce()
        assert a.grading_multiset() == b.grading_multiset()
