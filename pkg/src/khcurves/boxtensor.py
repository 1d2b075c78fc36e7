"""Type AD bimodules over the quiver algebra and the box tensor product.

Works in characteristic 2 only.  An AD bimodule has finitely many generators,
each with a left idempotent (matched against complex generators), a right
idempotent over the output algebra, and a bigrading contribution.  Actions
consume a sequence of differential-entry monomials along a path of the
complex and emit one output algebra element.

Two input conventions appear: actions of the twisting bimodule match entries
through their k[H]-coordinates (families i*H^k, D*H^k, S*H^k), while the
stabilization bimodule used for infinite twisting matches plain basis paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .algebra import AlgebraElement, kh_coords
from .complexes import ComplexOverB, Generator


class BoxTensorError(Exception):
    pass


class UnsupportedCharacteristic(BoxTensorError):
    pass


class NotOperationallyBounded(BoxTensorError):
    pass


@dataclass(frozen=True)
class ADGen:
    id: str
    left: str       # idempotent matched against the complex
    right: str      # idempotent of the output algebra
    q: int
    h: int


@dataclass(frozen=True)
class Action:
    """A family of actions: ``pattern`` is a tuple of items, each either
    ("kh", letter, min_power) matching a k[H]-coordinate monomial with free
    power k >= min_power, or ("path", letter, power) matching one basis path
    exactly.  ``output`` receives the tuple of free powers."""

    src: str
    tgt: str
    pattern: tuple
    output: Callable


@dataclass(frozen=True)
class ADBimodule:
    name: str
    gens: tuple
    actions: tuple

    def gen(self, gid):
        return next(g for g in self.gens if g.id == gid)


def _entry_monomials(entry: AlgebraElement):
    """Monomials of an entry in both conventions: returns (kh, paths) where
    kh maps (letter, k) -> coeff and paths maps (letter, power) -> coeff."""
    kh = {}
    for (start, letter), poly in kh_coords(entry).items():
        for k, c in poly.items():
            kh[(letter, k)] = c
    paths = {(p.letter, p.power): c for p, c in entry.terms.items()}
    return kh, paths


def _assert_dag(cx: ComplexOverB):
    for (s, t) in cx.diff:
        if cx.gen(t).h != cx.gen(s).h + 1:
            raise NotOperationallyBounded(
                "complex differential does not raise h by one; "
                "paths against unbounded action families may not terminate")


def box_tensor(cx: ComplexOverB, mod: ADBimodule) -> ComplexOverB:
    """The box tensor product of a complex with an AD bimodule whose output
    algebra is again the quiver algebra."""
    if cx.field.char != 2:
        raise UnsupportedCharacteristic("box tensor products require characteristic 2")
    _assert_dag(cx)
    F = cx.field
    gens = []
    for x in cx.gens:
        for m in mod.gens:
            if m.left == x.idem:
                gens.append(Generator(f"{x.id}*{m.id}", m.right,
                                      x.q + m.q, x.h + m.h))
    out: dict = {}
    arrows_from = {}
    for (s, t), e in cx.diff.items():
        arrows_from.setdefault(s, []).append((t, _entry_monomials(e)))

    def add(src_id, tgt_id, elem):
        if not elem:
            return
        key = (src_id, tgt_id)
        cur = out.get(key)
        new = cur + elem if cur is not None else elem
        if new:
            out[key] = new
        else:
            out.pop(key, None)

    for x in cx.gens:
        for act in mod.actions:
            m = mod.gen(act.src)
            if m.left != x.idem:
                continue
            # walk all paths from x matching the pattern
            stack = [(x.id, 0, (), F.one)]
            while stack:
                node, i, powers, coeff = stack.pop()
                if i == len(act.pattern):
                    elem = act.output(powers)
                    if elem:
                        add(f"{x.id}*{act.src}", f"{node}*{act.tgt}",
                            elem.scale(coeff))
                    continue
                item = act.pattern[i]
                for t, (kh, paths) in arrows_from.get(node, ()):
                    if item[0] == "kh":
                        _, letter, min_k = item
                        for (lt, k), c in kh.items():
                            if lt == letter and k >= min_k:
                                stack.append((t, i + 1, powers + (k,),
                                              F.mul(coeff, c)))
                    else:
                        _, letter, power = item
                        c = paths.get((letter, power))
                        if c is not None:
                            stack.append((t, i + 1, powers, F.mul(coeff, c)))
    return ComplexOverB(F, gens, out)


# -- the east half twist ------------------------------------------------------------


def tau_bimodule(field, crossing_sign: int) -> ADBimodule:
    """The AD bimodule adding one crossing at the two east tangle ends.

    ``crossing_sign`` fixes the absolute grading: (n+, n-) = (1, 0) for a
    positive crossing, (0, 1) for a negative one.
    """
    np_, nm = (1, 0) if crossing_sign > 0 else (0, 1)
    dq, dh = np_ - 2 * nm, -nm
    F = field
    gens = (
        ADGen("bb", "b", "b", 0 + dq, 0 + dh),
        ADGen("bc", "b", "c", 1 + dq, 1 + dh),
        ADGen("cc", "c", "c", 2 + dq, 1 + dh),
    )

    def S_at(v):
        return lambda ks: AlgebraElement.path(F, v, "S", 1)

    def D_hk(v):
        def f(ks):
            return (AlgebraElement.path(F, v, "D", 1) *
                    _hpow(F, v, ks[0]))
        return f

    def H_k(v):
        return lambda ks: _hpow(F, v, ks[0])

    def S_hk(v, extra=0):
        def f(ks):
            return AlgebraElement.path(F, v, "S", 1) * _hpow(F, v, ks[0] + extra)
        return f

    def S_h_sum(v):
        def f(ks):
            return AlgebraElement.path(F, v, "S", 1) * _hpow(F, v, ks[0] + ks[1])
        return f

    def SS_hk(v):
        def f(ks):
            return (AlgebraElement.path(F, v, "S", 2) * _hpow(F, v, ks[0]))
        return f

    # multi-input families are written innermost first, matching right-to-left
    # composition of the algebra: the pattern lists the arrow consumed first
    actions = (
        # from bb
        Action("bb", "bc", (), S_at("b")),
        Action("bb", "bb", (("kh", "D", 0),), D_hk("b")),
        Action("bb", "bb", (("kh", "i", 1),), H_k("b")),
        # from bc
        Action("bc", "bb", (("kh", "S", 0), ("kh", "S", 0)), S_h_sum("c")),
        Action("bc", "cc", (("kh", "S", 0),), D_hk("c")),
        Action("bc", "bc", (("kh", "i", 1),), H_k("c")),
        # from cc
        Action("cc", "bb", (("kh", "D", 0), ("kh", "S", 0)), S_h_sum("c")),
        Action("cc", "bc", (("kh", "S", 0),), H_k("c")),
        Action("cc", "cc", (("kh", "i", 1),), H_k("c")),
        Action("cc", "cc", (("kh", "D", 0),), SS_hk("c")),
    )
    return ADBimodule("tau", gens, actions)


def _hpow(field, idem, n) -> AlgebraElement:
    h = AlgebraElement.h(field, idem)
    out = AlgebraElement.unit(field, idem)
    for _ in range(n):
        out = h * out
    return out


def box_tau(cx: ComplexOverB, direction: int = 1, crossing_sign=None) -> ComplexOverB:
    """Add an east half twist to a complex: direction +1 appends the crossing
    whose 0-resolution is horizontal, -1 its mirror (obtained by conjugating
    with the mirror functor).  ``crossing_sign`` defaults to the direction."""
    if crossing_sign is None:
        crossing_sign = direction
    if direction == 1:
        out = box_tensor(cx, tau_bimodule(cx.field, crossing_sign))
        problems = out.validate()
        if problems:
            raise BoxTensorError("twisted complex invalid: " + "; ".join(problems[:3]))
        return out
    return box_tau(cx.mirror(), 1, -crossing_sign).mirror()
