"""The path algebra of the two-vertex quiver with loops D and cross arrows S,
modulo DS = 0 = SD.

Vertices are named ``b`` (the horizontal crossingless tangle) and ``c`` (the
vertical one).  Every nonzero path is D^k or S^k together with a start vertex,
so basis paths are stored as (start, letter, power) triples; the relations are
built into this normal form.  Paths compose right to left.  The central
element H = D - S^2 has bigrading (q, h) = (-2, 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .fields import Field, FieldMismatch

IDEMS = ("b", "c")


def other(idem: str) -> str:
    return "c" if idem == "b" else "b"


class PathBasis(NamedTuple):
    start: str
    letter: str  # "i", "D" or "S"
    power: int

    @property
    def target(self) -> str:
        if self.letter == "S" and self.power % 2 == 1:
            return other(self.start)
        return self.start

    @property
    def grading(self) -> tuple[int, int]:
        # (q, h); gr(D^k) = (-2k, 0), gr(S^k) = (-k, 0), gr(i) = (0, 0)
        if self.letter == "D":
            return (-2 * self.power, 0)
        if self.letter == "S":
            return (-self.power, 0)
        return (0, 0)

    def __str__(self):
        if self.letter == "i":
            return f"i_{self.start}"
        if self.letter == "D":
            return f"D_{self.start}" + (f"^{self.power}" if self.power > 1 else "")
        return ("S" if self.power == 1 else f"S^{self.power}") + f"@{self.start}"


def idem_path(idem: str) -> PathBasis:
    return PathBasis(idem, "i", 0)


def parse_path(text: str) -> PathBasis:
    text = text.strip()
    if text.startswith("i_"):
        return PathBasis(text[2:], "i", 0)
    if text.startswith("D_"):
        rest = text[2:]
        if "^" in rest:
            v, p = rest.split("^")
            return PathBasis(v, "D", int(p))
        return PathBasis(rest, "D", 1)
    if text.startswith("S"):
        head, start = text.split("@")
        power = int(head[2:]) if head.startswith("S^") else 1
        return PathBasis(start, "S", power)
    raise ValueError(f"cannot parse basis path {text!r}")


def _mul_paths(a: PathBasis, b: PathBasis) -> PathBasis | None:
    """Compose a after b (a.b); None when the product is zero or incomposable."""
    if a.start != b.target:
        return None
    if b.letter == "i":
        return a
    if a.letter == "i":
        return b
    if a.letter != b.letter:  # DS = 0 = SD
        return None
    return PathBasis(b.start, a.letter, a.power + b.power)


class AlgebraElement:
    """A finite linear combination of basis paths over a fixed field."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms=None):
        self.field = field
        self.terms: dict[PathBasis, object] = {}
        if terms:
            for p, v in dict(terms).items():
                v = field.canon(v)
                if v:
                    self.terms[p] = v

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field):
        return cls(field)

    @classmethod
    def unit(cls, field, idem):
        return cls(field, {idem_path(idem): 1})

    @classmethod
    def path(cls, field, start, letter, power, coeff=1):
        if letter == "i" or power == 0:
            return cls(field, {idem_path(start): coeff})
        return cls(field, {PathBasis(start, letter, power): coeff})

    @classmethod
    def h(cls, field, idem):
        """H at the given vertex: D - S^2."""
        return cls(field, {PathBasis(idem, "D", 1): 1, PathBasis(idem, "S", 2): -1})

    # -- ring structure ------------------------------------------------------

    def _chk(self, o):
        if self.field is not o.field:
            raise FieldMismatch(f"{self.field} vs {o.field}")

    def __add__(self, o):
        self._chk(o)
        terms = dict(self.terms)
        F = self.field
        for p, v in o.terms.items():
            w = F.add(terms.get(p, F.zero), v)
            if w:
                terms[p] = w
            else:
                terms.pop(p, None)
        out = AlgebraElement(F)
        out.terms = terms
        return out

    def __sub__(self, o):
        return self + (-o)

    def __neg__(self):
        F = self.field
        out = AlgebraElement(F)
        out.terms = {p: F.neg(v) for p, v in self.terms.items()}
        return out

    def scale(self, c):
        F = self.field
        c = F.canon(c)
        out = AlgebraElement(F)
        if c:
            out.terms = {p: F.mul(v, c) for p, v in self.terms.items()}
        return out

    def __mul__(self, o):
        """Product self*o, i.e. composition self after o."""
        self._chk(o)
        F = self.field
        terms: dict[PathBasis, object] = {}
        for pa, va in self.terms.items():
            for pb, vb in o.terms.items():
                p = _mul_paths(pa, pb)
                if p is None:
                    continue
                w = F.add(terms.get(p, F.zero), F.mul(va, vb))
                if w:
                    terms[p] = w
                else:
                    terms.pop(p, None)
        out = AlgebraElement(F)
        out.terms = terms
        return out

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, o):
        return isinstance(o, AlgebraElement) and self.field is o.field and self.terms == o.terms

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    # -- structure ------------------------------------------------------------

    def idem_blocks(self):
        """Set of (start, target) idempotent pairs occurring in the element."""
        return {(p.start, p.target) for p in self.terms}

    def is_block(self) -> bool:
        return len(self.idem_blocks()) <= 1

    def gradings(self):
        return {p.grading for p in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.gradings()) <= 1 and self.is_block()

    def grading(self):
        gs = self.gradings()
        if len(gs) != 1:
            raise ValueError("element is not grading-homogeneous")
        return next(iter(gs))

    def unit_coefficient(self, idem):
        return self.terms.get(idem_path(idem), self.field.zero)

    def positive_part(self):
        out = AlgebraElement(self.field)
        out.terms = {p: v for p, v in self.terms.items() if p.letter != "i"}
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for p, v in sorted(self.terms.items()):
            bits.append(f"{v}*{p}" if v != self.field.one else str(p))
        return " + ".join(bits)


# -- k[H]-coordinates -----------------------------------------------------------


def kh_coords(a: AlgebraElement):
    """Coordinates of ``a`` in the k[H]-basis {i, D, S} per start vertex.

    Returns {(start, letter): {h_power: coeff}} using
    D^k = D*H^(k-1), S^(2k+1) = (-1)^k S*H^k, S^(2k) = (-1)^(k-1) (D*H^(k-1) - H^k i).
    """
    F = a.field
    out: dict[tuple[str, str], dict[int, object]] = {}

    def bump(start, letter, hpow, coeff):
        poly = out.setdefault((start, letter), {})
        w = F.add(poly.get(hpow, F.zero), coeff)
        if w:
            poly[hpow] = w
        else:
            poly.pop(hpow, None)
            if not poly:
                out.pop((start, letter))

    for p, v in a.terms.items():
        if p.letter == "i":
            bump(p.start, "i", 0, v)
        elif p.letter == "D":
            bump(p.start, "D", p.power - 1, v)
        elif p.power % 2 == 1:
            k = p.power // 2
            bump(p.start, "S", k, F.mul(v, F.of_int((-1) ** k)))
        else:
            k = p.power // 2
            sign = F.of_int((-1) ** (k - 1))
            bump(p.start, "D", k - 1, F.mul(v, sign))
            bump(p.start, "i", k, F.mul(v, F.neg(sign)))
    return out


def kh_expand(field: Field, coords) -> AlgebraElement:
    """Inverse of :func:`kh_coords`."""
    F = field
    total = AlgebraElement(F)
    for (start, letter), poly in coords.items():
        for k, coeff in poly.items():
            if letter == "i":
                # H^k at the vertex: D^k + (-1)^k S^(2k), or the unit for k = 0
                if k == 0:
                    t = AlgebraElement.unit(F, start)
                else:
                    t = AlgebraElement(F, {
                        PathBasis(start, "D", k): 1,
                        PathBasis(start, "S", 2 * k): (-1) ** k,
                    })
            elif letter == "D":
                t = AlgebraElement.path(F, start, "D", k + 1)
            else:
                t = AlgebraElement.path(F, start, "S", 2 * k + 1, (-1) ** k)
            total = total + t.scale(coeff)
    return total


def mutate(a: AlgebraElement, axis: str) -> AlgebraElement:
    """The mutation automorphism: flip the sign of the D loop at b (axis x),
    at c (axis y) or at both (axis z); S is fixed."""
    if axis not in ("x", "y", "z"):
        raise ValueError(f"bad mutation axis {axis!r}")
    flip = {"x": ("b",), "y": ("c",), "z": ("b", "c")}[axis]
    F = a.field
    out = AlgebraElement(F)
    for p, v in a.terms.items():
        if p.letter == "D" and p.start in flip and p.power % 2 == 1:
            v = F.neg(v)
        out.terms[p] = v
    return out


# -- face decomposition -----------------------------------------------------------

LEFT, MIDDLE, RIGHT = "left", "middle", "right"
FACE_SIZE = {LEFT: 1, MIDDLE: 2, RIGHT: 1}

# sides carry the face structure: the left face sees only s2(b), the middle
# face s1(b) and s2(c), the right face only s1(c)
SIDE_FACE = {"s1b": MIDDLE, "s2b": LEFT, "s1c": RIGHT, "s2c": MIDDLE}
ARC_OF_SIDE = {"s1b": "b", "s2b": "b", "s1c": "c", "s2c": "c"}


class NotAFacePath(Exception):
    pass


@dataclass(frozen=True)
class FaceAddress:
    face: str
    side: str  # start side
    length: int

    @property
    def end_side(self) -> str:
        if self.face != MIDDLE or self.length % 2 == 0:
            return self.side
        return "s2c" if self.side == "s1b" else "s1b"


def face_address(p: PathBasis) -> FaceAddress:
    """Where a basis path lives in the face decomposition of the algebra."""
    if p.letter == "i":
        raise NotAFacePath("idempotents are not face paths")
    if p.letter == "D":
        if p.start == "b":
            return FaceAddress(LEFT, "s2b", p.power)
        return FaceAddress(RIGHT, "s1c", p.power)
    side = "s1b" if p.start == "b" else "s2c"
    return FaceAddress(MIDDLE, side, p.power)


def side_of_generator(idem: str, which: int) -> str:
    """Sides on which a generator in the given idempotent has dots (which = 1, 2)."""
    return f"s{which}{idem}"


def path_from_address(field, addr: FaceAddress, coeff=1) -> AlgebraElement:
    if addr.face == LEFT:
        return AlgebraElement.path(field, "b", "D", addr.length, coeff)
    if addr.face == RIGHT:
        return AlgebraElement.path(field, "c", "D", addr.length, coeff)
    start = "b" if addr.side == "s1b" else "c"
    return AlgebraElement.path(field, start, "S", addr.length, coeff)
