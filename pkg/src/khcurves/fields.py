"""Exact coefficient arithmetic: GF(2), GF(p) for small primes, and the rationals.

Raw scalar values are plain python objects (int residues for prime fields,
Fraction for the rationals), always kept in canonical form: residues in
[0, p), fractions reduced with positive denominator.  Field objects supply
the arithmetic; they are stateless and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class CoefficientError(Exception):
    pass


class CompositeModulus(CoefficientError):
    pass


class DivisionByZero(CoefficientError):
    pass


class FieldMismatch(CoefficientError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """A coefficient field.  Instances are interned per (kind, char)."""

    __slots__ = ("kind", "char")
    _cache: dict = {}

    def __new__(cls, kind: str, char: int):
        key = (kind, char)
        inst = cls._cache.get(key)
        if inst is None:
            inst = super().__new__(cls)
            object.__setattr__(inst, "kind", kind)
            object.__setattr__(inst, "char", char)
            cls._cache[key] = inst
        return inst

    def __setattr__(self, *a):
        raise AttributeError("Field is immutable")

    def __repr__(self):
        return self.name()

    def name(self) -> str:
        if self.kind == "Q":
            return "Q"
        return f"F{self.char}"

    def __reduce__(self):
        return (Field, (self.kind, self.char))

    # -- raw-value arithmetic ------------------------------------------------

    @property
    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def canon(self, v):
        if self.kind == "Q":
            return Fraction(v)
        return v % self.char

    def of_int(self, n: int):
        return Fraction(n) if self.kind == "Q" else n % self.char

    def add(self, a, b):
        if self.kind == "Q":
            return a + b
        return (a + b) % self.char

    def sub(self, a, b):
        if self.kind == "Q":
            return a - b
        return (a - b) % self.char

    def mul(self, a, b):
        if self.kind == "Q":
            return a * b
        return (a * b) % self.char

    def neg(self, a):
        if self.kind == "Q":
            return -a
        return (-a) % self.char

    def inv(self, a):
        if not a:
            raise DivisionByZero(f"inverse of 0 in {self.name()}")
        if self.kind == "Q":
            return 1 / a
        return pow(a, -1, self.char)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return not a

    # -- parsing / formatting --------------------------------------------------

    def format(self, v) -> str:
        return str(v)

    def parse(self, s: str):
        if self.kind == "Q":
            return Fraction(s)
        return int(s) % self.char


F2 = Field("Fp", 2)
QQ = Field("Q", 0)


def field_make(spec) -> Field:
    """Build a field from a descriptor: "F2" / "F<p>" / "Q", or an int prime, or a Field."""
    if isinstance(spec, Field):
        return spec
    if isinstance(spec, int):
        if not _is_prime(spec):
            raise CompositeModulus(f"{spec} is not prime")
        if spec >= 2**31:
            raise CompositeModulus(f"modulus {spec} too large")
        return Field("Fp", spec)
    s = str(spec).strip()
    if s in ("Q", "QQ", "0"):
        return QQ
    if s.startswith("F"):
        return field_make(int(s[1:]))
    raise CoefficientError(f"unknown field spec {spec!r}")


@dataclass(frozen=True)
class Scalar:
    """A field element in canonical form."""

    field: Field
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.field.canon(self.value))

    def _chk(self, other: "Scalar"):
        if self.field is not other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._chk(other)
        return Scalar(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other):
        self._chk(other)
        return Scalar(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other):
        self._chk(other)
        return Scalar(self.field, self.field.mul(self.value, other.value))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def inverse(self):
        return Scalar(self.field, self.field.inv(self.value))

    def __bool__(self):
        return not self.field.is_zero(self.value)

    def __repr__(self):
        return f"{self.value}"


def scalar_arith(op: str, a: Scalar, b: Scalar | None = None) -> Scalar:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise CoefficientError(f"unknown op {op!r}")
