"""Bigraded complexes (type D structures) over the quiver algebra.

A complex is a list of generators, each with an idempotent and a (q, h)
bigrading, together with a sparse differential whose entries are algebra
elements.  Every entry from x to y must satisfy the grading law
q(y) - q(x) + q(entry) = 0, h(y) - h(x) = 1, and d^2 = 0 as a matrix
identity.  All operations return new complexes; nothing is mutated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .algebra import AlgebraElement, idem_path, other
from .fields import Field, field_make


class ComplexError(Exception):
    pass


class NotCancellable(ComplexError):
    pass


class InvalidHomotopy(ComplexError):
    pass


class Generator(NamedTuple):
    id: str
    idem: str
    q: int
    h: int

    @property
    def delta(self):
        return self.q / 2 - self.h


class ComplexOverB:
    __slots__ = ("field", "gens", "diff", "_by_id")

    def __init__(self, field: Field, gens: Iterable[Generator], diff=None):
        self.field = field
        self.gens: tuple[Generator, ...] = tuple(gens)
        self._by_id = {g.id: g for g in self.gens}
        if len(self._by_id) != len(self.gens):
            raise ComplexError("duplicate generator ids")
        self.diff: dict[tuple[str, str], AlgebraElement] = {}
        if diff:
            for k, v in diff.items():
                if v:
                    self.diff[k] = v

    def gen(self, gid: str) -> Generator:
        return self._by_id[gid]

    def entry(self, src: str, tgt: str) -> AlgebraElement:
        return self.diff.get((src, tgt), AlgebraElement.zero(self.field))

    def arrows_from(self, src: str):
        return [(t, e) for (s, t), e in self.diff.items() if s == src]

    def arrows_into(self, tgt: str):
        return [(s, e) for (s, t), e in self.diff.items() if t == tgt]

    def grading_multiset(self):
        return sorted((g.idem, g.q, g.h) for g in self.gens)

    def __len__(self):
        return len(self.gens)

    def __repr__(self):
        lines = [f"ComplexOverB({self.field}, {len(self.gens)} generators)"]
        for g in self.gens:
            lines.append(f"  {g.id}: {g.idem} (q={g.q}, h={g.h})")
        for (s, t), e in sorted(self.diff.items()):
            lines.append(f"  {s} -> {t}: {e}")
        return "\n".join(lines)

    # -- validation --------------------------------------------------------

    def validate(self) -> list[str]:
        """All failures of idempotent compatibility, the grading law and d^2 = 0."""
        problems = []
        by_id = self._by_id
        for (s, t), e in self.diff.items():
            if s not in by_id or t not in by_id:
                problems.append(f"entry {s}->{t} references unknown generator")
                continue
            x, y = by_id[s], by_id[t]
            for p in e.terms:
                if p.start != x.idem or p.target != y.idem:
                    problems.append(f"entry {s}->{t}: term {p} violates idempotents")
            if not e.is_homogeneous():
                problems.append(f"entry {s}->{t} is not grading-homogeneous: {e}")
                continue
            qa, ha = e.grading()
            if y.q - x.q + qa != 0:
                problems.append(f"entry {s}->{t} breaks the quantum grading law")
            if y.h - x.h + ha != 1:
                problems.append(f"entry {s}->{t} breaks the homological grading law")
        # d^2 = 0
        by_src: dict[str, list[tuple[str, AlgebraElement]]] = {}
        for (s, t), e in self.diff.items():
            by_src.setdefault(s, []).append((t, e))
        for x in self.gens:
            acc: dict[str, AlgebraElement] = {}
            for y, e1 in by_src.get(x.id, ()):
                for z, e2 in by_src.get(y, ()):
                    prod = e2 * e1
                    if prod:
                        acc[z] = acc[z] + prod if z in acc else prod
            for z, val in acc.items():
                if val:
                    problems.append(f"d^2 != 0 from {x.id} to {z}: {val}")
        return problems

    def is_valid(self) -> bool:
        return not self.validate()

    def assert_valid(self):
        problems = self.validate()
        if problems:
            raise ComplexError("; ".join(problems[:4]))
        return self

    # -- basic transformations -----------------------------------------------

    def relabel(self, fn) -> "ComplexOverB":
        gens = [Generator(fn(g.id), g.idem, g.q, g.h) for g in self.gens]
        diff = {(fn(s), fn(t)): e for (s, t), e in self.diff.items()}
        return ComplexOverB(self.field, gens, diff)

    def shift(self, dq: int, dh: int) -> "ComplexOverB":
        """Shift gradings; the differential picks up (-1)^dh."""
        gens = [Generator(g.id, g.idem, g.q + dq, g.h + dh) for g in self.gens]
        sign = self.field.of_int(-1 if dh % 2 else 1)
        diff = {k: e.scale(sign) for k, e in self.diff.items()}
        return ComplexOverB(self.field, gens, diff)

    def mirror(self) -> "ComplexOverB":
        """Reverse all arrows, exchange the two S letters, negate gradings."""
        gens = [Generator(g.id, g.idem, -g.q, -g.h) for g in self.gens]
        diff = {}
        for (s, t), e in self.diff.items():
            out = AlgebraElement(self.field)
            for p, v in e.terms.items():
                out.terms[type(p)(p.target, p.letter, p.power)] = v
            diff[(t, s)] = out
        return ComplexOverB(self.field, gens, diff)

    def direct_sum(self, othr: "ComplexOverB", tags=("A", "B")) -> "ComplexOverB":
        a = self.relabel(lambda i: f"{tags[0]}.{i}")
        b = othr.relabel(lambda i: f"{tags[1]}.{i}")
        return ComplexOverB(self.field, a.gens + b.gens, {**a.diff, **b.diff})

    def map_entries(self, fn) -> "ComplexOverB":
        return ComplexOverB(self.field, self.gens,
                            {k: fn(e) for k, e in self.diff.items()})

    # -- cancellation and clean-up ------------------------------------------------

    def cancel(self, src: str, tgt: str) -> "ComplexOverB":
        """Gaussian cancellation of an invertible identity entry src -> tgt."""
        e = self.diff.get((src, tgt))
        if e is None:
            raise NotCancellable(f"no entry {src} -> {tgt}")
        lam = e.unit_coefficient(self.gen(src).idem)
        if self.field.is_zero(lam) or e.positive_part():
            raise NotCancellable(f"entry {src} -> {tgt} is not an invertible identity: {e}")
        ginv = AlgebraElement.unit(self.field, self.gen(src).idem).scale(self.field.inv(lam))
        into_tgt = [(v, ev) for (v, t2), ev in self.diff.items() if t2 == tgt and v not in (src, tgt)]
        from_src = [(w, ew) for (s2, w), ew in self.diff.items() if s2 == src and w not in (src, tgt)]
        gens = [g for g in self.gens if g.id not in (src, tgt)]
        diff = {k: e2 for k, e2 in self.diff.items() if src not in k and tgt not in k}
        for v, ev in into_tgt:
            for w, ew in from_src:
                corr = ew * (ginv * ev)
                if not corr:
                    continue
                cur = diff.get((v, w))
                new = (cur - corr) if cur is not None else -corr
                if new:
                    diff[(v, w)] = new
                else:
                    diff.pop((v, w), None)
        return ComplexOverB(self.field, gens, diff)

    def cleanup(self, hmap: dict[tuple[str, str], AlgebraElement]) -> "ComplexOverB":
        """Base change by a square-zero homotopy h: new differential d + dh - hd."""
        by_id = self._by_id
        for (s, t), e in hmap.items():
            x, y = by_id[s], by_id[t]
            if not e.is_homogeneous():
                raise InvalidHomotopy(f"h entry {s}->{t} inhomogeneous")
            qa, ha = e.grading()
            if y.q - x.q + qa != 0 or y.h - x.h != 0:
                raise InvalidHomotopy(f"h entry {s}->{t} is not bidegree (0,0)")

        def compose(m1, m2):
            # matrix product (m1 after m2), both keyed (src, tgt)
            out: dict[tuple[str, str], AlgebraElement] = {}
            by_src1 = {}
            for (s, t), e in m1.items():
                by_src1.setdefault(s, []).append((t, e))
            for (s, t), e2 in m2.items():
                for (t2, e1) in by_src1.get(t, ()):
                    prod = e1 * e2
                    if not prod:
                        continue
                    k = (s, t2)
                    out[k] = out[k] + prod if k in out else prod
            return {k: v for k, v in out.items() if v}

        hh = compose(hmap, hmap)
        if any(v for v in hh.values()):
            raise InvalidHomotopy("h^2 != 0")
        hdh = compose(hmap, compose(self.diff, hmap))
        if any(v for v in hdh.values()):
            raise InvalidHomotopy("h d h != 0")
        dh = compose(self.diff, hmap)
        hd = compose(hmap, self.diff)
        diff = dict(self.diff)
        for k, v in dh.items():
            diff[k] = diff[k] + v if k in diff else v
        for k, v in hd.items():
            diff[k] = diff[k] - v if k in diff else -v
        diff = {k: v for k, v in diff.items() if v}
        return ComplexOverB(self.field, self.gens, diff)

    def reduce(self) -> "ComplexOverB":
        """Cancel invertible identity entries until none remain.

        Deterministic: always cancels the entry whose source has the lowest
        (h, q, position) among current candidates.  Works on one mutable copy
        with incremental adjacency updates.
        """
        F = self.field
        order = {g.id: (g.h, g.q, i) for i, g in enumerate(self.gens)}
        alive = {g.id: g for g in self.gens}
        out_adj: dict[str, dict[str, AlgebraElement]] = {g.id: {} for g in self.gens}
        in_adj: dict[str, dict[str, AlgebraElement]] = {g.id: {} for g in self.gens}
        for (s, t), e in self.diff.items():
            out_adj[s][t] = e
            in_adj[t][s] = e

        def is_unit_entry(s, t, e):
            lam = e.unit_coefficient(alive[s].idem)
            return not F.is_zero(lam) and not e.positive_part()

        candidates = {(s, t) for (s, t), e in self.diff.items()
                      if is_unit_entry(s, t, e)}
        while candidates:
            src, tgt = min(candidates, key=lambda k: (order[k[0]], order[k[1]]))
            e = out_adj[src][tgt]
            lam = e.unit_coefficient(alive[src].idem)
            ginv = AlgebraElement.unit(F, alive[src].idem).scale(F.inv(lam))
            into_tgt = [(v, ev) for v, ev in in_adj[tgt].items() if v not in (src, tgt)]
            from_src = [(w, ew) for w, ew in out_adj[src].items() if w not in (src, tgt)]
            # drop the two generators and all their entries
            for gid in (src, tgt):
                for w in list(out_adj[gid]):
                    in_adj[w].pop(gid, None)
                    candidates.discard((gid, w))
                for v in list(in_adj[gid]):
                    out_adj[v].pop(gid, None)
                    candidates.discard((v, gid))
                out_adj.pop(gid)
                in_adj.pop(gid)
                alive.pop(gid)
            for v, ev in into_tgt:
                gc = ginv * ev
                for w, ew in from_src:
                    corr = ew * gc
                    if not corr:
                        continue
                    cur = out_adj[v].get(w)
                    new = (cur - corr) if cur is not None else -corr
                    if new:
                        out_adj[v][w] = new
                        in_adj[w][v] = new
                        if is_unit_entry(v, w, new):
                            candidates.add((v, w))
                        else:
                            candidates.discard((v, w))
                    else:
                        out_adj[v].pop(w, None)
                        in_adj[w].pop(v, None)
                        candidates.discard((v, w))
        gens = [g for g in self.gens if g.id in alive]
        diff = {(s, t): e for s, row in out_adj.items() for t, e in row.items()}
        return ComplexOverB(F, gens, diff)

    def is_reduced(self) -> bool:
        return all(e.positive_part() == e for e in self.diff.values()) and all(
            self.field.is_zero(e.unit_coefficient(self.gen(s).idem)) for (s, t), e in self.diff.items()
        )

    # -- cones -----------------------------------------------------------------

    def cone_hn(self, n: int) -> "ComplexOverB":
        """Mapping cone of H^n id from the copy shifted by (q-n, h-1) to the
        copy shifted by (q+n, h)."""
        if n < 1:
            raise ComplexError("cone power must be >= 1")
        a = self.shift(-n, -1).relabel(lambda i: f"{i}'")
        b = self.shift(+n, 0)
        gens = a.gens + b.gens
        diff = {**a.diff, **b.diff}
        F = self.field
        for g in self.gens:
            hn = _h_power(F, g.idem, n)
            diff[(f"{g.id}'", g.id)] = hn
        return ComplexOverB(F, gens, diff)

    def cone_kh_four_term(self) -> "ComplexOverB":
        """The four-term unreduced cone: two H id arrows and one 2 id arrow.

        Copies sit at shifts (q-2,h-1), (q,h), (q,h-1), (q+2,h); the 2 id arrow
        connects the middle two.
        """
        F = self.field
        p1 = self.shift(-2, -1).relabel(lambda i: f"{i}.1")
        p2 = self.shift(0, 0).relabel(lambda i: f"{i}.2")
        p3 = self.shift(0, -1).relabel(lambda i: f"{i}.3")
        p4 = self.shift(+2, 0).relabel(lambda i: f"{i}.4")
        gens = p1.gens + p2.gens + p3.gens + p4.gens
        diff = {**p1.diff, **p2.diff, **p3.diff, **p4.diff}
        for g in self.gens:
            h1 = _h_power(F, g.idem, 1)
            diff[(f"{g.id}.1", f"{g.id}.2")] = h1
            diff[(f"{g.id}.3", f"{g.id}.4")] = h1
            two = AlgebraElement.unit(F, g.idem).scale(F.of_int(2))
            if two:
                diff[(f"{g.id}.3", f"{g.id}.2")] = two
        return ComplexOverB(F, gens, diff)

    def cone(self, variant) -> "ComplexOverB":
        if variant == "KhFourTerm":
            return self.cone_kh_four_term()
        return self.cone_hn(int(variant))


def _h_power(field, idem, n) -> AlgebraElement:
    h = AlgebraElement.h(field, idem)
    out = AlgebraElement.unit(field, idem)
    for _ in range(n):
        out = h * out
    return out


def trivial_complex(field, idem: str, q=0, h=0, gid="g0") -> ComplexOverB:
    return ComplexOverB(field, [Generator(gid, idem, q, h)])


# -- complexes over k[H] ------------------------------------------------------------


@dataclass(frozen=True)
class KHGenerator:
    id: str
    q: int
    h: int


class KHComplex:
    """A bigraded complex over the one-idempotent algebra k[H], gr(H) = (-2, 0).

    Differential entries are monomials c*H^k, stored as (k, c) pairs.
    """

    def __init__(self, field, gens, diff=None):
        self.field = field_make(field)
        self.gens = tuple(gens)
        self.diff: dict[tuple[str, str], tuple[int, object]] = {}
        if diff:
            for k, (hp, c) in diff.items():
                c = self.field.canon(c)
                if c:
                    self.diff[k] = (hp, c)

    def validate(self) -> list[str]:
        problems = []
        by_id = {g.id: g for g in self.gens}
        for (s, t), (hp, c) in self.diff.items():
            x, y = by_id[s], by_id[t]
            if y.q - x.q - 2 * hp != 0:
                problems.append(f"entry {s}->{t} breaks the quantum grading law")
            if y.h - x.h != 1:
                problems.append(f"entry {s}->{t} breaks the homological grading law")
        by_src: dict[str, list] = {}
        for (s, t), v in self.diff.items():
            by_src.setdefault(s, []).append((t, v))
        for g in self.gens:
            acc: dict[str, dict[int, object]] = {}
            for y, (h1, c1) in by_src.get(g.id, ()):
                for z, (h2, c2) in by_src.get(y, ()):
                    poly = acc.setdefault(z, {})
                    w = self.field.add(poly.get(h1 + h2, self.field.zero), self.field.mul(c1, c2))
                    poly[h1 + h2] = w
            for z, poly in acc.items():
                if any(v for v in poly.values()):
                    problems.append(f"d^2 != 0 from {g.id} to {z}")
        return problems

    def embed(self) -> ComplexOverB:
        """Embed into complexes over the quiver algebra, 1 -> c and H -> H at c."""
        gens = [Generator(g.id, "c", g.q, g.h) for g in self.gens]
        diff = {}
        for (s, t), (hp, c) in self.diff.items():
            diff[(s, t)] = _h_power(self.field, "c", hp).scale(c)
        out = ComplexOverB(self.field, gens, diff)
        out.assert_valid()
        return out


def embed_from_kh(k: KHComplex) -> ComplexOverB:
    return k.embed()
