"""Externally computed reduced Khovanov type D structures used as fixtures.

The torus-knot structures below were obtained with Seed's knotkit (via the
Bar-Natan spectral sequence); gradings are (q, h) with the single free
summand of a knot in homological grading 0.
"""

from __future__ import annotations

from .complexes import KHComplex, KHGenerator
from .fields import field_make


def _kh_complex(field, gens, arrows):
    """gens: list of (q, h); arrows: list of (src_index, tgt_index, h_power)."""
    gs = [KHGenerator(f"g{i}", q, h) for i, (q, h) in enumerate(gens)]
    diff = {(f"g{s}", f"g{t}"): (hp, 1) for s, t, hp in arrows}
    return KHComplex(field, gs, diff)


def kh_unknot(field) -> KHComplex:
    return _kh_complex(field, [(0, 0)], [])


def kh_trefoil(field) -> KHComplex:
    """Right-handed trefoil: free summand at q = 2 plus one H-torsion pair."""
    return _kh_complex(field, [(2, 0), (6, 2), (8, 3)], [(1, 2, 1)])


def kh_t45(field) -> KHComplex:
    """The (4,5)-torus knot; the answer depends on the characteristic."""
    field = field_make(field)
    if field.char == 2:
        gens = [(12, 0), (16, 2), (18, 3), (18, 4), (22, 5), (20, 6), (22, 6),
                (22, 7), (24, 7), (24, 8), (26, 9), (28, 9), (28, 10)]
        arrows = [(1, 2, 1), (3, 4, 2), (9, 11, 2), (5, 7, 1), (6, 8, 1), (10, 12, 1)]
    else:
        gens = [(12, 0), (16, 2), (18, 3), (18, 4), (22, 5), (20, 6), (24, 7),
                (24, 8), (26, 9)]
        arrows = [(1, 2, 1), (7, 8, 1), (3, 4, 2), (5, 6, 2)]
    qh = [(q, h) for q, h in gens]
    return _kh_complex(field, qh, arrows)
