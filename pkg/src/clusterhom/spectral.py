"""Pages E0 and E1 of the word-area filtration.

The filtration level of a monomial is its weight.  The window quotient splits
as a direct sum over (level, class exponent, degree) for the weight-preserving
part ``d0`` of ``d``, so E1 is computed block by block.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .algebra import GradedAlgebra, Monomial, Window, enumerate_monomials
from .complex import ComplexSpec, _widen, d_monomial, is_morse_term
from .linalg import rank


def filtration_level(m: Monomial, alg: GradedAlgebra) -> Fraction:
    return alg.weight(m)


@dataclass
class PageReport:
    r: int
    dims: dict                      # (level, degree) -> dimension
    d_ranks: dict = field(default_factory=dict)   # (level, degree) -> rank of d_r out of it

    def total(self, degree) -> int:
        return sum(v for (lv, dg), v in self.dims.items() if dg == degree)

    def levels(self):
        return sorted({lv for lv, _ in self.dims})


def d0_monomial(s: ComplexSpec, m: Monomial):
    """Weight-preserving part of d(m)."""
    alg = s.alg
    wm = alg.weight(m)
    return {mm: c for mm, c in d_monomial(s, m).terms.items() if alg.weight(mm) == wm}


def pages(s: ComplexSpec, w: Optional[Window] = None, module=None):
    w = w or s.window
    req = _widen(w, s.basis, 0, 0, 0)
    mons = enumerate_monomials(s.alg, req, module=module)
    alg = s.alg
    blocks: dict = {}
    for deg, ms in mons.items():
        for m in ms:
            blocks.setdefault((alg.weight(m), m.exp, deg), []).append(m)
    index = {k: {m: j for j, m in enumerate(sorted(v))} for k, v in blocks.items()}
    ranks: dict = {}
    for (lv, lam, deg), idx in index.items():
        tgt = index.get((lv, lam, deg - 1), {})
        cols = []
        for m in idx:
            col = {}
            for mm, c in d0_monomial(s, m).items():
                col[tgt[mm]] = c
            cols.append(col)
        ranks[(lv, lam, deg)] = rank(cols)
    e0, e1, r0 = {}, {}, {}
    for (lv, lam, deg), idx in index.items():
        n = len(idx)
        ker = n - ranks[(lv, lam, deg)]
        im = ranks.get((lv, lam, deg + 1), 0)
        key = (lv, deg)
        e0[key] = e0.get(key, 0) + n
        e1[key] = e1.get(key, 0) + ker - im
        r0[key] = r0.get(key, 0) + ranks[(lv, lam, deg)]
    return PageReport(0, e0, r0), PageReport(1, e1)


def filtration_violations(s: ComplexSpec) -> list:
    """Generators where d0 changes the weight or d - d0 fails to raise it."""
    alg = s.alg
    bad = []
    for i, dx in s.diff.items():
        wx = alg.length[i]
        for m in dx.terms:
            wt = alg.weight(m)
            morse = is_morse_term(alg, m)
            if morse and wt != wx or not morse and wt <= wx:
                bad.append((alg.generators[i].name, m))
    return bad


def preserves_filtration(phi: Mapping, src: ComplexSpec) -> bool:
    """filtration_level(phi(x)) >= filtration_level(x) for every generator."""
    for key, val in phi.items():
        i = src.alg.pos(key) if isinstance(key, str) else int(key)
        if val and val.min_weight() < src.alg.length[i]:
            return False
    return True
