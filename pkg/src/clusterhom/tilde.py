"""The module SV ⊗ V with one marked factor and the map alpha.

A marked generator ``v`` is stored as a module generator ``v_bar`` of the same
degree, always placed last in a monomial.  ``alpha`` sends a word to the sum
over its factors of (word without that factor) times the factor's bar, with
the Koszul sign of moving the factor to the end.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

from .algebra import Element, GradedAlgebra, Generator, Monomial, Window, multiply, truncate
from .complex import ComplexSpec, HomologyReport, apply_d, check_window, homology, CheckReport
from .errors import SpecError

BAR_SUFFIX = "_bar"


def bar_name(name: str) -> str:
    return name + BAR_SUFFIX


def tilde_algebra(alg: GradedAlgebra) -> GradedAlgebra:
    if alg.has_module:
        raise SpecError("the tilde module is built over a cluster spec without module generators")
    bars = [Generator(bar_name(g.name), g.morse_index, "bar") for g in alg.generators]
    return GradedAlgebra(list(alg.generators) + bars, alg.basis)


def _bar_pos(T: GradedAlgebra, base: GradedAlgebra, i: int) -> int:
    return base.n_ring + i


def alpha(a: Element, T: GradedAlgebra) -> Element:
    """Explicit formula: sum_i (-1)^{sigma_i} x_1..^x_i..x_k xbar_i."""
    base = a.alg
    out: dict = {}
    for m, c in a.terms.items():
        fac = m.factors
        # total degree of factors strictly after position k
        after = [Fraction(0)] * len(fac)
        acc = Fraction(0)
        for k in range(len(fac) - 1, -1, -1):
            after[k] = acc
            acc += fac[k][1] * base.deg[fac[k][0]]
        for k, (i, p) in enumerate(fac):
            # moving the last copy of x_i past the later factors
            sign = -1 if (base.par[i] and after[k].numerator % 2) else 1
            rest = fac[:k] + (((i, p - 1),) if p > 1 else ()) + fac[k + 1:]
            mono = Monomial(rest + ((_bar_pos(T, base, i), 1),), m.exp)
            v = out.get(mono, 0) + sign * p * c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
    return Element._raw(T, out)


def alpha_recursive(a: Element, T: GradedAlgebra) -> Element:
    """alpha via alpha(xy) = x alpha(y) + (-1)^{|x||y|} y alpha(x), one factor at a time."""
    base = a.alg
    out = T.zero()
    for m, c in a.terms.items():
        out = out + T.e(m.exp) * _alpha_word(base, T, m.factors) * c
    return out


def _alpha_word(base, T, factors) -> Element:
    if not factors:
        return T.zero()
    (i, p), rest = factors[0], factors[1:]
    first = (i, 1)
    tail = ((i, p - 1),) + rest if p > 1 else rest
    x = T.mono_element(Monomial((first,), T.basis.zero()))
    y = T.mono_element(Monomial(tail, T.basis.zero()))
    deg_y = sum(q * base.deg[j] for j, q in tail)
    sign = -1 if (base.par[i] and deg_y.numerator % 2) else 1
    xbar = T.mono_element(Monomial(((_bar_pos(T, base, i), 1),), T.basis.zero()))
    return multiply(x, _alpha_word(base, T, tail)) + multiply(y, xbar) * sign


def embed(a: Element, T: GradedAlgebra) -> Element:
    """View an element of the base algebra inside the tilde algebra."""
    return Element._raw(T, dict(a.terms))


def tilde_spec(s: ComplexSpec) -> ComplexSpec:
    T = tilde_algebra(s.alg)
    diff = {}
    for i, g in enumerate(s.alg.generators):
        dx = s.d_gen(i)
        if dx:
            diff[g.name] = embed(dx, T)
            diff[bar_name(g.name)] = alpha(dx, T)
    return ComplexSpec(T, diff, s.label + "-tilde", s.window)


def tilde_d(ts: ComplexSpec, t: Element, w: Optional[Window] = None) -> Element:
    return apply_d(ts, t, w)


def check_alpha_chain(s: ComplexSpec, w: Optional[Window] = None,
                      samples: Optional[Iterable] = None) -> CheckReport:
    """alpha(d m) = d(alpha m) modulo the window on every sample monomial."""
    from .expr import format_monomial
    ts = tilde_spec(s)
    cw = check_window(w or s.window)
    if samples is None:
        samples = [s.alg.gen_mono(i) for i in range(len(s.alg.generators))]
    for m in samples:
        a = s.alg.mono_element(m) if isinstance(m, Monomial) else m
        lhs = alpha(apply_d(s, a), ts.alg)
        rhs = apply_d(ts, alpha(a, ts.alg))
        res = truncate(lhs - rhs, cw)
        if res:
            return CheckReport(False, str(a), res, "alpha d != d alpha")
    return CheckReport(True)


def tilde_homology(s: ComplexSpec, w: Optional[Window] = None) -> HomologyReport:
    return homology(tilde_spec(s), w or s.window, module=True)
