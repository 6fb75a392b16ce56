"""Free terms and the explicit contracting certificate for acyclicity.

If ``dx`` contains a free term ``a e^{lam0}`` of minimal area, then with
``tau = x e^{-lam0} / a`` one has ``d tau = 1 + b`` where every term of ``b``
has positive weight, so ``c = sum_i (-b)^i`` converges and ``d(c tau) = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebra import Element, Monomial, Window, multiply, truncate
from .complex import ComplexSpec, apply_d, check_window
from .errors import MathFailure, WindowError
from .novikov import exp_negate


@dataclass(frozen=True)
class FreeTerm:
    generator: str
    exp: tuple
    coefficient: Fraction
    morse_index: Fraction
    maslov: int
    area: Fraction


@dataclass
class FreeTermReport:
    witnesses: list
    high_witnesses: list
    diagnostics: list = field(default_factory=list)

    @property
    def has_high(self) -> bool:
        return bool(self.high_witnesses)

    def __bool__(self):
        return bool(self.witnesses)


def find_free_terms(s: ComplexSpec) -> FreeTermReport:
    alg = s.alg
    top = max((g.morse_index for g in alg.generators if g.kind == "crit"), default=None)
    wit, high, diags = [], [], []
    for i, x in enumerate(alg.generators):
        if x.is_module:
            continue
        for m, c in s.d_gen(i).terms.items():
            if m.factors:
                continue
            mu, om = alg.mu_omega(m.exp)
            ft = FreeTerm(x.name, m.exp, c, x.morse_index, mu, om)
            wit.append(ft)
            if x.morse_index >= 1:
                high.append(ft)
                # degree count |x| = mu - 1 with mu even forces an even index
                even = x.morse_index % 2 == 0
                ok = even and x.morse_index != top
                diags.append(
                    f"{'pass' if ok else 'fail'}: high free term on {x.name} "
                    f"(index {x.morse_index}, mu {mu}) "
                    f"{'has' if ok else 'lacks'} even index different from 0 and {top}")
    key = lambda f: (f.area, f.maslov, f.exp, alg.pos(f.generator))
    wit.sort(key=key)
    high.sort(key=key)
    return FreeTermReport(wit, high, diags)


@dataclass
class Certificate:
    witness: FreeTerm
    tau: Element
    b: Element
    c: Element
    d_c_tau: Element
    dc: Element
    window: Window

    @property
    def ok(self) -> bool:
        one = self.tau.alg.unit()
        return self.d_c_tau == one and not self.dc


def acyclicity_certificate(s: ComplexSpec, w: Optional[Window] = None,
                           max_terms: int = 10000) -> Certificate:
    """Return ``(tau, c)`` with ``d(c tau) = 1`` in the window, or raise."""
    w = (w or s.window).replace(degrees=None)
    rep = find_free_terms(s)
    if not rep:
        raise MathFailure("no free term: the acyclicity certificate does not apply")
    f = rep.witnesses[0]
    alg = s.alg
    lam = exp_negate(f.exp)
    for (lo, hi), v, name in zip(w.ranges(alg.basis), lam, alg.basis.names):
        if v < lo:
            raise WindowError(f"window excludes e^(-{f.generator} class): "
                              f"{name} exponent {v} below box {lo}")
    if f.coefficient == 0:  # pragma: no cover - a stored coefficient is never zero
        raise MathFailure("non-invertible leading coefficient")
    x = alg.pos(f.generator)
    tau = alg.mono_element(Monomial(((x, 1),), lam), 1 / f.coefficient)
    one = alg.unit()
    b = apply_d(s, tau) - one
    if b.terms.get(alg.one()):
        raise MathFailure("d tau has a constant term other than 1")
    neg_b = truncate(-b, w)
    c = one
    power = one
    for _ in range(max_terms):
        power = multiply(power, neg_b, w)
        if not power:
            break
        c = c + power
    else:
        raise WindowError("Neumann series did not leave the window; "
                          "some term of b has weight 0")
    c = truncate(c, w)
    d_c_tau = truncate(apply_d(s, multiply(c, tau)), w)
    dc = apply_d(s, c, check_window(w))
    return Certificate(f, tau, b, c, d_c_tau, dc, w)
