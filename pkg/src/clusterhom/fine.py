"""Fine Floer complexes: free modules over two cluster algebras on intersection points.

The coefficient ring is generated by the critical points of both cluster
specs with Novikov exponents in a common class basis; every class of either
spec is embedded into that basis.  Intersection points are module
generators (word length 0, possibly half-integer degree), so ``d_F`` is a
left-module derivation over the ring differential.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .algebra import Element, GradedAlgebra, Generator, Monomial, Window, multiply, substitute, truncate
from .complex import (CheckReport, ComplexSpec, HomologyReport, check_d_squared, check_window,
                      homology)
from .errors import MathFailure, SpecError
from .novikov import ClassBasis


class FineSpec:
    def __init__(self, cl0: ComplexSpec, cl1: ComplexSpec, bar_basis: ClassBasis,
                 embeddings: Mapping, intersections, dF: Mapping, label: str = "",
                 window: Optional[Window] = None):
        self.cl0, self.cl1 = cl0, cl1
        self.bar_basis = bar_basis
        self.embeddings = dict(embeddings)      # (side, class) -> bar class
        self.intersections = [g if isinstance(g, Generator) else
                              Generator(g[0], Fraction(g[1]) + 1, "intersection")
                              for g in intersections]
        self.label = label
        self.window = window if window is not None else cl0.window
        names0 = {g.name for g in cl0.generators}
        names1 = {g.name for g in cl1.generators}
        if names0 & names1:
            raise SpecError(f"generator names shared by both sides: {sorted(names0 & names1)}")
        for g in self.intersections:
            if g.kind != "intersection":
                raise SpecError(f"{g.name} must be an intersection generator")
        self._maps = {}
        for side, spec in (("cl0", cl0), ("cl1", cl1)):
            self._maps[side] = self._exp_map(side, spec.basis)
        targets = list(self.embeddings.values())
        if len(set(targets)) != len(targets):
            raise SpecError("class embeddings are not injective")
        self.alg = GradedAlgebra(list(cl0.generators) + list(cl1.generators) + self.intersections,
                                 bar_basis)
        diff = {}
        for side, spec in (("cl0", cl0), ("cl1", cl1)):
            for i, g in enumerate(spec.generators):
                dx = spec.d_gen(i)
                if dx:
                    diff[g.name] = self.lift(side, dx)
        for key, val in dF.items():
            if key not in {g.name for g in self.intersections}:
                raise SpecError(f"fine differential given for non-intersection {key!r}")
            diff[key] = val
        self.dF = {k: v for k, v in dF.items()}
        self.spec = ComplexSpec(self.alg, diff, label, self.window)
        self.dF = {k: self.spec.d_gen(k) for k in dF}

    def _exp_map(self, side: str, basis: ClassBasis):
        idx = []
        for e in basis.entries:
            tgt = self.embeddings.get((side, e.name))
            if tgt is None:
                raise SpecError(f"class {side}.{e.name} has no embedding into the bar classes")
            j = self.bar_basis.index(tgt)
            be = self.bar_basis.entries[j]
            if (be.maslov, be.area) != (e.maslov, e.area):
                raise SpecError(f"embedding {side}.{e.name} -> {tgt} changes Maslov index or area")
            idx.append(j)
        n = len(self.bar_basis)

        def f(lam):
            v = [0] * n
            for c, j in zip(lam, idx):
                v[j] += c
            return tuple(v)
        return f

    def lift(self, side: str, a: Element) -> Element:
        f = self._maps[side]
        alg = self.alg
        src = a.alg
        out = {}
        for m, c in a.terms.items():
            fac = tuple((alg.pos(src.generators[i].name), p) for i, p in m.factors)
            r = alg.normalize([i for i, p in fac for _ in range(p)], f(m.exp))
            if r is None:
                continue
            s, mm = r
            out[mm] = out.get(mm, 0) + s * c
        return Element(alg, out)

    def el(self, text: str) -> Element:
        return self.spec.el(text)

    def with_dF(self, dF: Mapping, label: Optional[str] = None) -> "FineSpec":
        return FineSpec(self.cl0, self.cl1, self.bar_basis, self.embeddings, self.intersections,
                        dF, self.label if label is None else label, self.window)

    def __eq__(self, other):
        if not isinstance(other, FineSpec):
            return NotImplemented
        return (_same_complex(self.cl0, other.cl0) and _same_complex(self.cl1, other.cl1)
                and self.bar_basis == other.bar_basis and self.embeddings == other.embeddings
                and self.intersections == other.intersections
                and {k: v.terms for k, v in self.dF.items()} == {k: v.terms for k, v in other.dF.items()}
                and self.label == other.label and self.window == other.window)


def _same_complex(a: ComplexSpec, b: ComplexSpec) -> bool:
    # side labels and windows are bookkeeping; the fine spec carries its own
    return (a.alg.generators == b.alg.generators and a.alg.basis == b.alg.basis
            and {k: v.terms for k, v in a.diff.items()} == {k: v.terms for k, v in b.diff.items()})


def validate_fine(f: FineSpec) -> list:
    """Structural checks on d_F: degree, exactly one intersection factor per term."""
    from .complex import Diagnostic, validate_spec
    out = [d for d in validate_spec(f.spec) if d.kind in ("degree", "module", "unsorted")]
    return out


def split_sa(f: FineSpec, a: str):
    """``d_F a = s_a a + delta_a``; returns ``(s_a, delta_a)``."""
    alg = f.alg
    ai = alg.pos(a)
    if alg.generators[ai].kind != "intersection":
        raise SpecError(f"{a} is not an intersection generator")
    s_terms, rest = {}, {}
    for m, c in f.spec.d_gen(ai).terms.items():
        if m.factors and m.factors[-1] == (ai, 1):
            s_terms[Monomial(m.factors[:-1], m.exp)] = c
        else:
            rest[m] = c
    s_a = Element(alg, s_terms)
    for d in s_a.degrees():
        if d != -1:
            raise MathFailure(f"s({a}) has degree {d}, expected -1")
    return s_a, Element(alg, rest)


def check_sa_squared(f: FineSpec, w: Optional[Window] = None) -> CheckReport:
    cw = check_window(w or f.window)
    for g in f.intersections:
        s_a, _ = split_sa(f, g.name)
        sq = truncate(multiply(s_a, s_a), cw)
        if sq:
            return CheckReport(False, g.name, sq, f"s({g.name})^2 != 0")
    return CheckReport(True)


def check_dF_squared(f: FineSpec, w: Optional[Window] = None) -> CheckReport:
    return check_d_squared(f.spec, w or f.window)


def fine_homology(f: FineSpec, w: Optional[Window] = None) -> HomologyReport:
    return homology(f.spec, w or f.window, module=True)


def s1_cluster(max_word_len: int = 6, area=1, names=("m", "M"), cls="lam0",
               free_terms: bool = True, window: Optional[Window] = None) -> ComplexSpec:
    m, M = names
    series = " + ".join(["1"] + [f"{M}^{k}" if k > 1 else M for k in range(1, max_word_len + 1)])
    diff = {m: f"({series}) * e[{cls}]"} if free_terms else {}
    return ComplexSpec.build([(m, 0), (M, 1)], [(cls, 2, area)], diff, label="S1", window=window)


def builtin_circle_line(w: Optional[Window] = None, sign: int = -1) -> FineSpec:
    """Circle against a line: d_F a = m a + b, d_F b = m b + sign (dm) a.

    ``sign = -1`` is the choice with d_F^2 = 0; ``sign = +1`` is kept as a
    negative control.
    """
    w = w or Window(max_word_len=6, box={"lam": (-2, 4)}, degrees=(-6, 6))
    k = w.max_word_len if w.max_word_len is not None else int(w.cutoff()) - 1
    cl0 = s1_cluster(k, window=w)
    cl1 = ComplexSpec.build([], [], {}, label="R", window=w)
    bar = ClassBasis.from_triples([("lam", 2, 1)])
    f = FineSpec(cl0, cl1, bar, {("cl0", "lam0"): "lam"},
                 [("a", Fraction(1, 2)), ("b", Fraction(-1, 2))], {}, "circle-line", w)
    dm = f.spec.d_gen("m")
    a, b, m = f.alg.g("a"), f.alg.g("b"), f.alg.g("m")
    dF = {"a": m * a + b, "b": m * b + multiply(dm, a) * sign}
    return f.with_dF(dF)


def symmetrize(f: FineSpec, identification: Mapping) -> FineSpec:
    """Identify every cl1 generator with a cl0 generator of the same degree."""
    ident = dict(identification)
    names1 = [g.name for g in f.cl1.generators]
    if set(ident) != set(names1):
        raise SpecError("identification must cover exactly the cl1 generators")
    if len(set(ident.values())) != len(ident):
        raise SpecError("identification is not injective")
    for src, tgt in ident.items():
        d1 = f.cl1.alg.gen(src).degree
        d0 = f.cl0.alg.gen(tgt).degree
        if d0 != d1:
            raise SpecError(f"identification {src} -> {tgt} changes degree {d1} -> {d0}")
    cl1 = ComplexSpec.build([], [], {}, label=f.cl1.label, window=f.cl1.window)
    emb = {k: v for k, v in f.embeddings.items() if k[0] == "cl0"}
    g = FineSpec(f.cl0, cl1, f.bar_basis, emb, f.intersections, {}, f.label + "-sym", f.window)
    images = {}
    for i, gen in enumerate(f.alg.generators):
        images[i] = g.alg.g(ident.get(gen.name, gen.name))
    dF = {k: substitute(v, images, g.alg) for k, v in f.dF.items()}
    out = g.with_dF(dF)
    rep = check_dF_squared(out)
    if not rep.ok:
        raise MathFailure(f"symmetrized differential fails d_F^2 = 0 on {rep.offender}", rep.residual)
    return out
