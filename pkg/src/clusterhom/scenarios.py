"""Built-in worked examples and the Maslov-index case analysis for S^1 x S^(n-1)."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .algebra import Element, Generator, Window
from .complex import ComplexSpec
from .errors import MathFailure, SpecError
from .fine import s1_cluster
from .linalg import rank

S1_WINDOW = Window(max_word_len=6, box={"lam0": (-2, 4)}, degrees=(-6, 6))


def example_s1(w: Optional[Window] = None, area=1) -> ComplexSpec:
    """dm = (1 + M + M^2 + ...) e^{lam0}, dM = 0, truncated to the window."""
    w = w or S1_WINDOW
    if w.max_word_len is not None:
        k = w.max_word_len
    else:
        # largest k with k + 2*area/eps < cutoff
        k = int(w.cutoff() - 2 * Fraction(area))
        k = max(k, 0)
    return s1_cluster(k, area=area, window=w)


def example_no_bubbling(generators: Sequence, d0: Optional[Mapping] = None,
                        classes: Sequence = (), epsilon_D=1, w: Optional[Window] = None,
                        label: str = "no-bubbling") -> ComplexSpec:
    """Spec whose differential is exactly the Morse differential ``d0``."""
    s = ComplexSpec.build(generators, classes, d0 or {}, epsilon_D, label, w)
    alg = s.alg
    for i, dx in s.diff.items():
        for m in dx.terms:
            if any(m.exp) or alg.word_len(m) != 1:
                raise SpecError(f"d0 {alg.generators[i].name} is not linear in the generators")
    for i in s.diff:
        from .complex import apply_d
        if apply_d(s, s.diff[i]):
            raise MathFailure(f"d0 does not square to zero on {alg.generators[i].name}")
    return s


# Morse patterns: (generators with indices, d0)
PATTERNS = {
    "s1": ([("m", 0), ("M", 1)], {}),
    "torus": ([("m", 0), ("a", 1), ("b", 1), ("M", 2)], {}),
    "s2-extra-pair": ([("m", 0), ("c1", 1), ("c2", 2), ("M", 2)], {"c2": "c1"}),
}


def morse_homology_degrees(s: ComplexSpec) -> list:
    """Degrees (index - 1) of a basis of the homology of (generators, d0)."""
    alg = s.alg
    by_deg: dict = {}
    for i, g in enumerate(alg.generators):
        by_deg.setdefault(g.degree, []).append(i)
    d0 = {}
    for i, dx in s.diff.items():
        d0[i] = {m.factors[0][0]: c for m, c in dx.terms.items()
                 if not any(m.exp) and alg.word_len(m) == 1}
    out = []
    for deg, idx in sorted(by_deg.items()):
        r_out = rank([d0.get(i, {}) for i in idx])
        r_in = rank([d0.get(i, {}) for i in by_deg.get(deg + 1, [])])
        out += [deg] * (len(idx) - r_out - r_in)
    return out


def symmetric_algebra_counts(gen_degrees: Sequence, basis, w: Window, module_degrees=None) -> dict:
    """Per-degree count of monomials of the free graded-commutative algebra on
    ``gen_degrees`` tensor the Novikov ring, inside the window (box and weight
    cutoff), optionally tensored with a free module on ``module_degrees``."""
    from .algebra import GradedAlgebra, enumerate_monomials
    gens = [Generator(f"h{k}", Fraction(d) + 1) for k, d in enumerate(gen_degrees)]
    gens += [Generator(f"v{k}", Fraction(d) + 1, "bar") for k, d in enumerate(module_degrees or [])]
    alg = GradedAlgebra(gens, basis)
    ww = Window(weight_cutoff=w.cutoff(), box=w.box, degrees=w.degrees, max_cells=w.max_cells)
    mons = enumerate_monomials(alg, ww, module=bool(module_degrees))
    return {d: len(v) for d, v in mons.items()}


# ---- Maslov scan ----------------------------------------------------------------------

@dataclass(frozen=True)
class MaslovStep:
    branch: str          # "free", "tilde" or "quotient"
    source: str
    target: str          # "" for a free term
    source_deg: int
    target_deg: int
    mu: int
    note: str = ""

    def equation(self) -> str:
        tgt = f" - |{self.target}| ({self.target_deg})" if self.target else ""
        return f"|{self.source}| ({self.source_deg}){tgt} + mu ({self.mu}) = 1"

    def holds(self) -> bool:
        return self.source_deg - self.target_deg + self.mu == 1


@dataclass
class MaslovVerdict:
    n: int
    parity: str
    required_set: frozenset
    log: list = field(default_factory=list)        # accepted steps (even mu)
    rejected: list = field(default_factory=list)   # candidates ruled out, with reason
    notes: list = field(default_factory=list)


def maslov_scan(n: int) -> MaslovVerdict:
    """Degree bookkeeping for a perfect Morse function on S^1 x S^(n-1)."""
    if n < 2:
        raise SpecError("maslov_scan needs n >= 2")
    deg = {"m": -1, "a": 0, "b": n - 2, "M": n - 1}
    log, rejected, notes = [], [], []

    def consider(step: MaslovStep, reason_if_bad: Optional[str] = None):
        assert step.holds()
        if step.mu % 2:
            rejected.append((step, "mu must be even"))
            return False
        if reason_if_bad:
            rejected.append((step, reason_if_bad))
            return False
        log.append(step)
        return True

    # free terms: dx = a0 e^lam, so |x| + mu = 1
    free = {}
    for x in ("m", "a", "b"):
        st = MaslovStep("free", x, "", deg[x], 0, 1 - deg[x])
        if consider(st):
            free[x] = st.mu
    rejected.append((MaslovStep("free", "M", "", deg["M"], 0, 1 - deg["M"]),
                     "no free term on the maximum"))
    # no free terms: d ybar = a1 Mbar e^lam, so |ybar| - |Mbar| + mu = 1
    tilde = {}
    for y in ("b", "m", "a", "M"):
        st = MaslovStep("tilde", y + "_bar", "M_bar", deg[y], deg["M"], 1 - deg[y] + deg["M"])
        if consider(st, "d Mbar = 0" if y == "M" else None):
            tilde[y] = st.mu
    if n % 2 == 0:
        required = frozenset({2, n})
        notes.append(f"even n: free branch forces mu = 2 (m); "
                     f"otherwise mu = 2 (b_bar) or mu = {n} (a_bar)")
    else:
        notes.append(f"odd n: 2 in Im(mu) implies 3 - n = {3 - n} in Im(mu) (even multiple of 2)")
        notes.append("assume 3 - n not in Im(mu): no free terms, and b_bar is excluded (mu = 2)")
        notes.append(f"so d m_bar = a1 M_bar e^lam with mu = {n + 1}; quotient m_bar -> 0")
        s1 = MaslovStep("quotient", "a_bar", "b_bar", deg["a"], deg["b"], 1 - deg["a"] + deg["b"])
        s2 = MaslovStep("quotient", "b_bar", "a_bar", deg["b"], deg["a"], 1 - deg["b"] + deg["a"])
        consider(s1)
        consider(s2)
        notes.append(f"a_bar -> b_bar needs mu = {s1.mu}; with {n + 1} in Im(mu) this gives 2, "
                     f"hence {3 - n}: contradiction")
        notes.append(f"b_bar -> a_bar needs mu = {s2.mu} = 3 - n: contradiction")
        required = frozenset({2, 3 - n})
    return MaslovVerdict(n, "even" if n % 2 == 0 else "odd", required, log, rejected, notes)
