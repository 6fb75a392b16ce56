"""Randomised algebraic laws, 1000 cases each (exact equality)."""
from fractions import Fraction
from functools import lru_cache

from hypothesis import given, settings
from hypothesis import strategies as st

from clusterhom.algebra import (Element, Generator, GradedAlgebra, Monomial, Window,
                                enumerate_monomials, multiply, substitute, truncate)
from clusterhom.complex import ComplexSpec, apply_d, check_d_squared, check_window, is_morse_term
from clusterhom.fileformat import load
from clusterhom.novikov import ClassBasis
from clusterhom.tilde import alpha, alpha_recursive, check_alpha_chain, tilde_spec

from conftest import DATA

N = 1000
BASIS = ClassBasis.from_triples([("lam0", 2, 1), ("lam1", 0, 1)])
# degrees 1, 2, -1, 0, 3
GENS = [Generator("a", 2), Generator("b", 3), Generator("c", 0), Generator("d", 1),
        Generator("e", 4)]
ALG = GradedAlgebra(GENS, BASIS)


@st.composite
def monomials(draw, alg=ALG, max_len=3, max_exp=2):
    n = len(alg.generators)
    raw = draw(st.lists(st.integers(0, n - 1), max_size=max_len))
    lam = tuple(draw(st.integers(0, max_exp)) for _ in alg.basis.entries)
    r = alg.normalize(raw, lam)
    if r is None:
        return alg.zero()
    sign, m = r
    return alg.mono_element(m, sign * draw(st.integers(-3, 3).filter(bool)))


def degree(x: Element):
    (d,) = x.degrees()
    return d


@settings(max_examples=N)
@given(monomials(), monomials())
def test_koszul_commutativity(x, y):
    if x.is_zero() or y.is_zero():
        assert (x * y).is_zero() and (y * x).is_zero()
        return
    sign = -1 if degree(x) * degree(y) % 2 else 1
    assert x * y == (y * x) * sign


@settings(max_examples=N)
@given(monomials(), monomials(), monomials())
def test_associativity(x, y, z):
    assert (x * y) * z == x * (y * z)


@settings(max_examples=N)
@given(st.lists(monomials(), min_size=1, max_size=3), monomials())
def test_distributivity(xs, y):
    total = ALG.zero()
    for x in xs:
        total = total + x
    assert total * y == sum((x * y for x in xs), ALG.zero())


# ---- differential laws on shipped and conjugated specs ---------------------------------

@lru_cache(maxsize=None)
def shipped():
    specs = []
    for path in sorted(DATA.glob("*.cx")):
        specs.append(load(path))
    specs.append(load(DATA / "circle_line.fx").spec)
    specs.append(tilde_spec(load(DATA / "s1.cx")))
    return specs


def spec_monomials(s, window):
    mons = enumerate_monomials(s.alg, window)
    return [m for ms in mons.values() for m in ms]


@lru_cache(maxsize=None)
def shipped_monomials():
    out = []
    for s in shipped():
        w = Window(max_word_len=3, box={n: (0, 1) for n in s.basis.names})
        out += [(s, m) for m in spec_monomials(s, w)]
    return out


@settings(max_examples=N)
@given(st.data())
def test_d_squared_vanishes_on_shipped_specs(data):
    s, m = data.draw(st.sampled_from(shipped_monomials()))
    x = s.alg.mono_element(m)
    cw = check_window(s.window)
    assert apply_d(s, apply_d(s, x), cw).is_zero()


@settings(max_examples=N)
@given(st.data())
def test_leibniz_on_shipped_specs(data):
    pool = shipped_monomials()
    s, m1 = data.draw(st.sampled_from(pool))
    m2 = data.draw(st.sampled_from([m for t, m in pool if t is s]))
    x, y = s.alg.mono_element(m1), s.alg.mono_element(m2)
    if s.alg.has_module and s.alg.module_count(m1):
        x, y = y, x  # the module factor must sit on the right
    if s.alg.has_module and s.alg.module_count(m1) and s.alg.module_count(m2):
        return
    sign = -1 if degree(x) % 2 else 1
    assert apply_d(s, x * y) == apply_d(s, x) * y + (x * apply_d(s, y)) * sign


@settings(max_examples=N)
@given(st.data())
def test_d_raises_filtration(data):
    s, m = data.draw(st.sampled_from(shipped_monomials()))
    alg = s.alg
    wm = alg.weight(m)
    dm = apply_d(s, alg.mono_element(m))
    for t in dm.terms:
        assert alg.weight(t) >= wm
    for i, dx in s.diff.items():
        for t in dx.terms:
            if not is_morse_term(alg, t) and not alg.is_module[i]:
                assert alg.weight(t) > alg.length[i]


# conjugation by a random filtration-raising automorphism phi = id + p

CONJ_WINDOW = Window(max_word_len=4, box={"lam0": (0, 2)})


@lru_cache(maxsize=None)
def conj_base():
    s = ComplexSpec.build([("m", 0), ("M", 1), ("x", 2), ("y", 1)], [("lam0", 2, 1)],
                          {"m": "(1 + M + M^2 + M^3) * e[lam0]", "x": "y"}, window=CONJ_WINDOW)
    alg = s.alg
    cands = {}
    mons = enumerate_monomials(alg, CONJ_WINDOW)
    for i, g in enumerate(alg.generators):
        cands[i] = [m for m in mons.get(g.degree, []) if alg.weight(m) > 1]
    return s, cands


def fixed_point_inverse(alg, p, cw):
    """psi with psi o (id + p) = id modulo the window: psi(g) = g - p_g(psi)."""
    psi = {i: alg.mono_element(alg.gen_mono(i)) for i in range(len(alg.generators))}
    for _ in range(int(cw.cutoff()) + 2):
        psi = {i: truncate(alg.mono_element(alg.gen_mono(i)) - substitute(p[i], psi, alg, w=cw), cw)
               for i in psi}
    return psi


@st.composite
def conjugated_specs(draw):
    s, cands = conj_base()
    alg = s.alg
    cw = check_window(CONJ_WINDOW)
    p = {}
    for i in range(len(alg.generators)):
        terms = {}
        for m in draw(st.lists(st.sampled_from(cands[i]), max_size=2)) if cands[i] else []:
            terms[m] = Fraction(draw(st.integers(-2, 2)))
        p[i] = Element(alg, terms)
    phi = {i: alg.mono_element(alg.gen_mono(i)) + p[i] for i in p}
    psi = fixed_point_inverse(alg, p, cw)
    diff = {}
    for i in phi:
        d_phi = apply_d(s, phi[i], cw)
        diff[i] = truncate(substitute(d_phi, psi, alg, w=cw), cw)
    return ComplexSpec(alg, diff, "conjugated", CONJ_WINDOW), phi, psi


@settings(max_examples=N)
@given(conjugated_specs())
def test_d_squared_on_conjugated_specs(data):
    s, phi, psi = data
    assert check_d_squared(s).ok


@settings(max_examples=N)
@given(conjugated_specs())
def test_conjugation_inverse_is_exact_in_window(data):
    s, phi, psi = data
    cw = check_window(CONJ_WINDOW)
    for i, img in phi.items():
        back = truncate(substitute(img, psi, s.alg, w=cw), cw)
        assert back == s.alg.mono_element(s.alg.gen_mono(i))


# ---- tilde laws ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def tilde_pool():
    out = []
    for s in shipped()[:4]:
        if s.alg.has_module:
            continue
        w = Window(max_word_len=3, box={n: (0, 1) for n in s.basis.names})
        out += [(s, m) for m in spec_monomials(s, w)]
    return out


@settings(max_examples=N)
@given(st.data())
def test_alpha_commutes_with_d(data):
    s, m = data.draw(st.sampled_from(tilde_pool()))
    assert check_alpha_chain(s, samples=[m]).ok


@settings(max_examples=N)
@given(st.lists(monomials(max_len=4), min_size=1, max_size=3))
def test_explicit_alpha_equals_recursive(xs):
    T = tilde_spec(ComplexSpec(ALG, {}, "", None)).alg
    total = ALG.zero()
    for x in xs:
        total = total + x
    assert alpha(total, T) == alpha_recursive(total, T)


@settings(max_examples=N)
@given(conjugated_specs(), st.data())
def test_alpha_commutes_with_d_on_conjugated_specs(spec, data):
    s, _, _ = spec
    m = data.draw(st.sampled_from(spec_monomials(s, Window(max_word_len=2,
                                                           box={"lam0": (0, 1)}))))
    assert check_alpha_chain(s, samples=[m]).ok
