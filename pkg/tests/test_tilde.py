from clusterhom.algebra import Window
from clusterhom.complex import ComplexSpec, check_d_squared, homology
from clusterhom.tilde import (alpha, alpha_recursive, bar_name, check_alpha_chain, tilde_algebra,
                              tilde_homology, tilde_spec)

from oracles import free_algebra_counts


def test_alpha_basics():
    s = ComplexSpec.build([("x", 2), ("y", 2)], [], {})
    ts = tilde_spec(s)
    T = ts.alg
    assert alpha(s.alg.unit(), T).is_zero()
    assert alpha(s.alg.g("x"), T) == T.g(bar_name("x"))
    # |x| = |y| = 1
    assert alpha(s.el("x*y"), T) == ts.el("x*y_bar - y*x_bar")
    assert alpha_recursive(s.el("x*y"), T) == alpha(s.el("x*y"), T)


def test_alpha_of_powers(s1):
    T = tilde_algebra(s1.alg)
    ts = tilde_spec(s1)
    for k in range(1, 5):
        assert alpha(s1.alg.g("M", k), T) == ts.el(f"{k} * M^{k - 1} * M_bar")


def test_tilde_d_on_s1(s1):
    ts = tilde_spec(s1)
    assert ts.d_gen("M_bar").is_zero()
    want = ts.el("(M_bar + 2*M*M_bar + 3*M^2*M_bar + 4*M^3*M_bar + 5*M^4*M_bar + 6*M^5*M_bar)"
                 " * e[lam0]")
    assert ts.d_gen("m_bar") == want
    assert check_d_squared(ts).ok


def test_alpha_is_a_chain_map(s1):
    assert check_alpha_chain(s1).ok
    assert check_alpha_chain(s1, samples=[s1.alg.unit()]).ok


def test_tilde_homology_s1_vanishes(s1):
    assert tilde_homology(s1).is_zero()


def test_tilde_homology_of_zero_differential():
    w = Window(max_word_len=4, box={"lam": (0, 1)}, degrees=(-6, 4))
    s = ComplexSpec.build([("m", 0), ("M", 1)], [("lam", 2, 1)], {}, window=w)
    h = tilde_homology(s)
    # S(V) (x) Lambda (x) V-bar; bar generators count towards word length
    cut = w.cutoff()
    want = free_algebra_counts([-1, 0], [(0, 0), (-2, 2)], cut, module_degrees=[-1, 0])
    for n in h.certified:
        assert h.betti[n] == want.get(n, 0), n
