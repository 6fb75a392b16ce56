from clusterhom.algebra import Monomial, Window
from clusterhom.complex import ComplexSpec, homology
from clusterhom.scenarios import PATTERNS, example_no_bubbling
from clusterhom.spectral import filtration_level, filtration_violations, pages, preserves_filtration


def test_filtration_level_examples(s1):
    alg = s1.alg
    assert filtration_level(alg.one(), alg) == 0
    assert filtration_level(Monomial(((alg.pos("M"), 1),), (1,)), alg) == 3
    s = ComplexSpec.build([("x", 1), ("y", 1)], [], {})
    assert filtration_level(Monomial(((0, 1), (1, 1)), ()), s.alg) == 2


def test_s1_pages_collapse(s1):
    e0, e1 = pages(s1)
    assert not any(e0.d_ranks.values())
    assert e1.dims == e0.dims


def test_pair_drops_out_of_E1():
    w = Window(max_word_len=3, degrees=(-4, 3))
    pair = ComplexSpec.build([("m", 0), ("x", 1), ("y", 0)], [], {"x": "y"}, window=w)
    free = ComplexSpec.build([("m", 0), ("x", 1), ("y", 0)], [], {}, window=w)
    e0, e1 = pages(pair)
    f0, f1 = pages(free)
    assert e0.dims == f0.dims
    # per level and degree, E1 loses exactly 2 * (rank of d0 into that block)
    for key, n in e0.dims.items():
        lost = e0.d_ranks.get(key, 0) + e0.d_ranks.get((key[0], key[1] + 1), 0)
        assert e1.dims[key] == n - lost
    assert sum(e1.dims.values()) < sum(e0.dims.values())


def test_no_bubbling_spectral_sequence_collapses():
    gens, d0 = PATTERNS["torus"]
    w = Window(max_word_len=3, box={"lam": (0, 1)}, degrees=(-5, 2))
    s = example_no_bubbling(gens, d0, [("lam", 2, 1)], w=w)
    e0, e1 = pages(s)
    assert e1.dims == e0.dims
    h = homology(s)
    for n in h.certified:
        assert h.betti[n] == e1.total(n)


def test_filtration_checks(s1):
    assert filtration_violations(s1) == []
    quad = ComplexSpec.build([("x", 2), ("y", 1), ("z", 1)], [], {"x": "y*z"})
    assert filtration_violations(quad) == []  # word length 2 > 1: strictly raises
    # a zero-area class leaves the weight unchanged without being a Morse term
    flat = ComplexSpec.build([("x", 2), ("y", 1)], [("nu", 0, 0)], {"x": "y * e[nu]"})
    assert [name for name, _ in filtration_violations(flat)] == ["x"]
    phi = {"m": s1.alg.g("m"), "M": s1.alg.g("M")}
    assert preserves_filtration(phi, s1)
    assert not preserves_filtration({"M": s1.alg.unit()}, s1)
