import pytest

from clusterhom.algebra import Window
from clusterhom.certificates import acyclicity_certificate, find_free_terms
from clusterhom.complex import ComplexSpec, apply_d
from clusterhom.errors import MathFailure, WindowError


def test_s1_free_term(s1):
    r = find_free_terms(s1)
    assert [(f.generator, f.exp, f.coefficient) for f in r.witnesses] == [("m", (1,), 1)]
    assert not r.has_high


def test_zero_differential_has_no_free_terms():
    s = ComplexSpec.build([("m", 0), ("M", 1)], [("lam0", 2, 1)], {})
    assert not find_free_terms(s)
    with pytest.raises(MathFailure, match="no free term"):
        acyclicity_certificate(s, Window(max_word_len=3))


def test_high_free_term_parity_diagnostic():
    # |x| = 1 so d x = e^lam needs mu = 0; x is not of top index
    s = ComplexSpec.build([("x", 2), ("t", 3)], [("nu", 0, 1)], {"x": "e[nu]"})
    r = find_free_terms(s)
    assert r.has_high and r.high_witnesses[0].generator == "x"
    assert r.diagnostics and r.diagnostics[0].startswith("pass")


def test_s1_certificate(s1):
    cert = acyclicity_certificate(s1)
    assert cert.tau == s1.el("m * e[-lam0]")
    assert cert.c == s1.el("1 - M")
    assert cert.d_c_tau == s1.alg.unit()
    assert cert.dc.is_zero() and cert.ok
    # independent check: expand d(c tau) by hand, (1 - M)(1 + M + ... + M^6) = 1 - M^7
    assert apply_d(s1, s1.el("(1 - M) * m * e[-lam0]")) == s1.el("1 - M^7")


def test_certificate_needs_room_for_the_inverse_class(s1):
    with pytest.raises(WindowError):
        acyclicity_certificate(s1, Window(max_word_len=6, box={"lam0": (0, 4)}))
