"""Command-line front end.

Every command prints a human-readable summary followed by a key/value block
fenced by ``---report---`` lines (on stderr for ``example``, whose stdout is
a spec file).  Exit status: 0 success, 1 mathematical
failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import fileformat
from .algebra import Window
from .certificates import acyclicity_certificate, find_free_terms
from .complex import (ComplexSpec, check_chain_map, check_d_squared, errors_only, homology,
                      validate_spec)
from .errors import MathFailure, ParseError, SpecError, WindowError
from .expr import format_element
from .fine import (FineSpec, builtin_circle_line, check_dF_squared, fine_homology, symmetrize,
                   validate_fine)
from .minimal import minimal_model
from .novikov import format_exponent
from .scenarios import PATTERNS, example_no_bubbling, example_s1, maslov_scan
from .spectral import pages
from .tilde import check_alpha_chain, tilde_homology, tilde_spec
from .trees import (ClusterTree, boundary_splittings, d_squared_consistency, expected_dimension,
                    validate_tree)

OK, FAIL, BAD_INPUT = 0, 1, 2
FENCE = "---report---"


class InputError(Exception):
    pass


class Report:
    def __init__(self, command: str):
        self.lines: list = []
        self.kv: list = [("command", command)]
        self.kv_to_err = False   # set when stdout carries a file (``example``)

    def say(self, text: str = ""):
        self.lines.append(text)

    def put(self, key: str, value):
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.kv.append((key, str(value)))

    def emit(self, out, status: str, err=None):
        self.put("status", status)
        for ln in self.lines:
            print(ln, file=out)
        kv_out = err if self.kv_to_err and err is not None else out
        print(FENCE, file=kv_out)
        for k, v in self.kv:
            print(f"{k} = {v}", file=kv_out)
        print(FENCE, file=kv_out)


def parse_report(text: str) -> dict:
    """Key/value block of a command's output (the last fenced block)."""
    parts = text.split(FENCE + "\n")
    if len(parts) < 3:
        raise ValueError("no report block")
    out = {}
    for ln in parts[-2].splitlines():
        k, _, v = ln.partition(" = ")
        out[k] = v
    return out


# ---- input helpers ----------------------------------------------------------------

def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None
    return fileformat.parse_text(text)


def _complex(path: str) -> ComplexSpec:
    s = _load(path)
    if isinstance(s, FineSpec):
        raise InputError(f"{path} is a fine spec; use the 'fine' commands")
    return s


def _fine(path: str) -> FineSpec:
    s = _load(path)
    if not isinstance(s, FineSpec):
        raise InputError(f"{path} is not a fine spec")
    return s


def _range(text: str, cast):
    lo, sep, hi = text.partition("..")
    if not sep:
        raise InputError(f"expected lo..hi, got {text!r}")
    try:
        return cast(lo), (cast(hi) if hi else None)
    except ValueError:
        raise InputError(f"bad range {text!r}") from None


def _window(args, spec_window: Window | None, basis) -> Window:
    w = spec_window or Window(max_word_len=6)
    changes = {}
    if getattr(args, "max_word_len", None) is not None:
        changes["max_word_len"] = args.max_word_len
    if getattr(args, "weight_cutoff", None) is not None:
        changes["weight_cutoff"] = Fraction(args.weight_cutoff)
    if getattr(args, "degrees", None):
        lo, hi = _range(args.degrees, Fraction)
        if hi is None:
            raise InputError("--degrees needs both bounds")
        changes["degrees"] = (lo, hi)
    if getattr(args, "box", None):
        box = dict(w.box)
        for item in args.box:
            name, sep, rng = item.partition("=")
            if not sep or name not in basis.names:
                raise InputError(f"bad --box {item!r}")
            box[name] = _range(rng, int)
        changes["box"] = box
    return w.replace(**changes) if changes else w


def _exponent(text: str, basis) -> tuple:
    """``lam0=1,lam1=-2`` -> exponent tuple."""
    v = [0] * len(basis)
    for item in filter(None, (t.strip() for t in (text or "").split(","))):
        name, sep, val = item.partition("=")
        if not sep or name not in basis.names:
            raise InputError(f"bad class exponent {item!r}")
        try:
            v[basis.index(name)] = int(val)
        except ValueError:
            raise InputError(f"bad class exponent {item!r}") from None
    return tuple(v)


def _spec_errors(s: ComplexSpec):
    errs = errors_only(validate_spec(s))
    if errs:
        raise SpecError("; ".join(f"{d.generator}: {d.message}" for d in errs))


# ---- commands ------------------------------------------------------------------------

def cmd_validate(args, rep: Report) -> int:
    s = _load(args.file)
    diags = validate_fine(s) if isinstance(s, FineSpec) else validate_spec(s)
    for d in diags:
        rep.say(f"{d.severity}: [{d.kind}] {d.generator}: {d.message}")
    n_err = len(errors_only(diags))
    rep.say(f"{len(diags)} diagnostic(s), {n_err} error(s)")
    rep.put("diagnostics", len(diags))
    rep.put("errors", n_err)
    rep.put("kinds", ",".join(sorted({d.kind for d in diags})))
    # an invalid spec is bad input, whichever command reads it
    return BAD_INPUT if n_err else OK


def _report_check(rep: Report, r) -> int:
    rep.put("ok", r.ok)
    if r.ok:
        rep.say("d^2 = 0 in the window")
        return OK
    rep.say(f"d^2 != 0 on {r.offender}: {format_element(r.residual)}")
    rep.put("offender", r.offender)
    rep.put("residual", format_element(r.residual))
    return FAIL


def cmd_check_d2(args, rep: Report) -> int:
    s = _load(args.file)
    if isinstance(s, FineSpec):
        return _report_check(rep, check_dF_squared(s, _window(args, s.window, s.bar_basis)))
    _spec_errors(s)
    return _report_check(rep, check_d_squared(s, _window(args, s.window, s.basis)))


def _report_homology(rep: Report, h) -> int:
    rep.say(f"{'deg':>6} {'dim':>6} {'ker':>6} {'im':>6} {'raw':>5} {'betti':>5}")
    for n, dim, ker, im, raw, b, edge in h.rows():
        rep.say(f"{str(n):>6} {dim:>6} {ker:>6} {im:>6} {raw:>5} {b:>5}{'  edge' if edge else ''}")
    cb = h.certified_betti()
    rep.put("certified_degrees", ",".join(str(n) for n in h.certified))
    rep.put("betti", ",".join(f"{n}:{b}" for n, b in cb.items()))
    rep.put("raw_betti", ",".join(f"{n}:{b}" for n, b in h.raw_betti.items()))
    rep.put("zero", h.is_zero())
    return OK


def cmd_homology(args, rep: Report) -> int:
    s = _load(args.file)
    if isinstance(s, FineSpec):
        return _report_homology(rep, fine_homology(s, _window(args, s.window, s.bar_basis)))
    _spec_errors(s)
    return _report_homology(rep, homology(s, _window(args, s.window, s.basis)))


def cmd_free_terms(args, rep: Report) -> int:
    s = _complex(args.file)
    r = find_free_terms(s)
    for f in r.witnesses:
        rep.say(f"{f.generator}: {f.coefficient} e[{format_exponent(f.exp, s.basis)}] "
                f"(index {f.morse_index}, mu {f.maslov}, area {f.area})")
    for msg in r.diagnostics:
        rep.say(f"note: {msg}")
    if not r:
        rep.say("no free terms")
    rep.put("count", len(r.witnesses))
    rep.put("high", len(r.high_witnesses))
    rep.put("witnesses", ";".join(f"{f.generator}|{format_exponent(f.exp, s.basis)}|{f.coefficient}"
                                  for f in r.witnesses))
    return OK


def cmd_certify(args, rep: Report) -> int:
    s = _complex(args.file)
    _spec_errors(s)
    cert = acyclicity_certificate(s, _window(args, s.window, s.basis))
    rep.say(f"tau = {format_element(cert.tau)}")
    rep.say(f"c = {format_element(cert.c)}")
    rep.say(f"d(c tau) = {format_element(cert.d_c_tau)}")
    rep.put("tau", format_element(cert.tau))
    rep.put("c", format_element(cert.c))
    rep.put("d_c_tau", format_element(cert.d_c_tau))
    rep.put("ok", cert.ok)
    return OK if cert.ok else FAIL


def cmd_minimal_model(args, rep: Report) -> int:
    s = _complex(args.file)
    _spec_errors(s)
    out, trace = minimal_model(s, _window(args, s.window, s.basis))
    rep.say(fileformat.print_spec(out).rstrip("\n"))
    for name, img in trace.projection.items():
        rep.say(f"# P({name}) = {format_element(img)}")
    rep.put("generators", ",".join(g.name for g in out.generators))
    rep.put("eliminated", ",".join(f"{x}/{y}" for x, y in trace.eliminated))
    rep.put("d0_zero", trace.d0_zero)
    rep.put("chain_map_ok", trace.chain_map_ok)
    rep.put("homology_match", trace.homology_match)
    return OK


def cmd_tilde(args, rep: Report) -> int:
    s = _complex(args.file)
    _spec_errors(s)
    ts = tilde_spec(s)
    rep.say(fileformat.print_spec(ts).rstrip("\n"))
    r = check_alpha_chain(s, _window(args, s.window, s.basis))
    rep.put("generators", ",".join(g.name for g in ts.generators))
    rep.put("alpha_chain_ok", r.ok)
    return OK if r.ok else FAIL


def cmd_tilde_homology(args, rep: Report) -> int:
    s = _complex(args.file)
    _spec_errors(s)
    return _report_homology(rep, tilde_homology(s, _window(args, s.window, s.basis)))


def cmd_sseq(args, rep: Report) -> int:
    s = _complex(args.file)
    _spec_errors(s)
    e0, e1 = pages(s, _window(args, s.window, s.basis))
    rep.say(f"{'level':>6} {'deg':>6} {'E0':>5} {'E1':>5}")
    for key in sorted(e0.dims):
        rep.say(f"{str(key[0]):>6} {str(key[1]):>6} {e0.dims[key]:>5} {e1.dims.get(key, 0):>5}")
    rep.put("E0", ",".join(f"{lv}/{d}:{v}" for (lv, d), v in sorted(e0.dims.items())))
    rep.put("E1", ",".join(f"{lv}/{d}:{v}" for (lv, d), v in sorted(e1.dims.items())))
    rep.put("d0_zero", not any(e0.d_ranks.values()))
    return OK


def cmd_fine(args, rep: Report) -> int:
    f = _fine(args.file)
    w = _window(args, f.window, f.bar_basis)
    if args.fine_cmd == "check-d2":
        return _report_check(rep, check_dF_squared(f, w))
    return _report_homology(rep, fine_homology(f, w))


def _pairs(items, what):
    out = {}
    for item in items or []:
        k, sep, v = item.partition("=")
        if not sep or not k.strip():
            raise InputError(f"bad {what} {item!r}; expected NAME=VALUE")
        out[k.strip()] = v.strip()
    return out


def cmd_symmetrize(args, rep: Report) -> int:
    f = _fine(args.file)
    g = symmetrize(f, _pairs(args.ident, "identification"))
    rep.say(fileformat.print_spec(g).rstrip("\n"))
    rep.put("ok", True)
    return OK


def cmd_chain_map(args, rep: Report) -> int:
    src, tgt = _complex(args.source), _complex(args.target)
    phi = _pairs(args.map, "map entry")
    for name in phi:
        if name not in src.alg._pos:
            raise InputError(f"unknown source generator {name!r}")
    for g in src.generators:
        phi.setdefault(g.name, "0")
    phi = {k: tgt.el(v) for k, v in phi.items()}
    r = check_chain_map(phi, src, tgt, _window(args, src.window, src.basis), args.shift)
    rep.put("ok", r.ok)
    if r.ok:
        rep.say("phi d = d phi in the window")
        return OK
    rep.say(f"fails on {r.offender}: {format_element(r.residual)}")
    rep.put("offender", r.offender)
    rep.put("residual", format_element(r.residual))
    return FAIL


def _tree(path: str) -> ClusterTree:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno}, col {e.colno}") from None
    try:
        edges = tuple(tuple(e) for e in data["edges"])
        lengths = {}
        for key, val in data.get("lengths", {}).items():
            p, _, c = key.partition("->")
            lengths[(p, c)] = Fraction(val)
        return ClusterTree(
            vertices=tuple(data["vertices"]), root=data["root"], edges=edges,
            disk=frozenset(data["disk"]),
            markers={int(k): v for k, v in data["markers"].items()},
            n1=int(data["n1"]), n2=int(data.get("n2", 0)),
            classes={k: tuple(v) for k, v in data.get("classes", {}).items()},
            lengths=lengths, constant=frozenset(data.get("constant", ())))
    except (KeyError, TypeError, ValueError, ZeroDivisionError, AttributeError) as e:
        raise InputError(f"{path}: malformed tree ({e})") from None


def cmd_trees(args, rep: Report) -> int:
    if args.trees_cmd == "validate":
        t = _tree(args.file)
        bad = validate_tree(t)
        for v in bad:
            rep.say(f"[{v.kind}] {v.message}")
        rep.say("valid tree" if not bad else f"{len(bad)} violation(s)")
        rep.put("valid", not bad)
        rep.put("kinds", ",".join(sorted({v.kind for v in bad})))
        return FAIL if bad else OK
    s = _load(args.file)
    if isinstance(s, FineSpec):
        s = s.spec
    alg = s.alg
    if args.trees_cmd == "dim":
        def deg(name):
            if name not in alg._pos:
                raise InputError(f"unknown generator {name!r}")
            return alg.gen(name).degree
        ends = [deg(n) for n in filter(None, (args.ends or "").split(","))]
        lam = _exponent(args.lam, s.basis)
        target = deg(args.target) if args.target else None
        mode = "fine" if target is not None else "cluster"
        dim = expected_dimension(deg(args.x), ends, lam, s.basis, mode, target)
        rep.say(f"expected dimension {dim}")
        rep.put("dimension", dim)
        return OK
    # splittings
    if args.check:
        ok, details = d_squared_consistency(s, _window(args, s.window, s.basis))
        for name, (re_d, res) in details.items():
            rep.say(f"{name}: rederived {format_element(re_d)} | leibniz {format_element(res)}")
        rep.put("consistent", ok)
        return OK if ok else FAIL
    word = [n for n in (args.word or "").split(",") if n]
    for n in word:
        if n not in alg._pos:
            raise InputError(f"unknown generator {n!r}")
    S = sorted(alg.pos(n) for n in word)
    lam = _exponent(args.lam, s.basis)
    ranges = [(0, max(v, 0)) for v in lam]
    sps = boundary_splittings(S, lam, alg.generators, ranges)
    name = lambda i: alg.generators[i].name
    for sp in sps:
        left = [name(S[k]) for k in sp.left]
        right = [name(S[k]) for k in sp.right]
        rep.say(f"S'={left} y={name(sp.y)} S''={right} lam'={sp.lam_left} "
                f"lam''={sp.lam_right} sign={sp.sign:+d}")
    rep.put("count", len(sps))
    return OK


def cmd_example(args, rep: Report) -> int:
    rep.kv_to_err = True
    if args.which == "s1":
        s = example_s1(area=Fraction(args.area))
    elif args.which == "no-bubbling":
        gens, d0 = PATTERNS[args.pattern]
        s = example_no_bubbling(gens, d0, w=Window(max_word_len=6, degrees=(-6, 6)),
                                label=args.pattern)
    else:
        s = builtin_circle_line(sign=+1 if args.control else -1)
    rep.say(fileformat.print_spec(s).rstrip("\n"))
    rep.put("label", s.label)
    return OK


def cmd_maslov_scan(args, rep: Report) -> int:
    v = maslov_scan(args.n)
    for st in v.log:
        rep.say(f"accept [{st.branch}] {st.equation()}")
    for st, why in v.rejected:
        rep.say(f"reject [{st.branch}] {st.equation()}: {why}")
    for note in v.notes:
        rep.say(f"note: {note}")
    req = sorted(v.required_set, reverse=True)
    rep.say("required Maslov values: {" + ",".join(map(str, req)) + "}")
    rep.put("n", v.n)
    rep.put("parity", v.parity)
    rep.put("required", ",".join(map(str, req)))
    rep.put("all_even", all(st.mu % 2 == 0 for st in v.log))
    rep.put("equations_hold", all(st.holds() for st in v.log))
    return OK


# ---- argument parsing ----------------------------------------------------------------

def _window_opts(p):
    p.add_argument("--max-word-len", type=int)
    p.add_argument("--weight-cutoff")
    p.add_argument("--degrees", metavar="LO..HI")
    p.add_argument("--box", action="append", metavar="CLASS=LO..HI")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clusterhom",
                                 description="Windowed homology of cluster and fine Floer complexes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def file_cmd(name, func, help_, window=True):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file")
        if window:
            _window_opts(p)
        p.set_defaults(func=func)
        return p

    file_cmd("validate", cmd_validate, "structural checks of a spec", window=False)
    file_cmd("check-d2", cmd_check_d2, "check d^2 = 0 in the window")
    file_cmd("homology", cmd_homology, "certified windowed homology")
    file_cmd("free-terms", cmd_free_terms, "list free terms", window=False)
    file_cmd("certify", cmd_certify, "acyclicity certificate from a free term")
    file_cmd("minimal-model", cmd_minimal_model, "eliminate d0 pairs")
    file_cmd("tilde", cmd_tilde, "print the tilde module spec")
    file_cmd("tilde-homology", cmd_tilde_homology, "homology of the tilde module")
    file_cmd("sseq", cmd_sseq, "E0 and E1 of the word-area filtration")

    p = sub.add_parser("fine", help="fine Floer complexes")
    p.add_argument("fine_cmd", choices=["check-d2", "homology"])
    p.add_argument("file")
    _window_opts(p)
    p.set_defaults(func=cmd_fine)

    p = file_cmd("symmetrize", cmd_symmetrize, "identify cl1 generators with cl0 ones", False)
    p.add_argument("--ident", action="append", metavar="CL1=CL0", required=True)

    p = sub.add_parser("chain-map", help="check an algebra morphism between two specs")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--map", action="append", metavar="GEN=EXPR")
    p.add_argument("--shift", default="0")
    _window_opts(p)
    p.set_defaults(func=cmd_chain_map)

    p = sub.add_parser("trees", help="tree combinatorics")
    p.add_argument("trees_cmd", choices=["validate", "dim", "splittings"])
    p.add_argument("file", help="tree JSON (validate) or spec file")
    p.add_argument("--x", help="generator at the root (dim)")
    p.add_argument("--ends", help="comma-separated end generators (dim)")
    p.add_argument("--target", help="target intersection generator (fine dim)")
    p.add_argument("--lam", help="class exponent, e.g. lam0=1")
    p.add_argument("--word", help="comma-separated generators of S (splittings)")
    p.add_argument("--check", action="store_true", help="re-derive d^2 from splittings")
    _window_opts(p)
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("example", help="print a built-in spec")
    p.add_argument("which", choices=["s1", "no-bubbling", "circle-line"])
    p.add_argument("--pattern", choices=sorted(PATTERNS), default="s1")
    p.add_argument("--area", default="1")
    p.add_argument("--control", action="store_true", help="circle-line with the flipped sign")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("maslov-scan", help="Maslov bookkeeping for S^1 x S^(n-1)")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_maslov_scan)
    return ap


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return BAD_INPUT if e.code else OK
    rep = Report(args.command)
    try:
        code = args.func(args, rep)
    except (InputError, SpecError, WindowError) as e:
        if isinstance(e, ParseError) and e.line is not None:
            rep.put("line", e.line)
            rep.put("col", e.col)
        print(f"error: {e}", file=err)
        rep.put("error", str(e))
        rep.emit(out, "input-error", err)
        return BAD_INPUT
    except MathFailure as e:
        print(f"failure: {e}", file=err)
        rep.put("error", str(e))
        if e.residual is not None:
            rep.put("residual", format_element(e.residual))
        rep.emit(out, "fail", err)
        return FAIL
    except (ValueError, ZeroDivisionError) as e:
        print(f"error: {e}", file=err)
        rep.put("error", str(e))
        rep.emit(out, "input-error", err)
        return BAD_INPUT
    rep.emit(out, {OK: "pass", FAIL: "fail"}.get(code, "input-error"), err)
    return code


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
