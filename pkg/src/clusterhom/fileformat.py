"""Reading and writing complex (``.cx``) and fine (``.fx``) files.

One declaration per line, ``#`` starts a comment.  ``print_spec`` emits the
canonical form, and ``parse_text(print_spec(s)) == s`` for every spec.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from .algebra import GradedAlgebra, Generator, Window
from .complex import ComplexSpec
from .errors import ParseError
from .expr import format_element, parse_element
from .fine import FineSpec
from .novikov import ClassBasis, ClassEntry

IDENT = r"[A-Za-z_][A-Za-z0-9_']*"
_SECTION = re.compile(r"^\[([A-Za-z0-9_.]+)\]$")
_RAT = re.compile(r"^-?\d+(?:/\d+)?$")
_INT = re.compile(r"^-?\d+$")
_ATTR = re.compile(r"^(" + IDENT + r")=(\S+)$")

COMPLEX_SECTIONS = ("config", "classes", "generators", "order", "differential")
FINE_SECTIONS = ("config", "bar_classes", "cl0.classes", "cl0.generators", "cl0.differential",
                 "cl1.classes", "cl1.generators", "cl1.differential", "intersections",
                 "fine_differential")


def fmt_rat(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def fmt_num(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class _Line:
    __slots__ = ("no", "text", "col")

    def __init__(self, no, text, col):
        self.no, self.text, self.col = no, text, col

    def err(self, msg, col=None):
        return ParseError(msg, self.no, self.col if col is None else col)


def _rational(tok: str, line: _Line, what: str, col=None) -> Fraction:
    if not _RAT.match(tok):
        raise line.err(f"malformed {what} {tok!r}", col)
    num, _, den = tok.partition("/")
    if den and int(den) == 0:
        raise line.err(f"zero denominator in {what}", col)
    return Fraction(int(num), int(den) if den else 1)


def _split_sections(text: str) -> dict:
    sections: dict = {}
    current = None
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        m = _SECTION.match(stripped)
        if m:
            current = m.group(1)
            if current in sections:
                raise ParseError(f"duplicate section [{current}]", no, col)
            sections[current] = []
            continue
        if stripped.startswith("["):
            raise ParseError("malformed section header", no, col)
        if current is None:
            raise ParseError("declaration outside of any section", no, col)
        sections[current].append(_Line(no, stripped, col))
    return sections


def _attrs(line: _Line, expected: dict) -> tuple:
    toks = line.text.split()
    name = toks[0]
    if not re.fullmatch(IDENT, name):
        raise line.err(f"invalid name {name!r}")
    out = {}
    pos = line.col + len(name) + 1
    for tok in toks[1:]:
        col = line.col + line.text.index(tok, pos - line.col)
        m = _ATTR.match(tok)
        if not m:
            raise line.err(f"expected key=value, got {tok!r}", col)
        key, val = m.groups()
        if key not in expected:
            raise line.err(f"unknown attribute {key!r}", col)
        if key in out:
            raise line.err(f"repeated attribute {key!r}", col)
        out[key] = (val, col)
        pos = col + len(tok)
    for key, required in expected.items():
        if required and key not in out:
            raise line.err(f"missing attribute {key!r}")
    return name, out


def _classes(lines, epsilon) -> ClassBasis:
    entries, seen = [], set()
    for ln in lines:
        name, at = _attrs(ln, {"maslov": True, "area": True})
        if name in seen:
            raise ln.err(f"duplicate class {name!r}")
        seen.add(name)
        mu_s, mcol = at["maslov"]
        if not _INT.match(mu_s):
            raise ln.err(f"Maslov index must be an integer, got {mu_s!r}", mcol)
        area = _rational(at["area"][0], ln, "area", at["area"][1])
        if area < 0:
            raise ln.err("area must be non-negative", at["area"][1])
        entries.append(ClassEntry(name, int(mu_s), area))
    return ClassBasis(tuple(entries), epsilon)


def _generators(lines, order_lines=None) -> list:
    gens, seen = [], set()
    for ln in lines:
        name, at = _attrs(ln, {"index": True, "kind": False})
        if name in seen:
            raise ln.err(f"duplicate generator {name!r}")
        seen.add(name)
        kind = at.get("kind", ("crit", 0))[0]
        if kind not in ("crit", "bar", "intersection"):
            raise ln.err(f"unknown generator kind {kind!r}", at["kind"][1])
        idx = _rational(at["index"][0], ln, "index", at["index"][1])
        if kind == "crit" and (idx.denominator != 1 or idx < 0):
            raise ln.err("index must be a non-negative integer", at["index"][1])
        if idx.denominator not in (1, 2):
            raise ln.err("index must have denominator 1 or 2", at["index"][1])
        gens.append(Generator(name, idx, kind))
    if order_lines:
        names = [tok for ln in order_lines for tok in ln.text.split()]
        by_name = {g.name: g for g in gens}
        if sorted(names) != sorted(by_name):
            ln = order_lines[0]
            raise ln.err("[order] must list every generator exactly once")
        gens = [by_name[n] for n in names]
    return gens


def _intersections(lines) -> list:
    out, seen = [], set()
    for ln in lines:
        name, at = _attrs(ln, {"degree": True})
        if name in seen:
            raise ln.err(f"duplicate intersection {name!r}")
        seen.add(name)
        deg = _rational(at["degree"][0], ln, "degree", at["degree"][1])
        if deg.denominator not in (1, 2):
            raise ln.err("degree must have denominator 1 or 2", at["degree"][1])
        out.append(Generator(name, deg + 1, "intersection"))
    return out


_DLINE = re.compile(r"^d\s+(" + IDENT + r")\s*=(.*)$")


def _differential(lines, alg: GradedAlgebra, allowed=None) -> dict:
    diff = {}
    for ln in lines:
        m = _DLINE.match(ln.text)
        if not m:
            raise ln.err("expected 'd NAME = expression'")
        name, rhs = m.group(1), m.group(2)
        if name not in alg._pos or (allowed is not None and name not in allowed):
            raise ln.err(f"unknown generator {name!r}", ln.col + ln.text.index(name, 1))
        if name in diff:
            raise ln.err(f"differential of {name!r} given twice")
        if not rhs.strip():
            raise ln.err("empty right-hand side", ln.col + len(ln.text))
        diff[name] = parse_element(rhs, alg, ln.no, ln.col - 1 + m.start(2))
    return diff


def _config(lines) -> tuple:
    eps = Fraction(1)
    label = ""
    win: dict = {}
    box: dict = {}
    for ln in lines:
        if "=" not in ln.text:
            raise ln.err("expected key = value")
        key, _, val = (s.strip() for s in ln.text.partition("="))
        vcol = ln.col + ln.text.index("=") + 1 + (len(ln.text.partition("=")[2]) -
                                                 len(ln.text.partition("=")[2].lstrip()))
        if key == "label":
            label = val
        elif key == "epsilon_D":
            eps = _rational(val, ln, "epsilon_D", vcol)
            if eps <= 0:
                raise ln.err("epsilon_D must be positive", vcol)
        elif key == "window.weight_cutoff":
            win["weight_cutoff"] = _rational(val, ln, "weight cutoff", vcol)
        elif key in ("window.max_word_len", "window.margin_box", "window.max_cells"):
            if not _INT.match(val) or int(val) < 0:
                raise ln.err(f"{key} must be a non-negative integer", vcol)
            win[key.split(".", 1)[1]] = int(val)
        elif key == "window.margin_weight":
            win["margin_weight"] = _rational(val, ln, "margin", vcol)
        elif key == "window.degrees":
            lo, hi = _range(val, ln, vcol, rational=True)
            if hi is None or lo > hi:
                raise ln.err("degree interval must be a non-empty closed range", vcol)
            win["degrees"] = (lo, hi)
        elif key.startswith("window.box."):
            cname = key[len("window.box."):]
            if not re.fullmatch(IDENT, cname):
                raise ln.err(f"invalid class name {cname!r}")
            lo, hi = _range(val, ln, vcol, rational=False)
            if hi is not None and lo > hi:
                raise ln.err("empty exponent range", vcol)
            box[cname] = (lo, hi)
        else:
            raise ln.err(f"unknown config key {key!r}")
    if box:
        win["box"] = box
    return eps, label, win


def _range(val, ln, col, rational):
    if ".." not in val:
        raise ln.err(f"expected lo..hi, got {val!r}", col)
    lo_s, hi_s = (s.strip() for s in val.split("..", 1))
    def conv(s):
        if rational:
            return _rational(s, ln, "bound", col)
        if not _INT.match(s):
            raise ln.err(f"exponent bound must be an integer, got {s!r}", col)
        return int(s)
    lo = conv(lo_s)
    hi = conv(hi_s) if hi_s else None
    return lo, hi


def _make_window(win: dict, basis_names, line_no=None) -> Optional[Window]:
    if not win:
        return None
    for cname in win.get("box", {}):
        if cname not in basis_names:
            raise ParseError(f"window box names unknown class {cname!r}", line_no)
    return Window(**win)


def parse_text(text: str):
    """Parse a complex or fine file; returns ComplexSpec or FineSpec."""
    secs = _split_sections(text)
    fine = any(k in secs for k in ("intersections", "fine_differential", "bar_classes"))
    allowed = FINE_SECTIONS if fine else COMPLEX_SECTIONS
    for k in secs:
        if k not in allowed:
            raise ParseError(f"unknown section [{k}]", _section_line(text, k), 1)
    eps, label, win = _config(secs.get("config", []))
    if not fine:
        basis = _classes(secs.get("classes", []), eps)
        gens = _generators(secs.get("generators", []), secs.get("order"))
        alg = GradedAlgebra(gens, basis)
        diff = _differential(secs.get("differential", []), alg)
        return ComplexSpec(alg, diff, label, _make_window(win, basis.names))
    bar_lines, embeds = [], {}
    for ln in secs.get("bar_classes", []):
        if ln.text.startswith("embed"):
            m = re.match(r"^embed\s+(cl[01])\.(" + IDENT + r")\s*=\s*(" + IDENT + r")$", ln.text)
            if not m:
                raise ln.err("expected 'embed clN.CLASS = BARCLASS'")
            key = (m.group(1), m.group(2))
            if key in embeds:
                raise ln.err(f"class {key[0]}.{key[1]} embedded twice")
            embeds[key] = (m.group(3), ln)
        else:
            bar_lines.append(ln)
    bar = _classes(bar_lines, eps)
    sides = {}
    for side in ("cl0", "cl1"):
        basis = _classes(secs.get(f"{side}.classes", []), eps)
        gens = _generators(secs.get(f"{side}.generators", []))
        alg = GradedAlgebra(gens, basis)
        diff = _differential(secs.get(f"{side}.differential", []), alg)
        sides[side] = ComplexSpec(alg, diff, side, None)
    for (side, cname), (tgt, ln) in embeds.items():
        if cname not in sides[side].basis.names:
            raise ln.err(f"unknown class {side}.{cname}")
        if tgt not in bar.names:
            raise ln.err(f"unknown bar class {tgt!r}")
    inters = _intersections(secs.get("intersections", []))
    window = _make_window(win, bar.names)
    from .errors import SpecError
    try:
        f = FineSpec(sides["cl0"], sides["cl1"], bar, {k: v[0] for k, v in embeds.items()},
                     inters, {}, label, window)
    except SpecError as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(str(e)) from None
    names = {g.name for g in inters}
    dF = _differential(secs.get("fine_differential", []), f.alg, allowed=names)
    return f.with_dF(dF)


def _section_line(text, name):
    for no, raw in enumerate(text.splitlines(), 1):
        if raw.strip().startswith(f"[{name}]"):
            return no
    return None


def _print_config(label, eps, w: Optional[Window], basis: ClassBasis) -> list:
    out = ["[config]"]
    if label:
        out.append(f"label = {label}")
    out.append(f"epsilon_D = {fmt_rat(eps)}")
    if w is not None:
        if w.weight_cutoff is not None:
            out.append(f"window.weight_cutoff = {fmt_rat(w.weight_cutoff)}")
        if w.max_word_len is not None:
            out.append(f"window.max_word_len = {w.max_word_len}")
        for name in basis.names:
            if name in w.box:
                lo, hi = w.box[name]
                out.append(f"window.box.{name} = {lo}..{'' if hi is None else hi}")
        if w.degrees is not None:
            out.append(f"window.degrees = {fmt_num(w.degrees[0])}..{fmt_num(w.degrees[1])}")
        d = Window()
        if w.margin_weight != d.margin_weight:
            out.append(f"window.margin_weight = {fmt_rat(w.margin_weight)}")
        if w.margin_box != d.margin_box:
            out.append(f"window.margin_box = {w.margin_box}")
        if w.max_cells != d.max_cells:
            out.append(f"window.max_cells = {w.max_cells}")
    return out


def _print_classes(header, basis: ClassBasis) -> list:
    return [header] + [f"{e.name} maslov={e.maslov} area={fmt_rat(e.area)}" for e in basis.entries]


def _print_gens(header, gens) -> list:
    out = [header]
    for g in gens:
        kind = "" if g.kind == "crit" else f" kind={g.kind}"
        out.append(f"{g.name} index={fmt_num(g.morse_index)}{kind}")
    return out


def _print_diff(header, spec: ComplexSpec, names) -> list:
    out = [header]
    for n in names:
        out.append(f"d {n} = {format_element(spec.d_gen(n))}")
    return out


def print_spec(spec) -> str:
    if isinstance(spec, FineSpec):
        return _print_fine(spec)
    lines = _print_config(spec.label, spec.basis.epsilon_D, spec.window, spec.basis)
    lines += _print_classes("[classes]", spec.basis)
    lines += _print_gens("[generators]", spec.generators)
    lines += _print_diff("[differential]", spec, [g.name for g in spec.generators])
    return "\n".join(lines) + "\n"


def _print_fine(f: FineSpec) -> str:
    lines = _print_config(f.label, f.bar_basis.epsilon_D, f.window, f.bar_basis)
    lines += _print_classes("[bar_classes]", f.bar_basis)
    for side, spec in (("cl0", f.cl0), ("cl1", f.cl1)):
        for e in spec.basis.entries:
            lines.append(f"embed {side}.{e.name} = {f.embeddings[(side, e.name)]}")
    for side, spec in (("cl0", f.cl0), ("cl1", f.cl1)):
        lines += _print_classes(f"[{side}.classes]", spec.basis)
        lines += _print_gens(f"[{side}.generators]", spec.generators)
        lines += _print_diff(f"[{side}.differential]", spec, [g.name for g in spec.generators])
    lines.append("[intersections]")
    for g in f.intersections:
        lines.append(f"{g.name} degree={fmt_num(g.degree)}")
    lines += _print_diff("[fine_differential]", f.spec, [g.name for g in f.intersections])
    return "\n".join(lines) + "\n"


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read())
