"""Golden-file fixtures for the explicit charges at n=3, L=2.

Two kinds of text live under ``data/``:

* ``transcribed/*.expr``: hand transcriptions of the displayed operators in a
  small expression language (see :func:`parse_expression`);
* ``golden/*.golden``: the normal form of each transcription, written by
  :func:`write_goldens` in the engine's own rendering.  The same reader parses
  both, so a golden file is compared semantically, not textually.

Expression language.  ``+ - * / ^`` with the usual precedence, parentheses or
square brackets for grouping, integer literals, negative integer exponents.
Atoms::

    tau  i  sqrt3  zeta(m,k)  lambda  mu0..  hbar  eps
    q1..  p1..           positions and momenta
    Q1..                 branch rotation of a particle
    PX12  X[2,1]         position exchange (pair, or image list)
    P12  G1  E(r,c)      spin exchange, spin grading, spin matrix unit

Products keep their written order, so ``p1*f`` picks up derivative terms.
Division is only by expressions that reduce to a rational function.
"""
from __future__ import annotations

import difflib
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cyclotomic import CycNum, root
from .dunkl import (
    Algebra,
    AlgebraElem,
    DunklSpec,
    SpinPosOp,
    _with_aux,
    dunkl_operators,
    power_sum,
    projector_P,
    projector_Q,
    spin_grading,
    spin_layout,
    spin_permutation,
    tilde_charges,
    transposition,
)
from .polyrat import RatFun, invert
from .report import CheckResult
from .tensor_ops import SparseOp

DATA_DIR = Path(__file__).parent / "data"
TRANSCRIBED_DIR = DATA_DIR / "transcribed"
GOLDEN_DIR = DATA_DIR / "golden"
DIFF_LINES = 40


class FixtureSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: {message}")
        self.line, self.column = line, col


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))", re.S)


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


def strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


class _Parser:
    def __init__(self, text: str, alg: Algebra, layout):
        self.text = text
        self.alg = alg
        self.layout = layout
        self.toks = _tokenize(text)
        self.i = 0

    # helpers -----------------------------------------------------------
    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise FixtureSyntaxError(msg, self.text, tok[2])

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            self.error(f"expected '{op}'", t)
        return t

    def lift(self, x) -> SpinPosOp:
        if isinstance(x, SpinPosOp):
            return x
        if isinstance(x, SparseOp):
            return SpinPosOp.from_sparse(self.alg, x)
        if not isinstance(x, AlgebraElem):
            x = self.alg.scalar(x)
        return SpinPosOp.scalar(self.alg, self.layout, x)

    def as_ratfun(self, v: SpinPosOp):
        """The rational function f if v = f * identity, else None."""
        alg = self.alg
        key = (alg.zero_alpha, alg.identity_word)
        f = None
        if len(v.entries) != self.layout.size:
            return RatFun.const(alg.ring, 0) if v.is_zero() else None
        for (r, c), el in v.entries.items():
            if r != c or set(el.terms) != {key}:
                return None
            g = el.terms[key]
            if f is None:
                f = g
            elif not (f - g).is_zero():
                return None
        return f

    def inverse(self, v: SpinPosOp, tok) -> SpinPosOp:
        f = self.as_ratfun(v)
        if f is not None:
            return self.lift(invert(f))
        one = self.lift(1)
        acc = v
        for _ in range(48):
            nxt = acc * v
            if nxt == one:
                return acc
            acc = nxt
        self.error("cannot invert this factor", tok)

    # grammar -----------------------------------------------------------
    def parse(self) -> SpinPosOp:
        v = self.expr()
        if self.peek()[0] != "end":
            self.error("unexpected input")
        return v

    def expr(self) -> SpinPosOp:
        t = self.peek()
        neg = False
        if t[0] == "op" and t[1] in "+-":
            self.take()
            neg = t[1] == "-"
        v = self.term()
        if neg:
            v = -v
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                w = self.term()
                v = v + w if t[1] == "+" else v - w
            else:
                return v

    def term(self) -> SpinPosOp:
        v = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                v = v * self.unary()
            elif t[0] == "op" and t[1] == "/":
                self.take()
                w = self.unary()
                v = v * self.inverse(w, t)
            else:
                return v

    def unary(self) -> SpinPosOp:
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> SpinPosOp:
        base_tok = self.peek()
        v = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                neg = True
            e = self.take()
            if e[0] != "num":
                self.error("expected an integer exponent", e)
            if neg:
                v = self.inverse(v, base_tok)
            out = self.lift(1)
            for _ in range(e[1]):
                out = out * v
            return out
        return v

    def int_args(self, count: int) -> list[int]:
        self.expect("(")
        out = []
        for k in range(count):
            neg = False
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                neg = True
            t = self.take()
            if t[0] != "num":
                self.error("expected an integer", t)
            out.append(-t[1] if neg else t[1])
            if k < count - 1:
                self.expect(",")
        self.expect(")")
        return out

    def particle(self, tok, digits: str, count: int) -> list[int]:
        if len(digits) != count or not digits.isdigit():
            self.error(f"expected {count} particle digit(s)", tok)
        out = [int(d) - 1 for d in digits]
        if any(not 0 <= d < self.alg.L for d in out):
            self.error("particle index out of range", tok)
        return out

    def atom(self) -> SpinPosOp:
        alg = self.alg
        t = self.take()
        kind, val, _ = t
        if kind == "num":
            return self.lift(val)
        if kind == "op" and val in "([":
            v = self.expr()
            self.expect(")" if val == "(" else "]")
            return v
        if kind != "name":
            self.error(f"unexpected '{val}'", t)
        m = alg.order
        if val == "tau":
            return self.lift(RatFun.const(alg.ring, alg.tau(1)))
        if val == "i":
            return self.lift(RatFun.const(alg.ring, alg.i_unit))
        if val == "sqrt3":
            if m % 12:
                self.error("sqrt3 needs a field order divisible by 12", t)
            return self.lift(RatFun.const(alg.ring, root(12, 1) + root(12, 11)))
        if val == "zeta":
            mm, k = self.int_args(2)
            if m % mm:
                self.error(f"zeta({mm},.) is not in the working field of order {m}", t)
            return self.lift(RatFun.const(alg.ring, root(m, (m // mm) * k)))
        if val == "lambda":
            return self.lift(alg.lam)
        if val == "hbar":
            return self.lift(alg.hbar)
        if val == "eps":
            return self.lift(alg.spec.eps)
        if val == "E":
            r, c = self.int_args(2)
            if not (0 <= r < self.layout.size and 0 <= c < self.layout.size):
                self.error("matrix unit out of range", t)
            return self.lift(SparseOp.from_entries(self.layout, m, [((r, c), CycNum.one(m))]))
        if val == "X":
            self.expect("[")
            images = []
            while True:
                n_ = self.take()
                if n_[0] != "num":
                    self.error("expected a particle number", n_)
                images.append(n_[1] - 1)
                if self.peek()[1] == ",":
                    self.take()
                    continue
                break
            self.expect("]")
            if sorted(images) != list(range(alg.L)):
                self.error("X[...] must list a permutation of the particles", t)
            return self.lift(alg.word(((0,) * alg.L, tuple(images))))
        mt = re.fullmatch(r"(mu|q|p|Q|PX|P|G)(\d+)", val)
        if mt is None:
            self.error(f"unknown name '{val}'", t)
        head, digits = mt.groups()
        if head == "mu":
            k = int(digits)
            if k >= alg.n:
                self.error("mu index out of range", t)
            return self.lift(alg.mu(k))
        if head in ("PX", "P"):
            a, b = self.particle(t, digits, 2)
            if a == b:
                self.error("exchange needs two different particles", t)
            if head == "PX":
                return self.lift(alg.word(transposition(alg.L, a, b)))
            return self.lift(spin_permutation(alg, self.layout, transposition(alg.L, a, b)[1]))
        (a,) = self.particle(t, digits, 1)
        if head == "q":
            return self.lift(alg.q(a))
        if head == "p":
            return self.lift(alg.p(a))
        if head == "Q":
            return self.lift(alg.Q(a))
        return self.lift(spin_grading(alg, self.layout, self.layout.n_aux + a))


def parse_expression(text: str, alg: Algebra, layout=None) -> SpinPosOp:
    """Parse into an operator on ``layout`` (default: spin space of the model)."""
    layout = layout or spin_layout(alg.spec)
    return _Parser(strip_comments(text), alg, layout).parse()


def parse_charge(text: str, alg: Algebra) -> AlgebraElem:
    """Parse a spinless expression into an algebra element."""
    from .tensor_ops import SpaceLayout

    v = parse_expression(text, alg, SpaceLayout((1,) * alg.L))
    return v.entries.get((0, 0), alg.zero())


def header(text: str) -> dict:
    """``# key: value`` lines at the top of a fixture file."""
    out = {}
    for line in text.splitlines():
        s = line.strip()
        if not s.startswith("#"):
            if s:
                break
            continue
        body = s[1:].strip()
        if ":" in body:
            k, v = body.split(":", 1)
            out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# hbar handling


def set_hbar(f: RatFun, value) -> RatFun:
    ring = f.ring
    if value is None:
        return f
    return RatFun(ring, f.num.evaluate({ring.hbar_index: ring.scalar(value)}), dict(f.den))


def _sample_point(ring):
    vals = {}
    primes = [Fraction(3), Fraction(7, 2), Fraction(-5, 3), Fraction(11, 4), Fraction(13, 5), Fraction(-17, 6)]
    for idx in range(ring.nvars):
        vals[idx] = ring.scalar(primes[idx % len(primes)] + idx)
    return vals


def parse_hbar(text: str, alg: Algebra):
    """'symbolic' or a constant expression such as 'zeta(12,3)' or '-i'."""
    t = text.strip()
    if t == "symbolic":
        return None
    v = parse_charge(t, alg)
    f = v.terms.get((alg.zero_alpha, alg.identity_word))
    if len(v.terms) > 1 or (f is not None and not f.is_const()):
        raise ValueError(f"hbar value must be a constant, got {t!r}")
    return _const(f) if f is not None else CycNum.zero(alg.order)


def render_hbar(value) -> str:
    from .cyclotomic import render

    return "symbolic" if value is None else render(value)


@dataclass
class Calibration:
    value: object  # CycNum or None
    source: int | None
    log: list


def calibrate_hbar(alg: Algebra, engine: dict, printed: dict) -> Calibration:
    """Fix the hbar value implicit in displayed charges.

    Charges are visited in increasing order.  For each, the momentum-carrying
    part of engine - printed is a polynomial in hbar; a charge on which it is
    identically zero places no constraint and the next one is tried.  The
    first constraining charge must be affine in hbar with a single constant
    root, which is then frozen.
    """
    ring = alg.ring
    log = []
    for k in sorted(engine):
        D = engine[k] - printed[k]
        moving = {key: v for key, v in D.terms.items() if any(key[0])}
        if not moving:
            log.append(f"I^({k}): momentum terms agree for every hbar")
            continue
        pt = _sample_point(ring)
        root_val = None
        for key in sorted(moving, key=str):
            f = moving[key]
            A = set_hbar(f, 0)
            B = set_hbar(f, 1) - A
            C = set_hbar(f, 2) - A - B * 2
            if not C.is_zero():
                log.append(f"I^({k}): momentum terms are not affine in hbar")
                return Calibration(None, k, log)
            if B.is_zero():
                log.append(f"I^({k}): an hbar-free momentum term disagrees")
                return Calibration(None, k, log)
            pt_vals = dict(pt)
            pt_vals.pop(ring.hbar_index)
            a = _const(A.evaluate(pt_vals))
            b = _const(B.evaluate(pt_vals))
            root_val = -(a / b)
            break
        bad = [key for key, f in moving.items() if not set_hbar(f, root_val).is_zero()]
        if bad:
            log.append(f"I^({k}): no single hbar value reconciles the momentum terms")
            return Calibration(None, k, log)
        log.append(f"I^({k}): momentum terms fix hbar = {render_hbar(root_val)}")
        return Calibration(root_val, k, log)
    return Calibration(None, None, log)


def _const(f: RatFun):
    if f.is_zero():
        return CycNum.zero(f.ring.order)
    if not f.is_const():
        raise ValueError("sample evaluation left free variables")
    return next(iter(f.num.terms.values()))


# ---------------------------------------------------------------------------
# fixture registry

CHARGE_SPEC = dict(n=3, L=2, mu="zero")
TILDE_SPEC = dict(n=3, L=2, N=3, multiplicities=(1, 1, 1), mu="zero")

FIXTURES = {
    "I1": ("charge", 1),
    "I2": ("charge", 2),
    "I3": ("charge", 3),
    "Itilde3_eps+1": ("tilde", 3, 1),
    "Itilde3_eps-1": ("tilde", 3, -1),
}


def transcription(name: str, directory: Path | None = None) -> str:
    kind = FIXTURES[name][0]
    stem = name if kind == "charge" else "Itilde3"
    return ((directory or TRANSCRIBED_DIR) / f"{stem}.expr").read_text()


def charge_algebra() -> Algebra:
    return Algebra(DunklSpec(**CHARGE_SPEC))


def tilde_algebra(eps: int) -> Algebra:
    return Algebra(DunklSpec(eps=eps, **TILDE_SPEC))


def engine_charges(alg: Algebra, ks=(1, 2, 3)) -> dict:
    ds = dunkl_operators(alg)
    return {k: power_sum(alg, k, ds) for k in ks}


def printed_charges(alg: Algebra, directory: Path | None = None) -> dict:
    return {FIXTURES[nm][1]: parse_charge(transcription(nm, directory), alg) for nm in ("I1", "I2", "I3")}


def lambda_full(alg: Algebra) -> SpinPosOp:
    return projector_P(alg) * projector_Q(alg)


def expected_from_transcription(name: str, hbar, directory: Path | None = None):
    """Normal form of a transcription with hbar frozen; SpinPosOp for the projected charge."""
    entry = FIXTURES[name]
    if entry[0] == "charge":
        alg = charge_algebra()
        v = parse_charge(transcription(name, directory), alg)
        return alg, v.map_coeffs(lambda f: set_hbar(f, hbar))
    alg = tilde_algebra(entry[2])
    v = parse_expression(transcription(name, directory), alg) * lambda_full(alg)
    return alg, v.map_coeffs(lambda f: set_hbar(f, hbar))


def engine_value(name: str, hbar):
    entry = FIXTURES[name]
    if entry[0] == "charge":
        alg = charge_algebra()
        v = power_sum(alg, entry[1])
        return alg, v.map_coeffs(lambda f: set_hbar(f, hbar))
    alg = tilde_algebra(entry[2])
    v = tilde_charges(alg, entry[1])
    return alg, v.map_coeffs(lambda f: set_hbar(f, hbar))


def calibrated_hbar(directory: Path | None = None) -> Calibration:
    alg = charge_algebra()
    return calibrate_hbar(alg, engine_charges(alg), printed_charges(alg, directory))


def golden_text(name: str, hbar) -> str:
    _, v = expected_from_transcription(name, hbar)
    entry = FIXTURES[name]
    lines = [
        f"# fixture: {name}",
        f"# kind: {entry[0]}",
        f"# order: {entry[1]}",
        f"# hbar: {render_hbar(hbar)}",
    ]
    if entry[0] == "tilde":
        lines.append(f"# eps: {entry[2]}")
        lines.append("# right-composed with Lambda_P Lambda_Q")
    return "\n".join(lines) + "\n" + v.render() + "\n"


def write_goldens(directory: Path | None = None, force: bool = False, names=None) -> list[Path]:
    """Regenerate golden files from the transcriptions.  Refuses to overwrite unless ``force``."""
    directory = Path(directory or GOLDEN_DIR)
    names = list(names or FIXTURES)
    targets = [directory / f"{nm}.golden" for nm in names]
    existing = [p for p in targets if p.exists()]
    if existing and not force:
        raise FileExistsError(
            "refusing to overwrite " + ", ".join(str(p) for p in existing) + " (pass force=True / --force)"
        )
    cal = calibrated_hbar()
    directory.mkdir(parents=True, exist_ok=True)
    for nm, path in zip(names, targets):
        path.write_text(golden_text(nm, cal.value))
    return targets


def read_golden(name: str, directory: Path | None = None):
    text = ((directory or GOLDEN_DIR) / f"{name}.golden").read_text()
    return text


def compare_golden(name: str, directory: Path | None = None, golden: str | None = None) -> CheckResult:
    """Engine result vs the golden file, as an exact operator identity; witness is a rendered diff."""
    text = golden if golden is not None else read_golden(name, directory)
    meta = header(text)
    entry = FIXTURES[name]
    alg, eng = engine_value(name, None)
    hbar = parse_hbar(meta.get("hbar", "symbolic"), alg)
    eng = eng.map_coeffs(lambda f: set_hbar(f, hbar))
    try:
        if entry[0] == "charge":
            gold = parse_charge(text, alg)
        else:
            gold = parse_expression(text, alg)
    except FixtureSyntaxError as exc:
        return CheckResult(f"fixture {name}", False, f"golden file does not parse: {exc}")
    ok = (eng - gold).is_zero()
    title = f"fixture {name} (hbar = {render_hbar(hbar)})"
    if ok:
        return CheckResult(title, True)
    diff = difflib.unified_diff(
        gold.render().splitlines(), eng.render().splitlines(), "golden", "engine", lineterm="", n=0
    )
    lines = list(diff)
    if len(lines) > DIFF_LINES:
        lines = lines[:DIFF_LINES] + [f"... ({len(lines) - DIFF_LINES} more diff lines)"]
    return CheckResult(title, False, "\n".join(lines))


def diagnose_tilde(eps: int = 1) -> dict:
    """Relate the projected charge to the displayed one: overall factor and grading order."""
    alg = tilde_algebra(eps)
    cal = calibrated_hbar()
    Lam = lambda_full(alg)
    eng = tilde_charges(alg, 3).map_coeffs(lambda f: set_hbar(f, cal.value))
    shown = (parse_expression(transcription(f"Itilde3_eps{eps:+d}"), alg) * Lam).map_coeffs(lambda f: set_hbar(f, cal.value))
    out = {"verbatim": (eng - shown).is_zero(), "times_n": (eng - shown.scale(alg.n)).is_zero()}
    alt = TRANSCRIBED_DIR / "Itilde3_reordered.expr"
    if alt.exists():
        fixed = (parse_expression(alt.read_text(), alg) * Lam).map_coeffs(lambda f: set_hbar(f, cal.value))
        out["times_n_reordered"] = (eng - fixed.scale(alg.n)).is_zero()
    return out
