"""Line-oriented model descriptions.

    # comment
    kind = inner-gaudin
    n = 2
    N = 2
    multiplicities = 1, 1
    z = 1, 2, 3
    rep.site.2 = sym2

Scalars are exact: integers, ``p/q``, ``zeta(m,k)`` and ``i`` combined with
``+ - * /``.  Representations are ``fundamental``, ``sym2`` (symmetric square;
spin 1 for N=2) or inline matrices ``e11: 1,0;0,0 | e12: 0,1;0,0 | ...``
listing rho(e_ij) row by row.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cyclotomic import CycNum, field_order, imag_unit, root
from .errors import ValidationError

KINDS = ("inner-gaudin", "outer-gaudin", "dunkl")

ALLOWED = {
    "inner-gaudin": {"kind", "n", "N", "multiplicities", "z", "L"},
    "outer-gaudin": {"kind", "N", "eta", "z", "L", "signature", "K"},
    "dunkl": {"kind", "n", "L", "N", "multiplicities", "eps", "lambda", "mu", "truncation"},
}


class ModelSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, path: str = "<model>"):
        super().__init__(f"{path}:{line}:{column}: {message}")
        self.line, self.column = line, column


class UnknownKeyError(ModelSyntaxError):
    pass


@dataclass
class Entry:
    value: str
    line: int
    column: int  # 1-based column of the value


@dataclass
class ModelFile:
    kind: str
    spec: object
    entries: dict = field(default_factory=dict)
    path: str = "<model>"


# ---------------------------------------------------------------------------
# scalars


def parse_scalar(text: str, order: int, where=(1, 1), path="<model>") -> CycNum:
    """Exact value of an expression in integers, p/q, zeta(m,k) and i."""
    line, col0 = where
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ModelSyntaxError(f"bad number {text.strip()!r}", line, col0 + (exc.offset or 1) - 1, path) from None
    lead = len(text) - len(text.lstrip())

    def fail(node, msg):
        raise ModelSyntaxError(msg, line, col0 + lead + getattr(node, "col_offset", 0), path)

    def ev(node) -> CycNum:
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return CycNum.rational(node.value, order)
        if isinstance(node, ast.Name) and node.id == "i":
            if order % 4:
                fail(node, f"i is not in the field of order {order}")
            return imag_unit(order)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if b.is_zero():
                fail(node, "division by zero")
            return a / b
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "zeta":
            args = node.args
            if len(args) != 2 or not all(isinstance(a, ast.Constant) and isinstance(a.value, int) for a in args):
                fail(node, "zeta takes two integer arguments")
            m, k = args[0].value, args[1].value
            if m <= 0 or order % m:
                fail(node, f"zeta({m},{k}) is not in the field of order {order}")
            return root(order, (order // m) * k)
        fail(node, f"unsupported expression {ast.unparse(node)!r}")

    return ev(tree.body)


def parse_rational(text: str, where=(1, 1), path="<model>") -> Fraction:
    v = parse_scalar(text, 1, where, path)
    return v.to_fraction()


def split_top(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def _split(entry: Entry, sep: str = ","):
    """Split a value keeping track of columns."""
    out = []
    col = entry.column
    for piece in split_top(entry.value, sep):
        lead = len(piece) - len(piece.lstrip())
        out.append((piece.strip(), col + lead))
        col += len(piece) + 1
    return out


# ---------------------------------------------------------------------------
# reading


def read_entries(text: str, path: str = "<model>") -> dict:
    entries: dict = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            raise ModelSyntaxError("expected 'key = value'", ln, len(body) - len(body.lstrip()) + 1, path)
        key, value = body.split("=", 1)
        k = key.strip()
        kcol = len(key) - len(key.lstrip()) + 1
        if not k or any(ch.isspace() for ch in k):
            raise ModelSyntaxError(f"bad key {k!r}", ln, kcol, path)
        if k in entries:
            raise ModelSyntaxError(f"duplicate key {k!r} (first on line {entries[k].line})", ln, kcol, path)
        vcol = len(key) + 2 + (len(value) - len(value.lstrip()))
        if not value.strip():
            raise ModelSyntaxError(f"missing value for {k!r}", ln, vcol, path)
        entries[k] = Entry(value.strip(), ln, vcol)
    return entries


def _int(entries, key, path, default=None) -> int:
    e = entries.get(key)
    if e is None:
        if default is None:
            raise ModelSyntaxError(f"missing key {key!r}", 1, 1, path)
        return default
    try:
        return int(e.value)
    except ValueError:
        raise ModelSyntaxError(f"{key} must be an integer", e.line, e.column, path) from None


def _int_list(entries, key, path):
    e = entries.get(key)
    if e is None:
        return None
    out = []
    for piece, col in _split(e):
        try:
            out.append(int(piece))
        except ValueError:
            raise ModelSyntaxError(f"{key}: {piece!r} is not an integer", e.line, col, path) from None
    return tuple(out)


def _rational_list(entries, key, path):
    e = entries.get(key)
    if e is None:
        raise ModelSyntaxError(f"missing key {key!r}", 1, 1, path)
    return tuple(parse_rational(p, (e.line, c), path) for p, c in _split(e))


def _reps(entries, N: int, L: int, order: int, path):
    from .tensor_ops import RepMatrices

    reps = [None] * L
    for key, e in entries.items():
        if not key.startswith("rep.site."):
            continue
        idx = key[len("rep.site."):]
        if not idx.isdigit() or not 1 <= int(idx) <= L:
            raise UnknownKeyError(f"{key}: site must be 1..{L}", e.line, 1, path)
        name = e.value.strip()
        if name == "fundamental":
            r = RepMatrices.fundamental(N, order)
        elif name == "sym2":
            r = RepMatrices.symmetric_square(N, order)
        elif ":" in name:
            mats = {}
            for block, col in _split(e, "|"):
                if ":" not in block:
                    raise ModelSyntaxError("inline block must read eIJ: rows", e.line, col, path)
                lab, rows = block.split(":", 1)
                lab = lab.strip()
                if len(lab) != 3 or lab[0] != "e" or not lab[1:].isdigit():
                    raise ModelSyntaxError(f"bad generator label {lab!r}", e.line, col, path)
                i, j = int(lab[1]) - 1, int(lab[2]) - 1
                mats[i, j] = [
                    [parse_scalar(x, order, (e.line, col), path) for x in split_top(row, ",")] for row in rows.split(";")
                ]
            missing = [(i, j) for i in range(N) for j in range(N) if (i, j) not in mats]
            if missing:
                i, j = missing[0]
                raise ModelSyntaxError(f"inline representation lacks e{i + 1}{j + 1}", e.line, e.column, path)
            try:
                r = RepMatrices.from_dense(N, mats, order, name=f"inline-site-{idx}")
            except ValueError as exc:
                raise ValidationError("rep-relations", str(exc)) from None
        else:
            raise ModelSyntaxError(f"unknown representation {name!r}", e.line, e.column, path)
        reps[int(idx) - 1] = r
    return tuple(reps)


def _check_keys(entries, kind, path):
    allowed = ALLOWED[kind]
    for key, e in entries.items():
        if key in allowed:
            continue
        if kind != "dunkl" and key.startswith("rep.site."):
            continue
        raise UnknownKeyError(f"unknown key {key!r} for kind {kind}", e.line, 1, path)


def build_spec(entries: dict, path: str = "<model>"):
    from .dunkl import DunklSpec
    from .gaudin import InnerModelSpec, OuterModelSpec

    if "kind" not in entries:
        raise ModelSyntaxError("missing key 'kind'", 1, 1, path)
    ke = entries["kind"]
    kind = ke.value
    if kind not in KINDS:
        raise ModelSyntaxError(f"kind must be one of {', '.join(KINDS)}", ke.line, ke.column, path)
    _check_keys(entries, kind, path)

    if kind == "dunkl":
        n = _int(entries, "n", path)
        L = _int(entries, "L", path)
        N = _int(entries, "N", path, 1)
        mult = _int_list(entries, "multiplicities", path)
        eps = _int(entries, "eps", path, 1)
        lam = None
        if "lambda" in entries and entries["lambda"].value != "symbolic":
            e = entries["lambda"]
            lam = parse_rational(e.value, (e.line, e.column), path)
        mu = None
        if "mu" in entries:
            e = entries["mu"]
            if e.value == "zero":
                mu = "zero"
            elif e.value != "symbolic":
                mu = [parse_rational(p, (e.line, c), path) for p, c in _split(e)]
        trunc = _int(entries, "truncation", path, 0) or None
        return DunklSpec(n=n, L=L, N=N, multiplicities=mult, eps=eps, lam=lam, mu=mu, truncation=trunc)

    z = _rational_list(entries, "z", path)
    if "L" in entries and _int(entries, "L", path) != len(z):
        e = entries["L"]
        raise ValidationError("L-matches-z", f"L = {e.value} but {len(z)} z values given (line {e.line})")
    if kind == "inner-gaudin":
        n = _int(entries, "n", path)
        N = _int(entries, "N", path)
        mult = _int_list(entries, "multiplicities", path)
        if mult is None:
            raise ModelSyntaxError("missing key 'multiplicities'", 1, 1, path)
        if n < 1:
            raise ValidationError("n-positive", "n must be at least 1")
        reps = _reps(entries, N, len(z), field_order(n), path)
        return InnerModelSpec(n, N, mult, z, reps)

    N = _int(entries, "N", path)
    eta = _int(entries, "eta", path)
    sig = _int_list(entries, "signature", path)
    K = None
    if "K" in entries:
        e = entries["K"]
        K = [[parse_scalar(x, 4, (e.line, e.column), path) for x in split_top(row, ",")] for row in e.value.split(";")]
    reps = _reps(entries, N, len(z), 4, path)
    return OuterModelSpec(N, eta, z, K=K, signature=sig, reps=reps)


def parse_model_text(text: str, path: str = "<model>") -> ModelFile:
    entries = read_entries(text, path)
    spec = build_spec(entries, path)
    return ModelFile(entries["kind"].value, spec, entries, path)


def parse_model(path) -> ModelFile:
    p = Path(path)
    return parse_model_text(p.read_text(), str(p))
