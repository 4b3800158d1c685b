"""Parser and evaluator for plain-text surface definition files.

File format (statements separated by newlines or ';'):

    ambient E(2,2)            -- flat neutral 4-space, or S(2,3; c) / H(3,2; c)
    domain -1:1, -1:1         -- optional, defaults to [-1,1]^2
    x1 = sinh(2*s/sqrt(3))    -- one component per ambient coordinate, in order
    ...

Expression grammar: variables s and t, constants pi and e, decimal literals
with optional exponent, functions exp sinh cosh sin cos tan log sqrt and the
binary pow(a,b).  Precedence: ^ over unary - over * / over + -, all binary
operators left-associative.  No implicit multiplication.  Errors are
reported as ``line:col: message``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .ambient import AmbientSpace, DomainRect
from .errors import ExprSyntaxError, SingularityError
from .jets import FUNCTIONS, Jet2, jpow

_BIN_PREC = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_PREC = 30
_ATOM_PREC = 100

_CONSTANTS = {"pi": math.pi, "e": math.e}
_FUNCTION_ARITY = {name: 1 for name in FUNCTIONS} | {"pow": 2}

DEFAULT_VARIABLES = ("s", "t")


# -- AST ---------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


Expr = Num | Var | Neg | BinOp | Call


@dataclass(frozen=True)
class SurfaceDefinition:
    name: str
    ambient: AmbientSpace
    components: tuple
    domain: DomainRect


# -- tokenizer ---------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # NUMBER | IDENT | OP | END
    text: str
    line: int
    col: int
    value: float = 0.0


_NUMBER_RE = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[a-z][a-z0-9_]*")
_OPS = set("+-*/^(),")


def _tokenize(text: str, line: int, col0: int) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        col = col0 + i
        if ch in _OPS:
            tokens.append(_Token("OP", ch, line, col))
            i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(_Token("NUMBER", m.group(0), line, col, value=float(m.group(0))))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("IDENT", m.group(0), line, col))
            i = m.end()
            continue
        raise ExprSyntaxError(line, col, f"unexpected character {ch!r}")
    tokens.append(_Token("END", "", line, col0 + n))
    return tokens


# -- Pratt parser ------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token], variables: tuple[str, ...]):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        t = self.cur
        self.pos += 1
        return t

    def error(self, message: str, token: _Token | None = None):
        t = token or self.cur
        raise ExprSyntaxError(t.line, t.col, message)

    def parse(self) -> Expr:
        node = self.parse_expr(0)
        if self.cur.kind != "END":
            self.error(f"unexpected token {self.cur.text!r}")
        return node

    def parse_expr(self, min_prec: int) -> Expr:
        left = self.parse_atom()
        while (
            self.cur.kind == "OP"
            and self.cur.text in _BIN_PREC
            and _BIN_PREC[self.cur.text] >= min_prec
        ):
            op = self.advance()
            right = self.parse_expr(_BIN_PREC[op.text] + 1)
            left = BinOp(op.text, left, right, line=op.line, col=op.col)
        return left

    def parse_atom(self) -> Expr:
        t = self.cur
        if t.kind == "NUMBER":
            self.advance()
            return Num(t.value, line=t.line, col=t.col)
        if t.kind == "IDENT":
            self.advance()
            if self.cur.kind == "OP" and self.cur.text == "(":
                return self.parse_call(t)
            if t.text in self.variables:
                return Var(t.text, line=t.line, col=t.col)
            if t.text in _CONSTANTS:
                return Num(_CONSTANTS[t.text], line=t.line, col=t.col)
            self.error(f"unknown identifier {t.text!r}", t)
        if t.kind == "OP" and t.text == "-":
            self.advance()
            operand = self.parse_expr(_UNARY_PREC)
            return Neg(operand, line=t.line, col=t.col)
        if t.kind == "OP" and t.text == "(":
            self.advance()
            node = self.parse_expr(0)
            if not (self.cur.kind == "OP" and self.cur.text == ")"):
                self.error("expected ')'")
            self.advance()
            return node
        if t.kind == "END":
            self.error("unexpected end of expression", t)
        self.error(f"expected operand, found {t.text!r}", t)

    def parse_call(self, name: _Token) -> Expr:
        if name.text not in _FUNCTION_ARITY:
            self.error(f"unknown function {name.text!r}", name)
        self.advance()  # '('
        args = [self.parse_expr(0)]
        while self.cur.kind == "OP" and self.cur.text == ",":
            self.advance()
            args.append(self.parse_expr(0))
        if not (self.cur.kind == "OP" and self.cur.text == ")"):
            self.error("expected ')' or ',' in argument list")
        self.advance()
        arity = _FUNCTION_ARITY[name.text]
        if len(args) != arity:
            self.error(
                f"{name.text} takes {arity} argument{'s' if arity > 1 else ''}, "
                f"got {len(args)}",
                name,
            )
        return Call(name.text, tuple(args), line=name.line, col=name.col)


def parse_expression(
    text: str,
    variables: tuple[str, ...] = DEFAULT_VARIABLES,
    line: int = 1,
    col0: int = 1,
) -> Expr:
    """Parse a single expression; positions are offset by (line, col0)."""
    return _Parser(_tokenize(text, line, col0), tuple(variables)).parse()


# -- evaluation --------------------------------------------------------


def eval_on_jets(ast: Expr, s: Jet2, t: Jet2) -> Jet2:
    """Evaluate the tree on jet-valued s, t.

    Jet singularities (division by zero, function-domain violations) are
    re-raised with the location of the responsible node attached.
    """
    return _eval(ast, {"s": s, "t": t})


def _eval(node: Expr, env: dict):
    if isinstance(node, Num):
        return Jet2.constant(node.value)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    try:
        if isinstance(node, BinOp):
            a = _eval(node.left, env)
            b = _eval(node.right, env)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                return a / b
            return jpow(a, b)
        if isinstance(node, Call):
            args = [_eval(a, env) for a in node.args]
            if node.fn == "pow":
                return jpow(args[0], args[1])
            return FUNCTIONS[node.fn](args[0])
    except SingularityError as exc:
        if str(exc).startswith(f"{node.line}:"):
            raise
        raise SingularityError(f"{node.line}:{node.col}: {exc}") from exc
    raise TypeError(f"not an expression node: {node!r}")


def eval_numeric(node: Expr, env: dict):
    """Evaluate over plain numeric operands (float, complex, polynomials).

    Only arithmetic is supported; the denominator of '/' must be a plain
    number so non-scalar operand types (e.g. polynomial objects) stay
    closed under the operations.
    """
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -eval_numeric(node.operand, env)
    if isinstance(node, BinOp):
        a = eval_numeric(node.left, env)
        b = eval_numeric(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        if not isinstance(b, (int, float, complex)) or (
            isinstance(b, float) and not b.is_integer()
        ):
            raise ExprSyntaxError(node.line, node.col, "exponent must be an integer here")
        return a ** int(b)
    raise ExprSyntaxError(node.line, node.col, "function calls are not allowed here")


# -- printing ----------------------------------------------------------


def _prec_of(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _BIN_PREC[node.op]
    if isinstance(node, Neg):
        return _UNARY_PREC
    return _ATOM_PREC


def expr_to_text(node: Expr) -> str:
    return _print(node, 0)


def _print(node: Expr, min_prec: int) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        text = "-" + _print(node.operand, _UNARY_PREC)
    elif isinstance(node, BinOp):
        prec = _BIN_PREC[node.op]
        text = f"{_print(node.left, prec)} {node.op} {_print(node.right, prec + 1)}"
    elif isinstance(node, Call):
        text = f"{node.fn}({', '.join(_print(a, 0) for a in node.args)})"
    else:
        raise TypeError(f"not an expression node: {node!r}")
    if _prec_of(node) < min_prec:
        return f"({text})"
    return text


def definition_to_text(defn: SurfaceDefinition) -> str:
    """Render a definition back to the file format (parse-stable)."""
    amb = defn.ambient
    neg = amb.signature.negative_count
    pos = amb.signature.total_dim - neg
    if amb.is_flat:
        head = f"ambient E({neg},{pos})"
    else:
        letter = "S" if amb.kind == "pseudo_sphere" else "H"
        head = f"ambient {letter}({neg},{pos}; {amb.curvature!r})"
    d = defn.domain
    lines = [head, f"domain {d.s0!r}:{d.s1!r}, {d.t0!r}:{d.t1!r}"]
    for k, comp in enumerate(defn.components, start=1):
        lines.append(f"x{k} = {expr_to_text(comp)}")
    return "\n".join(lines) + "\n"


# -- surface files -----------------------------------------------------

_AMBIENT_RE = re.compile(
    r"ambient\s+([ESH])\s*\(\s*(\d+)\s*,\s*(\d+)\s*(?:;\s*([^)]+?)\s*)?\)\s*$"
)
_DOMAIN_RE = re.compile(
    r"domain\s+([^:,]+):([^,]+),([^:]+):(.+)$"
)
_COMPONENT_RE = re.compile(r"(x(\d+))\s*=\s*(.*)$")
_FLOAT_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _statements(text: str):
    """Yield (line, col, stripped_statement).

    A ';' separates statements like a newline does, except inside
    parentheses (the ambient header uses one before its curvature).
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        pieces = []
        depth = 0
        start = 0
        for k, ch in enumerate(raw):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth = max(0, depth - 1)
            elif ch == ";" and depth == 0:
                pieces.append((start, raw[start:k]))
                start = k + 1
        pieces.append((start, raw[start:]))
        for offset, piece in pieces:
            stripped = piece.strip()
            if stripped:
                col = offset + piece.index(stripped[0]) + 1
                yield lineno, col, stripped


def _parse_float(text: str, line: int, col: int) -> float:
    if not _FLOAT_RE.match(text.strip()):
        raise ExprSyntaxError(line, col, f"expected a number, found {text.strip()!r}")
    return float(text)


def _parse_ambient(stmt: str, line: int, col: int) -> AmbientSpace:
    m = _AMBIENT_RE.match(stmt)
    if not m:
        raise ExprSyntaxError(
            line, col, "malformed ambient line; expected E(t,p), S(t,p; c) or H(t,p; c)"
        )
    letter, neg, pos, c_text = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
    try:
        if letter == "E":
            if c_text is not None:
                raise ExprSyntaxError(line, col, "flat ambient E(t,p) takes no curvature")
            if (neg, pos) != (2, 2):
                raise ExprSyntaxError(line, col, "only the neutral 4-space E(2,2) is supported")
            return AmbientSpace.flat()
        if c_text is None:
            raise ExprSyntaxError(line, col, f"{letter}(t,p; c) requires a curvature")
        c = _parse_float(c_text, line, col)
        if letter == "S":
            if (neg, pos) != (2, 3) or c <= 0:
                raise ExprSyntaxError(
                    line, col, "pseudo-sphere must be S(2,3; c) with c > 0"
                )
            return AmbientSpace.pseudo_sphere(c)
        if (neg, pos) != (3, 2) or c >= 0:
            raise ExprSyntaxError(
                line, col, "pseudo-hyperbolic space must be H(3,2; c) with c < 0"
            )
        return AmbientSpace.pseudo_hyperbolic(c)
    except ExprSyntaxError:
        raise
    except Exception as exc:
        raise ExprSyntaxError(line, col, str(exc)) from exc


def _parse_domain(stmt: str, line: int, col: int) -> DomainRect:
    m = _DOMAIN_RE.match(stmt)
    if not m:
        raise ExprSyntaxError(line, col, "malformed domain line; expected s0:s1, t0:t1")
    vals = [_parse_float(g, line, col) for g in m.groups()]
    if not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise ExprSyntaxError(line, col, "empty domain")
    return DomainRect(*vals)


def parse_surface(text: str, name: str = "user_surface") -> SurfaceDefinition:
    """Parse a full surface definition file.

    Unparseable input raises ExprSyntaxError without producing a partial
    definition.
    """
    ambient: AmbientSpace | None = None
    domain: DomainRect | None = None
    components: list[Expr] = []
    for line, col, stmt in _statements(text):
        if stmt.startswith("ambient"):
            if ambient is not None:
                raise ExprSyntaxError(line, col, "duplicate ambient line")
            if components or domain is not None:
                raise ExprSyntaxError(line, col, "ambient must be the first statement")
            ambient = _parse_ambient(stmt, line, col)
            continue
        if ambient is None:
            raise ExprSyntaxError(line, col, "file must start with an ambient line")
        if stmt.startswith("domain"):
            if domain is not None:
                raise ExprSyntaxError(line, col, "duplicate domain line")
            if components:
                raise ExprSyntaxError(line, col, "domain must precede component lines")
            domain = _parse_domain(stmt, line, col)
            continue
        m = _COMPONENT_RE.match(stmt)
        if not m:
            raise ExprSyntaxError(line, col, f"expected 'xK = expression', found {stmt!r}")
        index = int(m.group(2))
        if index != len(components) + 1:
            raise ExprSyntaxError(
                line, col, f"components must appear in order; expected x{len(components) + 1}"
            )
        expr_text = m.group(3)
        expr_col = col + m.start(3)
        components.append(parse_expression(expr_text, line=line, col0=expr_col))
    if ambient is None:
        raise ExprSyntaxError(1, 1, "file must declare an ambient space")
    if len(components) != ambient.embedding_dim:
        raise ExprSyntaxError(
            1,
            1,
            f"component count {len(components)} does not match ambient dimension "
            f"{ambient.embedding_dim}",
        )
    if domain is None:
        domain = DomainRect(-1.0, 1.0, -1.0, 1.0)
    return SurfaceDefinition(name, ambient, tuple(components), domain)
