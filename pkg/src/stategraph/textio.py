"""Concrete syntax for PBESs: tokenizer, parser, printer, and dot export.

The surface language looks like::

    nu X(i: Nat3, b: Bool) = (i != 1 || X(2, b)) && forall m: Nat3 . Y(m);
    mu Y(i: Nat3) = i == 2;
    init X(1, true);

Parsing happens in two steps. A precedence-climbing parser builds a small
untyped tree, which is then converted to core terms once every equation
header (and therefore every parameter sort and enum constant) is known.
Inside a formula, a maximal subtree free of PVIs, quantifiers and ``val``
becomes a single Boolean data term. ``val(e)`` forces a formula-level leaf,
which is what lets the printer round-trip every formula exactly.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

from . import core
from .core import (
    BOOL,
    And,
    BoolSort,
    BoolTerm,
    Const,
    DAnd,
    DNot,
    DOr,
    EnumSort,
    Eq,
    Equation,
    Exists,
    Forall,
    Lt,
    NatSort,
    Neq,
    Or,
    Pbes,
    Plus,
    Pvi,
    Var,
    format_value,
)
from .errors import ParseError, WellFormednessError


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


# --------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>==|!=|&&|\|\||[()\[\],:;=<+!.{}])
    """,
    re.VERBOSE,
)

KEYWORDS = {"mu", "nu", "init", "forall", "exists", "true", "false", "val", "Bool", "Enum"}


@dataclass
class Token:
    kind: str  # "int", "name", "kw", "op", "eof"
    text: str
    span: SourceSpan


def tokenize(text: str, filename: str = "<input>") -> list:
    tokens = []
    pos = 0
    line, col = 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", SourceSpan(filename, line, col)
            )
        chunk = m.group(0)
        kind = m.lastgroup
        if kind != "ws":
            if kind == "name" and chunk in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, chunk, SourceSpan(filename, line, col)))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(filename, line, col)))
    return tokens


# --------------------------------------------------------------------------
# Untyped syntax tree
#
# Nodes are tuples whose first element is a tag:
#   ("int", value, span) ("bool", value, span) ("name", text, span)
#   ("call", name, [args], span) ("val", node, span)
#   ("not", node, span) ("bin", op, left, right, span)
#   ("quant", "forall"|"exists", var, sort, body, span)


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text):
        return self.tok.text == text and self.tok.kind in ("op", "kw")

    def expect(self, text):
        if not self.at(text):
            self.fail(f"unexpected {self._describe(self.tok)}", [repr(text)])
        return self.next()

    def expect_name(self):
        if self.tok.kind != "name":
            self.fail(f"unexpected {self._describe(self.tok)}", ["identifier"])
        return self.next()

    def fail(self, message, expected=()):
        raise ParseError(message, self.tok.span, expected)

    @staticmethod
    def _describe(tok):
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    # -- top level

    def pbes(self):
        headers = []
        while self.at("mu") or self.at("nu"):
            headers.append(self.equation())
        if not self.at("init"):
            self.fail(f"unexpected {self._describe(self.tok)}", ["'mu'", "'nu'", "'init'"])
        init_tok = self.next()
        name = self.expect_name()
        args = self.arg_list()
        self.expect(";")
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self._describe(self.tok)} after init", ["end of input"])
        return headers, (name.text, args, init_tok.span)

    def equation(self):
        sign = self.next()
        name = self.expect_name()
        self.expect("(")
        params = []
        if not self.at(")"):
            pending = []
            while True:
                pending.append(self.expect_name())
                if self.at(":"):
                    self.next()
                    sort = self.sort()
                    params.extend((p, sort) for p in pending)
                    pending = []
                if self.at(","):
                    self.next()
                    continue
                break
            if pending:
                self.fail("parameter without a sort", ["':'"])
        self.expect(")")
        self.expect("=")
        body = self.expr()
        self.expect(";")
        return sign.text, name, params, body

    def sort(self):
        tok = self.tok
        if self.at("Bool"):
            self.next()
            return BOOL
        if self.at("Enum"):
            self.next()
            self.expect("{")
            values = [self.expect_name().text]
            while self.at(","):
                self.next()
                values.append(self.expect_name().text)
            self.expect("}")
            if len(set(values)) != len(values):
                raise ParseError("duplicate enum value", tok.span)
            return EnumSort(tuple(values))
        if tok.kind == "name":
            m = re.fullmatch(r"Nat(\d*)", tok.text)
            if m:
                self.next()
                digits = m.group(1)
                if not digits and self.tok.kind == "int":
                    digits = self.next().text
                if not digits:
                    return NatSort()
                size = int(digits)
                if size < 1:
                    raise ParseError("Nat sort needs at least one value", tok.span)
                return NatSort(size - 1)
        self.fail(f"unexpected {self._describe(tok)}", ["sort"])

    def arg_list(self):
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.at(","):
                self.next()
                args.append(self.expr())
        self.expect(")")
        return args

    # -- expressions

    def expr(self):
        if self.at("forall") or self.at("exists"):
            return self.quant()
        return self.disjunction()

    def quant(self):
        kw = self.next()
        var = self.expect_name()
        self.expect(":")
        sort = self.sort()
        self.expect(".")
        body = self.expr()
        return ("quant", kw.text, var.text, sort, body, kw.span)

    def disjunction(self):
        left = self.conjunction()
        while self.at("||"):
            op = self.next()
            left = ("bin", "||", left, self.conjunction(), op.span)
        return left

    def conjunction(self):
        left = self.unary()
        while self.at("&&"):
            op = self.next()
            left = ("bin", "&&", left, self.unary(), op.span)
        return left

    def unary(self):
        if self.at("!"):
            op = self.next()
            return ("not", self.unary(), op.span)
        if self.at("forall") or self.at("exists"):
            return self.quant()
        return self.comparison()

    def comparison(self):
        left = self.sum()
        if self.at("==") or self.at("!=") or self.at("<"):
            op = self.next()
            right = self.sum()
            if self.at("==") or self.at("!=") or self.at("<"):
                self.fail("comparisons do not associate; add parentheses")
            return ("bin", op.text, left, right, op.span)
        return left

    def sum(self):
        left = self.atom()
        while self.at("+"):
            op = self.next()
            left = ("bin", "+", left, self.atom(), op.span)
        return left

    def atom(self):
        tok = self.tok
        if tok.kind == "int":
            self.next()
            return ("int", int(tok.text), tok.span)
        if self.at("true") or self.at("false"):
            self.next()
            return ("bool", tok.text == "true", tok.span)
        if self.at("val"):
            self.next()
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return ("val", inner, tok.span)
        if self.at("("):
            self.next()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "name":
            self.next()
            if self.at("("):
                return ("call", tok.text, self.arg_list(), tok.span)
            return ("name", tok.text, tok.span)
        self.fail(f"unexpected {self._describe(tok)}", ["expression"])


# --------------------------------------------------------------------------
# Conversion to core values


def _span(node):
    return node[-1]


def _data_only(node) -> bool:
    tag = node[0]
    if tag in ("call", "val", "quant"):
        return False
    if tag == "not":
        return _data_only(node[1])
    if tag == "bin":
        return _data_only(node[2]) and _data_only(node[3])
    return True


class _Converter:
    def __init__(self, headers, enum_values):
        self.headers = headers  # name -> list of (param, sort)
        self.enum_values = enum_values  # value -> EnumSort

    def error(self, message, node):
        raise WellFormednessError(f"{_span(node)}: {message}")

    def formula(self, node, scope):
        if _data_only(node):
            term = self.term(node, scope)
            self.require(term, BOOL, node)
            return BoolTerm(term)
        tag = node[0]
        if tag == "val":
            term = self.term(node[1], scope)
            self.require(term, BOOL, node)
            return BoolTerm(term)
        if tag == "call":
            return self.pvi(node, scope)
        if tag == "quant":
            _, kind, var, sort, body, _ = node
            inner = dict(scope)
            inner[var] = sort
            cls = Forall if kind == "forall" else Exists
            return cls(var, sort, self.formula(body, inner))
        if tag == "bin" and node[1] in ("&&", "||"):
            cls = And if node[1] == "&&" else Or
            return cls(self.formula(node[2], scope), self.formula(node[3], scope))
        if tag == "not":
            self.error("negation may only be applied to data terms", node)
        self.error("predicate variable instances cannot occur inside data terms", node)

    def pvi(self, node, scope):
        _, name, args, _ = node
        params = self.headers.get(name)
        terms = []
        for k, arg in enumerate(args):
            if not _data_only(arg):
                self.error(f"argument {k + 1} of {name} is not a data term", arg)
            term = self.term(arg, scope)
            if params is not None and k < len(params):
                term = _annotate(term, params[k][1])
            terms.append(term)
        return Pvi(name, tuple(terms))

    def require(self, term, sort, node):
        got = core.sort_of(term)
        if got is None:
            if isinstance(term, Const) and not _literal_in(term.value, sort):
                self.error(f"expected a {sort} term, got {format_value(term.value)}", node)
        elif got != sort:
            self.error(f"expected a {sort} term, got {got}", node)

    def term(self, node, scope):
        tag = node[0]
        if tag == "int":
            return Const(node[1])
        if tag == "bool":
            return Const(node[1], BOOL)
        if tag == "name":
            name = node[1]
            if name in scope:
                return Var(name, scope[name])
            if name in self.enum_values:
                return Const(name, self.enum_values[name])
            self.error(f"unbound data variable {name!r}", node)
        if tag == "not":
            arg = self.term(node[1], scope)
            self.require(arg, BOOL, node[1])
            return DNot(arg)
        if tag == "bin":
            _, op, lnode, rnode, _ = node
            left = self.term(lnode, scope)
            right = self.term(rnode, scope)
            if op in ("&&", "||"):
                self.require(left, BOOL, lnode)
                self.require(right, BOOL, rnode)
                return (DAnd if op == "&&" else DOr)(left, right)
            ls, rs = core.sort_of(left), core.sort_of(right)
            if op in ("+", "<"):
                for side, s, n in ((left, ls, lnode), (right, rs, rnode)):
                    if s is None and not (isinstance(side, Const) and type(side.value) is int):
                        self.error(f"{op} needs numeric operands", n)
                    if s is not None and not isinstance(s, NatSort):
                        self.error(f"{op} needs numeric operands, got {s}", n)
                if ls is not None and rs is not None and ls != rs:
                    self.error(f"operands of {op} have different sorts {ls} and {rs}", node)
                left, right = _annotate(left, rs), _annotate(right, ls)
                return (Plus if op == "+" else Lt)(left, right)
            # == and !=
            if ls is not None and rs is not None and ls != rs:
                self.error(f"cannot compare {ls} with {rs}", node)
            for side, other, n in ((left, rs, lnode), (right, ls, rnode)):
                if isinstance(side, Const) and other is not None and not _literal_kind(side.value, other):
                    self.error(f"cannot compare {format_value(side.value)} with {other}", n)
            if (
                isinstance(left, Const)
                and isinstance(right, Const)
                and ls is None
                and rs is None
                and type(left.value) is not type(right.value)
            ):
                self.error("cannot compare literals of different kinds", node)
            left, right = _annotate(left, rs), _annotate(right, ls)
            return (Eq if op == "==" else Neq)(left, right)
        if tag == "call":
            self.error("predicate variable instances cannot occur inside data terms", node)
        self.error("expected a data term", node)


def _literal_kind(value, sort):
    if isinstance(sort, BoolSort):
        return type(value) is bool
    if isinstance(sort, NatSort):
        return type(value) is int
    return type(value) is str


def _literal_in(value, sort):
    return _literal_kind(value, sort)


def _annotate(term, sort):
    """Give sortless numeric literals inside ``term`` the sort ``sort``."""
    if sort is None or not isinstance(sort, NatSort):
        return term
    if isinstance(term, Const) and term.sort is None and type(term.value) is int:
        return Const(term.value, sort)
    if isinstance(term, Plus):
        return Plus(_annotate(term.left, sort), _annotate(term.right, sort))
    return term


def _collect_enums(node, out):
    tag = node[0]
    if tag == "quant":
        _register_enum(node[3], out)
        _collect_enums(node[4], out)
    elif tag == "bin":
        _collect_enums(node[2], out)
        _collect_enums(node[3], out)
    elif tag in ("not", "val"):
        _collect_enums(node[1], out)
    elif tag == "call":
        for arg in node[2]:
            _collect_enums(arg, out)


def _register_enum(sort, out):
    if isinstance(sort, EnumSort):
        for value in sort.values:
            out.setdefault(value, sort)


def parse_pbes(text: str, filename: str = "<input>") -> Pbes:
    """Parse and check a PBES. Raises ParseError or WellFormednessError."""
    tokens = tokenize(text, filename)
    raw_eqs, raw_init = _Parser(tokens).pbes()
    headers = {}
    enum_values = {}
    for sign, name_tok, params, body in raw_eqs:
        if name_tok.text in headers:
            raise WellFormednessError(f"{name_tok.span}: duplicate equation for {name_tok.text}")
        headers[name_tok.text] = [(p.text, s) for p, s in params]
        seen = set()
        for p, s in params:
            if p.text in seen:
                raise WellFormednessError(f"{p.span}: duplicate parameter {p.text}")
            seen.add(p.text)
            _register_enum(s, enum_values)
        _collect_enums(body, enum_values)
    conv = _Converter(headers, enum_values)
    equations = []
    for sign, name_tok, params, body in raw_eqs:
        scope = {p.text: s for p, s in params}
        rhs = conv.formula(body, scope)
        equations.append(Equation(sign, name_tok.text, tuple(headers[name_tok.text]), rhs))
    init_name, init_args, init_span = raw_init
    init = conv.pvi(("call", init_name, init_args, init_span), {})
    pbes = Pbes(tuple(equations), init)
    core.check_well_formed(pbes)
    return pbes


def parse_file(path) -> Pbes:
    with open(path, encoding="utf-8") as fh:
        return parse_pbes(fh.read(), str(path))


# --------------------------------------------------------------------------
# Printing

_P_QUANT, _P_OR, _P_AND, _P_NOT, _P_CMP, _P_PLUS, _P_ATOM = range(7)
_TERM_OPS = {Plus: ("+", _P_PLUS), Eq: ("==", _P_CMP), Neq: ("!=", _P_CMP),
             Lt: ("<", _P_CMP), DAnd: ("&&", _P_AND), DOr: ("||", _P_OR)}


def format_sort(sort) -> str:
    return str(sort)


def format_term(term, min_prec: int = 0) -> str:
    text, prec = _term(term)
    return f"({text})" if prec < min_prec else text


def _term(term):
    if isinstance(term, Const):
        return format_value(term.value), _P_ATOM
    if isinstance(term, Var):
        return term.name, _P_ATOM
    if isinstance(term, DNot):
        return "!" + format_term(term.arg, _P_NOT), _P_NOT
    op, prec = _TERM_OPS[type(term)]
    if prec == _P_CMP:
        left = format_term(term.left, _P_CMP + 1)
        right = format_term(term.right, _P_CMP + 1)
    else:
        left = format_term(term.left, prec)
        right = format_term(term.right, prec + 1)
    return f"{left} {op} {right}", prec


def _has_structure(phi) -> bool:
    """True when a formula contains a PVI or a quantifier."""
    if isinstance(phi, (Pvi, Forall, Exists)):
        return True
    if isinstance(phi, (And, Or)):
        return _has_structure(phi.left) or _has_structure(phi.right)
    return False


def format_formula(phi, min_prec: int = 0) -> str:
    text, prec = _formula(phi, wrap_leaves=False)
    return f"({text})" if prec < min_prec else text


def _formula(phi, wrap_leaves):
    if isinstance(phi, BoolTerm):
        if wrap_leaves:
            return f"val({format_term(phi.term)})", _P_ATOM
        return _term(phi.term)
    if isinstance(phi, Pvi):
        return format_pvi(phi), _P_ATOM
    if isinstance(phi, (Forall, Exists)):
        kw = "forall" if isinstance(phi, Forall) else "exists"
        body, _ = _formula(phi.body, wrap_leaves=False)
        return f"{kw} {phi.var}: {format_sort(phi.sort)} . {body}", _P_QUANT
    op, prec = ("&&", _P_AND) if isinstance(phi, And) else ("||", _P_OR)
    wrap = not _has_structure(phi)
    left = _sub(phi.left, prec, wrap)
    right = _sub(phi.right, prec + 1, wrap)
    return f"{left} {op} {right}", prec


def _sub(phi, min_prec, wrap):
    # Quantifiers always get parentheses under a connective: their bodies
    # extend as far to the right as possible.
    text, prec = _formula(phi, wrap_leaves=wrap)
    if prec < min_prec or prec == _P_QUANT:
        return f"({text})"
    return text


def format_pvi(pvi) -> str:
    return f"{pvi.name}(" + ", ".join(format_term(a) for a in pvi.args) + ")"


def format_equation(eq: Equation) -> str:
    params = ", ".join(f"{n}: {format_sort(s)}" for n, s in eq.params)
    return f"{eq.sign} {eq.name}({params}) = {format_formula(eq.rhs)};"


def print_pbes(pbes: Pbes) -> str:
    lines = [format_equation(eq) for eq in pbes.equations]
    lines.append(f"init {format_pvi(pbes.init)};")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Graphs and labellings


def format_location(vertex) -> str:
    """``X(1,2)`` for a global location, ``(X,n,v)`` for a local vertex."""
    if len(vertex) == 2:
        name, values = vertex
        return f"{name}(" + ",".join(format_value(v) for v in values) + ")"
    name, n, value = vertex
    return f"({name},{n},{format_value(value)})"


def format_valuation(values) -> str:
    return "(" + ",".join(format_value(v) for v in values) + ")"


def format_labels(labels) -> str:
    return "{" + ",".join(sorted(labels)) + "}"


def _dot_id(text):
    return '"' + text.replace('"', '\\"') + '"'


def export_dot(graph, labelling=None, name="cfg") -> str:
    """Render a global or local control flow graph in GraphViz syntax.

    Local vertices ``(X, n, v)`` are grouped into one cluster per CFP index.
    """
    vertices = sorted(graph.vertices, key=_vertex_key)
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    local = bool(vertices) and len(vertices[0]) == 3

    def node_line(v, indent):
        label = format_location(v)
        if labelling is not None:
            label += "\\n" + format_labels(labelling.get(v, ()))
        return f"{indent}{_dot_id(format_location(v))} [label={_dot_id(label)}];"

    if local:
        clusters = {}
        for v in vertices:
            clusters.setdefault(v[1], []).append(v)
        for n in sorted(clusters):
            lines.append(f"  subgraph cluster_{n} {{")
            lines.append(f"    label={_dot_id('CFP ' + str(n))};")
            lines.extend(node_line(v, "    ") for v in clusters[n])
            lines.append("  }")
    else:
        lines.extend(node_line(v, "  ") for v in vertices)
    for src, i, dst in sorted(graph.edges, key=lambda e: (_vertex_key(e[0]), e[1], _vertex_key(e[2]))):
        lines.append(
            f"  {_dot_id(format_location(src))} -> {_dot_id(format_location(dst))} [label=\"{i}\"];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _value_key(value):
    return (type(value).__name__, value)


def _vertex_key(v):
    if len(v) == 2:
        return (v[0], tuple(_value_key(x) for x in v[1]))
    return (v[0], v[1], _value_key(v[2]))


def labelling_to_json(labelling) -> dict:
    """``{"X": {"(1,1)": ["k"]}}`` for global, ``{"(X,n,v)": [...]}`` for local."""
    out = {}
    for vertex in sorted(labelling, key=_vertex_key):
        labels = sorted(labelling[vertex])
        if len(vertex) == 2:
            out.setdefault(vertex[0], {})[format_valuation(vertex[1])] = labels
        else:
            out[format_location(vertex)] = labels
    return out


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"
