"""A small expression language compiled to vectorised numpy callables.

Grammar (lowest precedence first)::

    expr    := or
    or      := and ("or" and)*
    and     := not ("and" not)*
    not     := "not" not | cmp
    cmp     := sum (("<" | "<=" | ">" | ">=" | "==" | "!=") sum)?
    sum     := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?
    atom    := NUMBER | VAR | FUNC "(" expr ("," expr)* ")"
             | "if" "(" expr "," expr "," expr ")" | "(" expr ")"

Variables are ``x1..xn`` (and ``y1..yn`` for relation predicates); functions
are ``sin cos abs min max sqrt``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

TOKEN = re.compile(r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
                   r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
                   r"|(?P<op><=|>=|==|!=|[-+*/^(),<>]))")

FUNCS: dict[str, tuple[Callable, int | None]] = {
    "sin": (np.sin, 1),
    "cos": (np.cos, 1),
    "abs": (np.abs, 1),
    "sqrt": (np.sqrt, 1),
    "min": (np.minimum, None),
    "max": (np.maximum, None),
}
CMPS = {"<": np.less, "<=": np.less_equal, ">": np.greater, ">=": np.greater_equal,
        "==": np.equal, "!=": np.not_equal}
VAR = re.compile(r"([xy])([1-9][0-9]*)$")


class ExprError(ValueError):
    """Parse error; ``pos`` is the 0-based character offset."""

    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[Tok]:
    toks, pos = [], 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = TOKEN.match(src, pos)
        if not m or m.end() == pos:
            start = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExprError(f"unexpected character {src[start]!r}", start)
        kind = m.lastgroup
        toks.append(Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(Tok("end", "", len(src)))
    return toks


# AST nodes are tuples: ("num", v) ("var", "x", i) ("neg", a) ("bin", op, a, b)
# ("cmp", op, a, b) ("and", a, b) ("or", a, b) ("not", a) ("call", f, args) ("if", c, a, b)

class Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def eat(self, text: str | None = None, kind: str | None = None) -> Tok:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = text or kind
            got = t.text or "end of input"
            raise ExprError(f"expected {want!r}, got {got!r}", t.pos)
        self.i += 1
        return t

    def parse(self):
        node = self.or_()
        if self.tok.kind != "end":
            raise ExprError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def or_(self):
        node = self.and_()
        while self.tok.text == "or":
            self.eat()
            node = ("or", node, self.and_())
        return node

    def and_(self):
        node = self.not_()
        while self.tok.text == "and":
            self.eat()
            node = ("and", node, self.not_())
        return node

    def not_(self):
        if self.tok.text == "not":
            self.eat()
            return ("not", self.not_())
        return self.cmp()

    def cmp(self):
        node = self.sum()
        if self.tok.text in CMPS:
            op = self.eat().text
            node = ("cmp", op, node, self.sum())
        return node

    def sum(self):
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.eat().text
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.eat().text
            node = ("bin", op, node, self.unary())
        return node

    def unary(self):
        if self.tok.text == "-":
            self.eat()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.tok.text == "^":
            self.eat()
            node = ("bin", "^", node, self.unary())
        return node

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.eat()
            return ("num", float(t.text))
        if t.text == "(":
            self.eat()
            node = self.or_()
            self.eat(")")
            return node
        if t.kind == "name":
            self.eat()
            if t.text == "if":
                self.eat("(")
                cond = self.or_()
                self.eat(",")
                a = self.or_()
                self.eat(",")
                b = self.or_()
                self.eat(")")
                return ("if", cond, a, b)
            if t.text in FUNCS:
                self.eat("(")
                args = [self.or_()]
                while self.tok.text == ",":
                    self.eat()
                    args.append(self.or_())
                self.eat(")")
                arity = FUNCS[t.text][1]
                if arity is not None and len(args) != arity:
                    raise ExprError(f"{t.text} takes {arity} argument(s)", t.pos)
                if arity is None and len(args) < 2:
                    raise ExprError(f"{t.text} takes at least 2 arguments", t.pos)
                return ("call", t.text, args)
            m = VAR.match(t.text)
            if m:
                return ("var", m.group(1), int(m.group(2)) - 1)
            raise ExprError(f"unknown name {t.text!r}", t.pos)
        raise ExprError(f"unexpected {t.text or 'end of input'!r}", t.pos)


def parse(src: str):
    return Parser(src).parse()


def variables(node) -> set[tuple[str, int]]:
    kind = node[0]
    if kind == "var":
        return {(node[1], node[2])}
    if kind == "num":
        return set()
    out: set = set()
    for child in node[1:]:
        if isinstance(child, tuple):
            out |= variables(child)
        elif isinstance(child, list):
            for c in child:
                out |= variables(c)
    return out


def _eval(node, env: dict[str, np.ndarray]):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "var":
        return env[node[1]][:, node[2]]
    if kind == "neg":
        return -_eval(node[1], env)
    if kind == "bin":
        a, b = _eval(node[2], env), _eval(node[3], env)
        op = node[1]
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return np.true_divide(a, b)
        return np.power(np.asarray(a, float), b)
    if kind == "cmp":
        return CMPS[node[1]](_eval(node[2], env), _eval(node[3], env))
    if kind == "and":
        return np.logical_and(_eval(node[1], env), _eval(node[2], env))
    if kind == "or":
        return np.logical_or(_eval(node[1], env), _eval(node[2], env))
    if kind == "not":
        return np.logical_not(_eval(node[1], env))
    if kind == "if":
        return np.where(_eval(node[1], env), _eval(node[2], env), _eval(node[3], env))
    if kind == "call":
        fn, _ = FUNCS[node[1]]
        args = [_eval(a, env) for a in node[2]]
        out = args[0]
        if len(args) == 1:
            return fn(out)
        for a in args[1:]:
            out = fn(out, a)
        return out
    raise AssertionError(kind)


class Compiled:
    """A parsed expression callable on batches of points."""

    def __init__(self, src: str, arity: int, names: str = "x"):
        self.src = src
        self.tree = parse(src)
        self.arity = arity
        for name, idx in variables(self.tree):
            if name not in names:
                raise ExprError(f"variable {name}{idx + 1} not allowed here", src.find(f"{name}{idx + 1}"))
            if idx >= arity:
                raise ExprError(f"variable {name}{idx + 1} exceeds dimension {arity}",
                                src.find(f"{name}{idx + 1}"))

    def __call__(self, **env: np.ndarray) -> np.ndarray:
        batch = len(next(iter(env.values())))
        with np.errstate(all="ignore"):
            out = np.broadcast_to(np.asarray(_eval(self.tree, env)), (batch,))
        return np.array(out)

    def real(self, X: np.ndarray) -> np.ndarray:
        out = self(x=np.atleast_2d(X)).astype(float)
        if not np.all(np.isfinite(out)):
            bad = int(np.argmin(np.isfinite(out)))
            raise EvaluationError(f"expression {self.src!r} is not finite at "
                                  f"{np.atleast_2d(X)[bad].tolist()}")
        return out
