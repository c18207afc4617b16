"""Recursive-descent parser for the analyzed C subset.

Concrete syntax: global ``int`` declarations (scalars and 1-D arrays) followed
by a single ``main() { ... }``. Loop and conditional bodies require braces.
The target-form constructs (``nd()``, ``nd(l,u)``, ternaries, guarded ternary
assignments, chained assignments) parse as well so that printed programs
round-trip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .astnodes import (
    ARRAY_INT,
    SCALAR_INT,
    ArrayAccess,
    Assert,
    Assign,
    BinOp,
    Block,
    Break,
    ChainAssign,
    Const,
    Continue,
    Decl,
    For,
    If,
    IfElse,
    Input,
    Nd,
    NdRange,
    Program,
    Read,
    Ternary,
    TernaryAssign,
    Var,
    assign_locs,
    walk,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str  # 'num', 'ident', 'punct', 'eof'
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<punct>\+\+|\+=|==|!=|<=|>=|&&|\|\||[-+*/%<>=?:;,(){}\[\]])
    """,
    re.VERBOSE | re.DOTALL,
)

KEYWORDS = {"int", "unsigned", "main", "if", "else", "for", "assert", "break", "continue"}


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {source[pos]!r}", line, pos - line_start + 1
            )
        text = m.group(0)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("punct", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            self.error(f"expected {text!r}, found {tok.text!r}" if tok.kind != "eof"
                       else f"expected {text!r}, found end of input")
        return self.next()

    def expect_ident(self) -> str:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.error(f"expected identifier, found {tok.text!r}")
        return self.next().text

    def error(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    # -- grammar -----------------------------------------------------------

    def program(self) -> Program:
        decls: list[Decl] = []
        while self.at("int") or self.at("unsigned"):
            decls.extend(self.declaration())
        self.expect("main")
        self.expect("(")
        self.expect(")")
        body = self.block()
        if self.peek().kind != "eof":
            self.error(f"trailing input after main: {self.peek().text!r}")
        return Program(decls, body)

    def declaration(self) -> list[Decl]:
        self.accept("unsigned")
        self.expect("int")
        decls = []
        while True:
            name = self.expect_ident()
            if self.accept("["):
                size_tok = self.peek()
                if size_tok.kind != "num":
                    self.error("array size must be a positive integer literal")
                size = int(self.next().text)
                self.expect("]")
                if size < 1:
                    raise ParseError("array size must be >= 1", size_tok.line, size_tok.col)
                decls.append(Decl(name, ARRAY_INT, size))
            else:
                decls.append(Decl(name, SCALAR_INT))
            if not self.accept(","):
                break
        self.expect(";")
        return decls

    def block(self) -> Block:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            stmts.append(self.statement())
        self.expect("}")
        return Block(stmts)

    def statement(self):
        tok = self.peek()
        if self.at("{"):
            return self.block()
        if self.accept("if"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.statement()
            if self.accept("else"):
                return IfElse(cond, then, self.statement())
            return If(cond, then)
        if self.accept("for"):
            return self.for_statement()
        if self.accept("assert"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            self.expect(";")
            return Assert(cond)
        if self.accept("break"):
            self.expect(";")
            return Break()
        if self.accept("continue"):
            self.expect(";")
            return Continue()
        if self.accept("("):
            # (cond) ? target = value : discard;
            cond = self.expression()
            self.expect(")")
            self.expect("?")
            target = Var(self.expect_ident())
            self.expect("=")
            value = self.expression()
            self.expect(":")
            discard = self.expression()
            self.expect(";")
            return TernaryAssign(cond, target, value, discard)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            return self.assignment()
        self.error(f"unexpected token {tok.text!r}")

    def assignment(self):
        name = self.expect_ident()
        if self.accept("["):
            index = self.expression()
            self.expect("]")
            self.expect("=")
            value = self.expression()
            self.expect(";")
            return Assign(ArrayAccess(name, index), value)
        self.expect("=")
        targets = [name]
        while (
            self.peek().kind == "ident"
            and self.peek().text not in KEYWORDS
            and self.peek(1).text == "="
            and self.peek(1).kind == "punct"
        ):
            targets.append(self.expect_ident())
            self.expect("=")
        value = self.expression()
        self.expect(";")
        if len(targets) == 1:
            return Assign(Var(name), value)
        return ChainAssign(targets, value)

    def for_statement(self) -> For:
        self.expect("(")
        iterator = self.expect_ident()
        self.expect("=")
        init = self.expression()
        self.expect(";")
        test = self.expression()
        self.expect(";")
        step_var = self.expect_ident()
        if step_var != iterator:
            self.error(f"loop step must update the iterator {iterator!r}")
        if self.accept("++"):
            step = BinOp("+", Read(Var(iterator)), Const(1))
        elif self.accept("+="):
            amount = self.peek()
            if amount.kind != "num":
                self.error("expected integer literal after '+='")
            step = BinOp("+", Read(Var(iterator)), Const(int(self.next().text)))
        else:
            self.expect("=")
            step = self.expression()
        self.expect(")")
        body = self.statement()
        return For(iterator, init, test, step, body)

    # -- expressions, by descending precedence -----------------------------

    def expression(self):
        return self.ternary()

    def ternary(self):
        cond = self.logical_or()
        if self.accept("?"):
            then = self.expression()
            self.expect(":")
            orelse = self.ternary()
            return Ternary(cond, then, orelse)
        return cond

    def _binary_level(self, ops: tuple[str, ...], sub):
        expr = sub()
        while self.peek().kind == "punct" and self.peek().text in ops:
            op = self.next().text
            expr = BinOp(op, expr, sub())
        return expr

    def logical_or(self):
        return self._binary_level(("||",), self.logical_and)

    def logical_and(self):
        return self._binary_level(("&&",), self.equality)

    def equality(self):
        return self._binary_level(("==", "!="), self.relational)

    def relational(self):
        return self._binary_level(("<", "<=", ">", ">="), self.additive)

    def additive(self):
        return self._binary_level(("+", "-"), self.multiplicative)

    def multiplicative(self):
        return self._binary_level(("*", "/", "%"), self.primary)

    def primary(self):
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return Const(int(tok.text))
        if self.accept("("):
            expr = self.expression()
            self.expect(")")
            return expr
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            name = self.next().text
            if name == "nd" and self.at("("):
                self.expect("(")
                if self.accept(")"):
                    return Nd()
                lo = self.expression()
                self.expect(",")
                hi = self.expression()
                self.expect(")")
                return NdRange(lo, hi)
            if name in ("input", "user_input") and self.at("("):
                self.expect("(")
                self.expect(")")
                return Input()
            if self.accept("["):
                index = self.expression()
                self.expect("]")
                return Read(ArrayAccess(name, index))
            return Read(Var(name))
        self.error(f"expected expression, found {tok.text!r}")


def _check_names(p: Program) -> None:
    seen: dict[str, Decl] = {}
    for d in p.decls:
        if d.name in seen:
            raise ParseError(f"identifier {d.name!r} declared more than once", 0, 0)
        seen[d.name] = d
    arrays = {d.name for d in p.decls if d.kind == ARRAY_INT}
    scalars = {d.name for d in p.decls if d.kind == SCALAR_INT}

    def require_scalar(name: str, what: str):
        if name in arrays:
            raise ParseError(f"{what} {name!r} must be a scalar, not an array", 0, 0)
        if name not in scalars:
            raise ParseError(f"use of undeclared identifier {name!r}", 0, 0)

    for node in walk(p.body):
        match node:
            case Var(name):
                require_scalar(name, "variable")
            case ArrayAccess(array=name):
                if name in scalars:
                    raise ParseError(f"scalar {name!r} cannot be indexed", 0, 0)
                if name not in arrays:
                    raise ParseError(f"use of undeclared array {name!r}", 0, 0)
            case For(iterator=it):
                require_scalar(it, "loop iterator")
            case ChainAssign(targets=targets):
                for t in targets:
                    require_scalar(t, "assignment target")


def parse(source: str) -> Program:
    """Parse source text into a located, name-checked :class:`Program`."""
    p = _Parser(tokenize(source)).program()
    _check_names(p)
    return assign_locs(p)
