"""Lexer and recursive-descent parser for ``.jns`` sources.

Grammar (newlines are insignificant, ``//`` starts a line comment)::

    program   := procedure*
    procedure := 'procedure' ID '(' [param (',' param)*] ')' stmt*
    param     := 'int' ID ['[' ']']
    stmt      := lvalue ('+=' | '-=' | '^=') expr
               | lvalue '<=>' lvalue
               | 'if' expr 'then' stmt* ['else' stmt*] 'fi' expr
               | 'from' expr 'loop' stmt* 'until' expr
               | 'local' 'int' ID '=' expr stmt* 'delocal' 'int' ID '=' expr
               | ('call' | 'uncall') ID '(' [ID (',' ID)*] ')'
               | 'skip'
    lvalue    := ID ['[' expr ']']

Binary operators, loosest first: ``||``, ``&&``, comparisons,
``+ - | ^``, ``* / % &``; then unary minus, then right-associative ``**``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from .syntax import (
    BinOp, Call, Expr, If, Index, Local, Loop, Neg, Num, Param, Procedure,
    Program, Size, Skip, Span, Stmt, Swap, Uncall, Update, Var,
)

KEYWORDS = frozenset({
    "procedure", "from", "loop", "until", "if", "then", "else", "fi",
    "local", "delocal", "call", "uncall", "int", "skip", "size",
})

# Longest operators first so that '<=>' wins over '<=' and '^=' over '^'.
_OPERATORS = [
    "<=>", "**", "&&", "||", "+=", "-=", "^=", "!=", "<=", ">=",
    "+", "-", "*", "/", "%", "&", "|", "^", "=", "<", ">",
    "(", ")", "[", "]", ",",
]
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)|(?P<num>[0-9]+)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>"
    + "|".join(re.escape(op) for op in _OPERATORS)
    + ")"
)

MAX_LITERAL = 2 ** 63 - 1

# precedence levels for binary operators, loosest = 1
BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "=": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4, "|": 4, "^": 4,
    "*": 5, "/": 5, "%": 5, "&": 5,
    "**": 7,
}
UNARY_PRECEDENCE = 6


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'id', 'kw', 'op', 'eof'
    text: str
    span: Span


class ParseError(Exception):
    def __init__(self, message: str, span: Span, expected: Iterable[str] = ()):
        self.span = span
        self.expected = frozenset(expected)
        self.message = message
        detail = message
        if self.expected:
            detail += " (expected " + " or ".join(sorted(self.expected)) + ")"
        super().__init__(f"{span}: {detail}")


def tokenize(source: str) -> List[Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            span = Span(pos, line, pos - line_start + 1, 1)
            raise ParseError(f"unexpected character {source[pos]!r}", span)
        kind = m.lastgroup
        text = m.group()
        span = Span(pos, line, pos - line_start + 1, len(text))
        if kind == "id" and text in KEYWORDS:
            kind = "kw"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, span))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", Span(n, line, n - line_start + 1, 0)))
    return tokens


_STMT_START = frozenset({"identifier", "if", "from", "local", "call", "uncall", "skip"})


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "op") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def fail(self, expected: Iterable[str]) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return ParseError(f"unexpected {found}", t.span, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail({repr(text)})
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "id":
            raise self.fail({"identifier"})
        return self.advance()

    def since(self, start: Span) -> Span:
        last = self.tokens[self.pos - 1].span
        return start.cover(last)

    # -- declarations

    def program(self) -> Program:
        procs = []
        while self.tok.kind != "eof":
            procs.append(self.procedure())
        return Program(tuple(procs))

    def procedure(self) -> Procedure:
        start = self.expect("procedure").span
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.advance()
                params.append(self.param())
        self.expect(")")
        body = self.stmts()
        if self.tok.kind != "eof" and not self.at("procedure"):
            raise self.fail(_STMT_START | {"'procedure'", "end of input"})
        return Procedure(name, tuple(params), body, self.since(start))

    def param(self) -> Param:
        start = self.expect("int").span
        name = self.ident().text
        is_array = False
        if self.at("["):
            self.advance()
            self.expect("]")
            is_array = True
        return Param(name, is_array, self.since(start))

    # -- statements

    def stmts(self) -> Tuple[Stmt, ...]:
        out = []
        while True:
            t = self.tok
            if t.kind == "id" or (t.kind == "kw" and t.text in _STMT_START):
                out.append(self.stmt())
            else:
                return tuple(out)

    def stmt(self) -> Stmt:
        t = self.tok
        start = t.span
        if t.kind == "id":
            target = self.lvalue()
            if self.at("<=>"):
                self.advance()
                other = self.lvalue()
                return Swap(target, other, self.since(start))
            if self.tok.kind == "op" and self.tok.text in ("+=", "-=", "^="):
                op = self.advance().text
                rhs = self.expr()
                return Update(target, op, rhs, self.since(start))
            raise self.fail({"'+='", "'-='", "'^='", "'<=>'"})
        word = t.text
        self.advance()
        if word == "skip":
            return Skip(self.since(start))
        if word == "if":
            test = self.expr()
            self.expect("then")
            then = self.stmts()
            orelse: Tuple[Stmt, ...] = ()
            if self.at("else"):
                self.advance()
                orelse = self.stmts()
            if not self.at("fi"):
                raise self.fail(_STMT_START | ({"'fi'"} if orelse else {"'else'", "'fi'"}))
            self.advance()
            assertion = self.expr()
            return If(test, then, orelse, assertion, self.since(start))
        if word == "from":
            entry = self.expr()
            self.expect("loop")
            body = self.stmts()
            if not self.at("until"):
                raise self.fail(_STMT_START | {"'until'"})
            self.advance()
            until = self.expr()
            return Loop(entry, body, until, self.since(start))
        if word == "local":
            self.expect("int")
            name_tok = self.ident()
            self.expect("=")
            init = self.expr()
            body = self.stmts()
            if not self.at("delocal"):
                raise self.fail(_STMT_START | {"'delocal'"})
            self.advance()
            self.expect("int")
            closing = self.ident()
            if closing.text != name_tok.text:
                raise ParseError(
                    f"delocal {closing.text} does not match local {name_tok.text}",
                    closing.span, {repr(name_tok.text)})
            self.expect("=")
            final = self.expr()
            return Local(name_tok.text, init, body, final, self.since(start))
        if word in ("call", "uncall"):
            proc = self.ident().text
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.ident().text)
                while self.at(","):
                    self.advance()
                    args.append(self.ident().text)
            self.expect(")")
            node = Call if word == "call" else Uncall
            return node(proc, tuple(args), self.since(start))
        raise AssertionError(word)

    def lvalue(self):
        t = self.ident()
        if self.at("["):
            self.advance()
            index = self.expr()
            self.expect("]")
            return Index(t.text, index, self.since(t.span))
        return Var(t.text, t.span)

    # -- expressions

    def expr(self, min_prec: int = 1) -> Expr:
        left = self.unary()
        while True:
            t = self.tok
            prec = BINARY_PRECEDENCE.get(t.text) if t.kind == "op" else None
            # '**' is handled inside unary(); '<=>' and updates end an expression
            if prec is None or prec < min_prec or t.text == "**":
                return left
            self.advance()
            right = self.expr(prec + 1)
            left = BinOp(t.text, left, right, left.span.cover(right.span))

    def unary(self) -> Expr:
        if self.at("-"):
            start = self.advance().span
            operand = self.unary()
            return Neg(operand, start.cover(operand.span))
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.at("**"):
            self.advance()
            exponent = self.unary()  # right-associative, admits a signed exponent
            return BinOp("**", base, exponent, base.span.cover(exponent.span))
        return base

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            value = int(t.text)
            if value > MAX_LITERAL:
                raise ParseError(f"integer literal {t.text} exceeds 64 bits", t.span)
            return Num(value, t.span)
        if t.kind == "id":
            self.advance()
            if self.at("["):
                self.advance()
                index = self.expr()
                self.expect("]")
                return Index(t.text, index, self.since(t.span))
            return Var(t.text, t.span)
        if t.kind == "kw" and t.text == "size":
            self.advance()
            self.expect("(")
            name = self.ident().text
            self.expect(")")
            return Size(name, self.since(t.span))
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.fail({"integer", "identifier", "'size'", "'('", "'-'"})


def parse(source: str) -> Program:
    """Parse ``.jns`` source text into a :class:`Program`.

    Raises :class:`ParseError` at the first syntax error.
    """
    return _Parser(source).program()


def parse_expr(source: str) -> Expr:
    p = _Parser(source)
    e = p.expr()
    if p.tok.kind != "eof":
        raise p.fail({"end of input"})
    return e


def parse_stmts(source: str) -> Tuple[Stmt, ...]:
    p = _Parser(source)
    body = p.stmts()
    if p.tok.kind != "eof":
        raise p.fail(_STMT_START | {"end of input"})
    return body
