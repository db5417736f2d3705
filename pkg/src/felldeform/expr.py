"""Generator-word expressions, e.g. ``Z*W + 2 W^d Z`` or ``e(0.25) U V``.

Grammar (whitespace-insensitive)::

    expr    := term ('+' term)*
    term    := factor (['·'] factor)*          juxtaposition is the deformed product
    factor  := atom ('*' | '^d')*              ambient star, deformed star
    atom    := NAME | INT | 'e(' ['-'] NUMBER ')' | '(' expr ')'

Positions in error messages are 1-based character offsets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .deform import GradedElement, ambient_star

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
                    r"|(?P<dstar>\^d)|(?P<op>[-+*()·]))")


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int  # 1-based


def tokenize(src: str) -> list[Token]:
    out = []
    i = 0
    while i < len(src):
        if src[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(src, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {src[i]!r}", i + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), start + 1))
        i = m.end()
    out.append(Token("end", "", len(src) + 1))
    return out


class _Parser:
    def __init__(self, src: str, names: Mapping[str, GradedElement], ops):
        self.toks = tokenize(src)
        self.i = 0
        self.names = names
        self.ops = ops

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def eat(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            got = t.text or "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", t.pos)
        self.i += 1
        return t

    def parse(self) -> GradedElement:
        val = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return val

    def expr(self):
        val = self.term()
        while self.tok.kind == "op" and self.tok.text == "+":
            self.i += 1
            val = val + self.term()
        return val

    def _starts_factor(self) -> bool:
        t = self.tok
        return t.kind in ("name", "num") or (t.kind == "op" and t.text in ("(", "·"))

    def term(self):
        val = self.factor()
        while self._starts_factor():
            if self.tok.text == "·":
                self.i += 1
            val = self.ops.product(val, self.factor())
        return val

    def factor(self):
        val = self.atom()
        while True:
            if self.tok.kind == "op" and self.tok.text == "*":
                self.i += 1
                val = self.ops.ambient_star(val)
            elif self.tok.kind == "dstar":
                self.i += 1
                val = self.ops.star(val)
            else:
                return val

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            if not re.fullmatch(r"\d+", t.text):
                raise ParseError(f"scalars must be integers, got {t.text!r}", t.pos)
            return self.ops.constant(int(t.text))
        if t.kind == "name":
            self.i += 1
            if t.text == "e" and self.tok.kind == "op" and self.tok.text == "(":
                self.i += 1
                sign = 1.0
                if self.tok.kind == "op" and self.tok.text == "-":
                    self.i += 1
                    sign = -1.0
                num = self.eat("num")
                self.eat("op", ")")
                return self.ops.constant(np.exp(2j * np.pi * sign * float(num.text)))
            if t.text not in self.names:
                raise ParseError(f"unknown symbol {t.text}", t.pos)
            return self.names[t.text]
        if t.kind == "op" and t.text == "(":
            self.i += 1
            val = self.expr()
            self.eat("op", ")")
            return val
        got = t.text or "end of input"
        raise ParseError(f"unexpected {got!r}", t.pos)


@dataclass(frozen=True)
class ExprOps:
    product: Callable[[GradedElement, GradedElement], GradedElement]
    star: Callable[[GradedElement], GradedElement]
    constant: Callable[[complex], GradedElement]
    ambient_star: Callable[[GradedElement], GradedElement] = ambient_star


def evaluate(src: str, model, hbar: float | None = None) -> GradedElement:
    """Evaluate a generator word in ``model`` at ``hbar`` (the model's own by default)."""
    ops = ExprOps(product=lambda a, b: model.product(a, b, hbar),
                  star=lambda a: model.star(a, hbar), constant=model.constant)
    return _Parser(src, model.generators, ops).parse()

