"""Tiny recursive-descent parser shared by the coefficient and rational-function grammars.

expr   := term (('+'|'-') term)*
term   := unary (('*'|'/') unary)*
unary  := ('-'|'+') unary | power
power  := atom ('^' exponent)?
atom   := INT | NAME | 'sqrt' '(' expr ')' | '(' expr ')'
"""

import re

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(1) if m.group(1) else m.start(2) if m.group(2) else m.start(3)
        if m.group(1):
            toks.append(("int", m.group(1), start))
        elif m.group(2):
            toks.append(("name", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


def _line_col(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class Parser:
    """`ctx` supplies number(int), name(str), sqrt(value) and the arithmetic via operators."""

    def __init__(self, text, ctx):
        self.text = text
        self.ctx = ctx
        self.toks = _tokenize(text)
        self.i = 0

    def error(self, msg, pos=None):
        if pos is None:
            pos = self.toks[self.i][2]
        line, col = _line_col(self.text, pos)
        raise ParseError(msg, line, col)

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            self.error(f"expected {value or kind}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        val = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                val = val * rhs
            else:
                try:
                    val = val / rhs
                except ZeroDivisionError:
                    self.error("division by zero", tok[2])
        return val

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            val = self.unary()
            return -val if tok[1] == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            tok = self.take()
            exp = self.exponent()
            try:
                return base ** exp
            except ZeroDivisionError:
                self.error("division by zero", tok[2])
        return base

    def exponent(self):
        sign = 1
        paren = False
        if self.peek()[0] == "op" and self.peek()[1] == "(":
            self.take()
            paren = True
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            if self.take()[1] == "-":
                sign = -sign
        n = int(self.take("int")[1]) * sign
        if paren:
            self.take("op", ")")
        return n

    def atom(self):
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            return self.ctx.number(int(tok[1]))
        if tok[0] == "name":
            self.take()
            if tok[1] == "sqrt":
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                try:
                    return self.ctx.sqrt(arg)
                except ParseError:
                    raise
                except Exception as exc:  # domain failure inside sqrt
                    self.error(f"sqrt: {exc}", tok[2])
            try:
                return self.ctx.name(tok[1])
            except KeyError:
                self.error(f"unknown name {tok[1]!r}", tok[2])
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            val = self.expr()
            self.take("op", ")")
            return val
        self.error(f"unexpected {tok[1] or 'end of input'!r}")
