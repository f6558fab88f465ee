"""Tokenizer, parser and pretty-printer for the declaration language.

A document is a sequence of declarations.  Block declarations carry a body of
``;``-terminated statements inside braces; expression declarations end in
``= expr;``.  Names are bare (letters, digits, ``_`` and ``'``) or quoted with
double quotes.  ``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from ..errors import SpecSyntaxError

BARE = re.compile(r"[A-Za-z0-9_'][A-Za-z0-9_']*\Z")
KINDS = ("category", "functor", "nattrans", "adjunction", "monad", "comonad", "class", "dfs", "qfs",
         "presheaf", "group", "comonad-product", "window")


# ------------------------------------------------------------------ AST
@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple = ()


@dataclass(frozen=True)
class NameSet:
    items: tuple = ()


@dataclass(frozen=True)
class Tup:
    items: tuple = ()


Expr = Union[str, Call, NameSet, Tup]


@dataclass
class Decl:
    """One declaration; ``head`` holds the names after the declared name, ``body`` the statements."""

    kind: str
    name: str
    head: tuple = ()
    body: tuple = ()
    expr: Expr | None = None
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class SpecDocument:
    decls: list[Decl] = field(default_factory=list)

    def names(self) -> list[str]:
        return [d.name for d in self.decls]

    def get(self, name: str) -> Decl | None:
        for d in self.decls:
            if d.name == name:
                return d
        return None


# ------------------------------------------------------------- tokenizer
@dataclass(frozen=True)
class Tok:
    kind: str          # name | str | sym | eof
    text: str
    line: int
    col: int


SYMBOLS = ("->", "-|", "=>", "{", "}", "(", ")", ";", ":", ",", "=", ".", "*")


def tokenize(text: str) -> list[Tok]:
    out: list[Tok] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == '"':
            j, buf = i + 1, []
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise SpecSyntaxError("unterminated string", line, col)
                if text[j] == "\\" and j + 1 < n:
                    j += 1
                buf.append(text[j])
                j += 1
            if j >= n:
                raise SpecSyntaxError("unterminated string", line, col)
            out.append(Tok("str", "".join(buf), line, col))
            col += j + 1 - i
            i = j + 1
            continue
        m = re.compile(r"[A-Za-z0-9_'][A-Za-z0-9_'-]*").match(text, i)
        if m:
            word = m.group(0)
            # a trailing '-' belongs to '->' or '-|', and only keywords contain '-'
            while "-" in word and word not in KINDS:
                word = word[:word.rindex("-")]
            out.append(Tok("name", word, line, col))
            i += len(word)
            col += len(word)
            continue
        for s in SYMBOLS:
            if text.startswith(s, i):
                out.append(Tok("sym", s, line, col))
                i += len(s)
                col += len(s)
                break
        else:
            raise SpecSyntaxError(f"unexpected character {c!r}", line, col)
    out.append(Tok("eof", "", line, col))
    return out


# ---------------------------------------------------------------- parser
class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Tok | None = None):
        t = tok or self.tok
        got = "end of input" if t.kind == "eof" else repr(t.text)
        return SpecSyntaxError(f"{msg}, got {got}", t.line, t.col)

    def at(self, sym: str) -> bool:
        return self.tok.kind == "sym" and self.tok.text == sym

    def at_word(self, word: str) -> bool:
        return self.tok.kind == "name" and self.tok.text == word

    def expect(self, sym: str) -> Tok:
        if not self.at(sym):
            raise self.error(f"expected {sym!r}")
        t = self.tok
        self.i += 1
        return t

    def keyword(self, word: str) -> None:
        if not self.at_word(word):
            raise self.error(f"expected {word!r}")
        self.i += 1

    def name(self, what: str = "a name") -> str:
        if self.tok.kind not in ("name", "str"):
            raise self.error(f"expected {what}")
        t = self.tok
        self.i += 1
        return t.text

    def names_until(self, stop: str) -> tuple[str, ...]:
        out = []
        while not self.at(stop):
            out.append(self.name())
        return tuple(out)

    # -------------------------------------------------------- expressions
    def expr(self) -> Expr:
        if self.at("{"):
            self.i += 1
            items = self.names_until("}")
            self.expect("}")
            return NameSet(items)
        if self.at("("):
            self.i += 1
            items = self.args(")")
            return Tup(items)
        nm = self.name("an expression")
        if self.at("("):
            self.i += 1
            return Call(nm, self.args(")"))
        return nm

    def args(self, close: str) -> tuple:
        items = []
        if self.at(close):
            self.i += 1
            return ()
        while True:
            items.append(self.expr())
            if self.at(","):
                self.i += 1
                continue
            self.expect(close)
            return tuple(items)

    # -------------------------------------------------------- declarations
    def document(self) -> SpecDocument:
        doc = SpecDocument()
        while self.tok.kind != "eof":
            doc.decls.append(self.decl())
        return doc

    def decl(self) -> Decl:
        t = self.tok
        if t.kind != "name" or t.text not in KINDS:
            raise self.error("expected a declaration keyword (" + ", ".join(KINDS) + ")")
        self.i += 1
        name = self.name("a declaration name")
        d = getattr(self, "_" + t.text.replace("-", "_"))(name)
        d.line, d.col = t.line, t.col
        return d

    def _end_expr(self) -> Expr:
        self.expect("=")
        e = self.expr()
        self.expect(";")
        return e

    def _block(self, stmt) -> tuple:
        self.expect("{")
        out = []
        while not self.at("}"):
            out.append(stmt())
            self.expect(";")
        self.expect("}")
        if self.at(";"):
            self.i += 1
        return tuple(out)

    def _category(self, name: str) -> Decl:
        if self.at("="):
            return Decl("category", name, expr=self._end_expr())

        def stmt():
            w = self.name("a statement")
            if w == "objects":
                self.expect(":")
                return ("objects",) + self.names_until(";")
            if w == "mor":
                f = self.name()
                self.expect(":")
                a = self.name()
                self.expect("->")
                return ("mor", f, a, self.name())
            if w == "compose":
                g = self.name()
                self.expect(".")
                f = self.name()
                self.expect("=")
                return ("compose", g, f, self.name())
            if w == "identity":
                o = self.name()
                self.expect("=")
                return ("identity", o, self.name())
            raise self.error("expected objects, mor, compose or identity", self.toks[self.i - 1])
        return Decl("category", name, body=self._block(stmt))

    def _mapping_block(self, words: tuple[str, ...]) -> tuple:
        def stmt():
            w = self.name("a statement")
            if w not in words:
                raise self.error("expected " + " or ".join(words), self.toks[self.i - 1])
            a = self.name()
            self.expect("->" if w in ("obj", "mor") else "=")
            return (w, a, self.name())
        return self._block(stmt)

    def _functor(self, name: str) -> Decl:
        self.expect(":")
        src = self.name("a source category")
        self.expect("->")
        tgt = self.name("a target category")
        return Decl("functor", name, (src, tgt), self._mapping_block(("obj", "mor")))

    def _nattrans(self, name: str) -> Decl:
        self.expect(":")
        f = self.name("a functor")
        self.expect("=>")
        g = self.name("a functor")
        return Decl("nattrans", name, (f, g), self._mapping_block(("at",)))

    def _adjunction(self, name: str) -> Decl:
        self.expect("=")
        if self.toks[self.i + 1].kind == "sym" and self.toks[self.i + 1].text == "(":
            e = self.expr()
            self.expect(";")
            return Decl("adjunction", name, expr=e)
        f = self.name("a left adjoint")
        self.expect("-|")
        g = self.name("a right adjoint")
        if self.at(";"):
            self.i += 1
            return Decl("adjunction", name, (f, g))
        return Decl("adjunction", name, (f, g), self._mapping_block(("unit", "counit")))

    def _components(self) -> tuple:
        out = []
        while True:
            a = self.name()
            self.expect(":")
            out.append((a, self.name()))
            if not self.at(","):
                return tuple(out)
            self.i += 1

    def _monad_like(self, kind: str, name: str, functor_word: str, words: tuple[str, str]) -> Decl:
        if self.at("="):
            return Decl(kind, name, expr=self._end_expr())
        self.keyword("on")
        base = self.name("a category")
        if self.at("="):
            return Decl(kind, name, (base,), expr=self._end_expr())

        def stmt():
            w = self.name("a statement")
            self.expect("=")
            if w == functor_word:
                return (w, self.name("a functor"))
            if w in words:
                return (w,) + self._components()
            raise self.error(f"expected {functor_word}, {words[0]} or {words[1]}", self.toks[self.i - 2])
        return Decl(kind, name, (base,), self._block(stmt))

    def _monad(self, name: str) -> Decl:
        return self._monad_like("monad", name, "T", ("unit", "mult"))

    def _comonad(self, name: str) -> Decl:
        return self._monad_like("comonad", name, "G", ("counit", "comult"))

    def _in_expr(self, kind: str, name: str) -> Decl:
        self.keyword("in")
        c = self.name("a category")
        return Decl(kind, name, (c,), expr=self._end_expr())

    def _class(self, name: str) -> Decl:
        return self._in_expr("class", name)

    def _dfs(self, name: str) -> Decl:
        return self._in_expr("dfs", name)

    def _qfs(self, name: str) -> Decl:
        return self._in_expr("qfs", name)

    def _presheaf(self, name: str) -> Decl:
        if self.at("="):
            return Decl("presheaf", name, expr=self._end_expr())
        self.keyword("on")
        base = self.name("a base category")

        def stmt():
            w = self.name("a statement")
            if w == "at":
                o = self.name()
                self.expect("=")
                self.expect("{")
                els = self.names_until("}")
                self.expect("}")
                return ("at", o) + els
            if w == "restrict":
                f = self.name()
                self.expect(":")
                pairs = []
                while True:
                    y = self.name()
                    self.expect("->")
                    pairs.append((y, self.name()))
                    if not self.at(","):
                        break
                    self.i += 1
                return ("restrict", f) + tuple(pairs)
            raise self.error("expected at or restrict", self.toks[self.i - 1])
        return Decl("presheaf", name, (base,), self._block(stmt))

    def _group(self, name: str) -> Decl:
        if self.at("="):
            return Decl("group", name, expr=self._end_expr())

        def stmt():
            w = self.name("a statement")
            self.expect(":")
            if w == "elements":
                return ("elements",) + self.names_until(";")
            if w == "table":
                a = self.name()
                self.expect("*")
                b = self.name()
                self.expect("=")
                return ("table", a, b, self.name())
            raise self.error("expected elements or table", self.toks[self.i - 2])
        return Decl("group", name, body=self._block(stmt))

    def _on_expr(self, kind: str, name: str) -> Decl:
        self.keyword("on")
        b = self.name("a base")
        return Decl(kind, name, (b,), expr=self._end_expr())

    def _window(self, name: str) -> Decl:
        return self._on_expr("window", name)

    def _comonad_product(self, name: str) -> Decl:
        return self._on_expr("comonad-product", name)


def parse(text: str) -> SpecDocument:
    return _Parser(text).document()


# ---------------------------------------------------------- pretty-print
def q(name: str) -> str:
    if BARE.match(name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def pretty_expr(e: Expr) -> str:
    if isinstance(e, str):
        return q(e)
    if isinstance(e, NameSet):
        return "{" + " ".join(q(x) for x in e.items) + "}"
    if isinstance(e, Tup):
        return "(" + ", ".join(pretty_expr(x) for x in e.items) + ")"
    return f"{q(e.fn)}(" + ", ".join(pretty_expr(x) for x in e.args) + ")"


def _stmt(kind: str, s: tuple) -> str:
    w = s[0]
    if kind == "category":
        if w == "objects":
            return "objects: " + " ".join(q(x) for x in s[1:])
        if w == "mor":
            return f"mor {q(s[1])}: {q(s[2])} -> {q(s[3])}"
        if w == "compose":
            return f"compose {q(s[1])}.{q(s[2])} = {q(s[3])}"
        return f"identity {q(s[1])} = {q(s[2])}"
    if kind in ("functor",):
        return f"{w} {q(s[1])} -> {q(s[2])}"
    if kind in ("nattrans", "adjunction"):
        return f"{w} {q(s[1])} = {q(s[2])}"
    if kind in ("monad", "comonad"):
        if len(s) == 2 and isinstance(s[1], str):
            return f"{w} = {q(s[1])}"
        return f"{w} = " + ", ".join(f"{q(a)}: {q(b)}" for a, b in s[1:])
    if kind == "presheaf":
        if w == "at":
            return f"at {q(s[1])} = {{" + " ".join(q(x) for x in s[2:]) + "}"
        return f"restrict {q(s[1])} : " + ", ".join(f"{q(a)} -> {q(b)}" for a, b in s[2:])
    if kind == "group":
        if w == "elements":
            return "elements: " + " ".join(q(x) for x in s[1:])
        return f"table: {q(s[1])}*{q(s[2])} = {q(s[3])}"
    raise ValueError(f"no statements in {kind}")


def pretty_decl(d: Decl) -> str:
    k, n = d.kind, q(d.name)
    if k == "functor":
        head = f"functor {n} : {q(d.head[0])} -> {q(d.head[1])}"
    elif k == "nattrans":
        head = f"nattrans {n} : {q(d.head[0])} => {q(d.head[1])}"
    elif k == "adjunction" and d.expr is not None:
        return f"adjunction {n} = {pretty_expr(d.expr)};"
    elif k == "adjunction":
        head = f"adjunction {n} = {q(d.head[0])} -| {q(d.head[1])}"
        if not d.body:
            return head + ";"
    elif k in ("class", "dfs", "qfs"):
        return f"{k} {n} in {q(d.head[0])} = {pretty_expr(d.expr)};"
    elif k in ("window", "comonad-product"):
        return f"{k} {n} on {q(d.head[0])} = {pretty_expr(d.expr)};"
    elif d.head:
        head = f"{k} {n} on {q(d.head[0])}"
    else:
        head = f"{k} {n}"
    if d.expr is not None:
        return f"{head} = {pretty_expr(d.expr)};"
    lines = [head + " {"] + [f"  {_stmt(k, s)};" for s in d.body] + ["}"]
    return "\n".join(lines)


def pretty(doc: SpecDocument) -> str:
    return "\n\n".join(pretty_decl(d) for d in doc.decls) + "\n"
