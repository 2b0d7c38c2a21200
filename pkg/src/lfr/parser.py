"""Concrete syntax for signatures in both the source and target languages.

The lexer has two modes: in source mode `^` is the intersection symbol,
while in target mode it is an ordinary identifier character (mangled
names like even^ live there).  One raw expression grammar serves both;
elaboration into the proper AST category happens per declaration.

Binders take maximal scope, arrows are right-associative, `^` binds
looser than arrows, `*` sits between arrows and declared infix
operators, and application binds tightest except for the postfix
projections `.1` and `.2`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import lfi as L
from .diagnostics import LexError, ParseError, SourceSpan
from .printer import print_lfi  # noqa: F401  (re-exported for convenience)
from .syntax import (
    App,
    Const,
    ConstRef,
    CPi,
    CSort,
    CTop,
    CInter,
    FVar,
    KPi,
    KType,
    Lam,
    SApp,
    SConst,
    Signature,
    SInter,
    SortFam,
    SPi,
    STop,
    SubDecl,
    TApp,
    TConst,
    TermConst,
    TPi,
    TypeFam,
    close_at,
)

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_IDENT_CONT = _IDENT_START | set("0123456789_'/*-")

# Longest match first.
_SYMBOLS = ["[[", "]]", "-:>", "->", "<-", "<<", "<:", "<>", "::",
            "{", "}", "(", ")", "[", "]", "^", "#", "*", ",", "<", ">",
            ":", "."]


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | NUM | SYM | EOF
    text: str
    span: SourceSpan


class _Lexer:
    def __init__(self, text: str, filename: str, target_mode: bool):
        self.text = text
        self.filename = filename
        self.target_mode = target_mode
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int) -> None:
        for _ in range(n):
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _span(self, start_line: int, start_col: int) -> SourceSpan:
        return SourceSpan(self.filename, start_line, start_col, self.line, self.col)

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        text = self.text
        while True:
            while self.pos < len(text) and text[self.pos] in " \t\r\n":
                self._advance(1)
            if self.pos >= len(text):
                out.append(Token("EOF", "", self._span(self.line, self.col)))
                return out
            line, col = self.line, self.col
            ch = text[self.pos]
            if ch == "%":
                if text.startswith("%infix", self.pos):
                    self._advance(len("%infix"))
                    out.append(Token("SYM", "%infix", self._span(line, col)))
                    continue
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance(1)
                continue
            if ch in _IDENT_START:
                out.append(self._ident(line, col))
                continue
            if ch.isdigit():
                start = self.pos
                while self.pos < len(text) and text[self.pos].isdigit():
                    self._advance(1)
                out.append(Token("NUM", text[start:self.pos], self._span(line, col)))
                continue
            if ch == ".":
                nxt = text[self.pos + 1:self.pos + 2]
                after = text[self.pos + 2:self.pos + 3]
                if nxt in ("1", "2") and not (after and (after in _IDENT_CONT or after.isdigit())):
                    self._advance(2)
                    out.append(Token("SYM", "." + nxt, self._span(line, col)))
                    continue
                self._advance(1)
                out.append(Token("SYM", ".", self._span(line, col)))
                continue
            sym = self._symbol()
            if sym is None:
                raise LexError(f"unexpected character {ch!r}",
                               self._span(line, col))
            self._advance(len(sym))
            out.append(Token("SYM", sym, self._span(line, col)))

    def _ident(self, line: int, col: int) -> Token:
        text = self.text
        start = self.pos
        self._advance(1)
        while self.pos < len(text):
            ch = text[self.pos]
            if ch == "^" and self.target_mode:
                self._advance(1)
                continue
            if ch == "-":
                nxt = text[self.pos + 1:self.pos + 2]
                if nxt in (">", ":"):
                    break
                if nxt and nxt in _IDENT_CONT:
                    self._advance(1)
                    continue
                break
            if ch in _IDENT_CONT:
                self._advance(1)
                continue
            break
        return Token("IDENT", text[start:self.pos], self._span(line, col))

    def _symbol(self) -> Optional[str]:
        for sym in _SYMBOLS:
            if self.text.startswith(sym, self.pos):
                if sym == "^" and self.target_mode:
                    return None
                return sym
        return None


# ---------------------------------------------------------------------------
# Raw expressions


@dataclass(frozen=True)
class RIdent:
    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class RNum:
    value: int
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class RTop:
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class RApp:
    fn: "RawExpr"
    arg: "RawExpr"


@dataclass(frozen=True)
class RIrrApp:
    fn: "RawExpr"
    arg: "RawExpr"


@dataclass(frozen=True)
class RProj:
    base: "RawExpr"
    which: int


@dataclass(frozen=True)
class RArrow:
    dom: "RawExpr"
    cod: "RawExpr"


@dataclass(frozen=True)
class RIrrArrow:
    dom: "RawExpr"
    cod: "RawExpr"


@dataclass(frozen=True)
class RInter:
    left: "RawExpr"
    right: "RawExpr"


@dataclass(frozen=True)
class RProd:
    left: "RawExpr"
    right: "RawExpr"


@dataclass(frozen=True)
class RPi:
    name: str
    colon: str  # ":" or "::"
    dom: "RawExpr"
    body: "RawExpr"
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class RLam:
    name: str
    body: "RawExpr"
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class RPair:
    left: "RawExpr"
    right: "RawExpr"


@dataclass(frozen=True)
class RUnitTerm:
    span: Optional[SourceSpan] = field(default=None, compare=False)


RawExpr = object  # union of the above; kept loose on purpose


def _raw_span(e) -> Optional[SourceSpan]:
    match e:
        case RIdent() | RNum() | RTop() | RPi() | RLam() | RUnitTerm():
            return e.span
        case RApp(f, _) | RIrrApp(f, _) | RProj(f, _) | RArrow(f, _) | RIrrArrow(f, _):
            return _raw_span(f)
        case RInter(f, _) | RProd(f, _) | RPair(f, _):
            return _raw_span(f)
    return None


_ATOM_STARTERS_SYM = {"#", "(", "<", "<>"}


class _Parser:
    def __init__(self, tokens: list[Token], filename: str, target_mode: bool):
        self.toks = tokens
        self.pos = 0
        self.filename = filename
        self.target_mode = target_mode
        self.infix: dict[str, int] = {}

    # -- token plumbing

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "SYM" and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            t = self.peek()
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}",
                             t.span)
        return self.next()

    def expect_ident(self, what: str = "an identifier") -> Token:
        t = self.peek()
        if t.kind != "IDENT":
            raise ParseError(f"expected {what}, found {t.text or 'end of input'!r}",
                             t.span)
        return self.next()

    # -- expressions

    def parse_expr(self):
        if self.at("{"):
            return self._parse_brace_binder()
        if self.at("["):
            return self._parse_lambda()
        left = self._parse_arrows()
        if self.at("^"):
            self.next()
            return RInter(left, self.parse_expr())
        return left

    def _parse_brace_binder(self):
        start = self.expect("{")
        name = self.expect_ident("a binder name").text
        if self.at("::"):
            colon = self.next().text
        elif self.at(":"):
            colon = self.next().text
        else:
            t = self.peek()
            raise ParseError(f"expected ':' or '::' in binder, found {t.text!r}",
                             t.span)
        dom = self.parse_expr()
        self.expect("}")
        body = self.parse_expr()
        return RPi(name, colon, dom, body, start.span)

    def _parse_lambda(self):
        start = self.expect("[")
        name = self.expect_ident("a binder name").text
        self.expect("]")
        body = self.parse_expr()
        return RLam(name, body, start.span)

    def _parse_arrows(self):
        items = [self._parse_prod()]
        ops: list[str] = []
        while self.at("->") or self.at("-:>") or self.at("<-"):
            ops.append(self.next().text)
            if self.at("{") or self.at("["):
                items.append(self.parse_expr())
                break
            items.append(self._parse_prod())
        if not ops:
            return items[0]
        if all(op in ("->", "-:>") for op in ops):
            result = items[-1]
            for op, item in zip(reversed(ops), reversed(items[:-1])):
                result = (RArrow if op == "->" else RIrrArrow)(item, result)
            return result
        if all(op == "<-" for op in ops):
            result = items[0]
            for item in items[1:]:
                result = RArrow(item, result)
            return result
        raise ParseError("mixing -> and <- in one chain needs parentheses",
                         _raw_span(items[0]))

    def _parse_prod(self):
        left = self._parse_infix(0)
        if self.at("*"):
            self.next()
            return RProd(left, self._parse_prod())
        return left

    def _parse_infix(self, min_prec: int):
        left = self._parse_app()
        while True:
            t = self.peek()
            if t.kind == "IDENT" and self.infix.get(t.text, -1) >= min_prec:
                op = self.next()
                rhs = self._parse_infix(self.infix[op.text])
                left = RApp(RApp(RIdent(op.text, op.span), left), rhs)
            else:
                return left

    def _starts_atom(self) -> bool:
        t = self.peek()
        if t.kind == "IDENT":
            return t.text not in self.infix
        if t.kind == "NUM":
            return True
        return t.kind == "SYM" and t.text in _ATOM_STARTERS_SYM

    def _parse_app(self):
        head = self._parse_atom_postfix()
        while True:
            if self.at("[["):
                self.next()
                arg = self.parse_expr()
                self.expect("]]")
                head = RIrrApp(head, arg)
            elif self._starts_atom():
                head = RApp(head, self._parse_atom_postfix())
            else:
                return head

    def _parse_atom_postfix(self):
        base = self._parse_atom()
        while self.at(".1") or self.at(".2"):
            which = int(self.next().text[1])
            base = RProj(base, which)
        return base

    def _parse_atom(self):
        t = self.peek()
        if t.kind == "IDENT":
            self.next()
            return RIdent(t.text, t.span)
        if t.kind == "NUM":
            self.next()
            return RNum(int(t.text), t.span)
        if self.at("#"):
            self.next()
            return RTop(t.span)
        if self.at("("):
            self.next()
            e = self.parse_expr()
            self.expect(")")
            return e
        if self.at("["):
            return self._parse_lambda()
        if self.at("<>"):
            self.next()
            return RUnitTerm(t.span)
        if self.at("<"):
            self.next()
            left = self.parse_expr()
            self.expect(",")
            right = self.parse_expr()
            self.expect(">")
            return RPair(left, right)
        raise ParseError(f"expected an expression, found {t.text or 'end of input'!r}",
                         t.span)


def _is_kind_expr(e) -> bool:
    """A classifier is a kind iff some tail position reaches `type` or `sort`."""
    match e:
        case RIdent(n):
            return n in ("type", "sort")
        case RArrow(_, c) | RIrrArrow(_, c):
            return _is_kind_expr(c)
        case RPi(_, _, _, b):
            return _is_kind_expr(b)
        case RProd(l, r):
            return _is_kind_expr(l) or _is_kind_expr(r)
        case RInter(l, r):
            return _is_kind_expr(l) or _is_kind_expr(r)
    return False


# ---------------------------------------------------------------------------
# Elaboration into the source AST


class _SourceElab:
    def __init__(self):
        self.term_consts: set[str] = set()
        self.fam_kinds: dict[str, KType | KPi] = {}

    def term(self, e, scope: list[str]):
        match e:
            case RIdent(n):
                if n in scope:
                    return FVar(n)
                if n in self.term_consts:
                    return Const(n)
                if n[:1].isupper():
                    raise ParseError(
                        f"undeclared uppercase identifier {n}; implicit "
                        f"quantification is not supported, bind it explicitly",
                        e.span)
                return FVar(n)
            case RApp(f, a):
                fn = self.term(f, scope)
                if isinstance(fn, Lam):
                    raise ParseError(
                        "application of a function expression is not a "
                        "canonical form", _raw_span(e))
                return App(fn, self.term(a, scope))
            case RLam(x, b):
                return Lam(x, close_at(self.term(b, scope + [x]), x))
        raise ParseError("expected a term", _raw_span(e))

    def type(self, e, scope: list[str]):
        match e:
            case RIdent(n):
                return TConst(n)
            case RApp(f, a):
                fn = self.type(f, scope)
                if not isinstance(fn, (TConst, TApp)):
                    raise ParseError("expected an atomic type", _raw_span(e))
                return TApp(fn, self.term(a, scope))
            case RArrow(d, c):
                return TPi("x", self.type(d, scope), self.type(c, scope))
            case RPi(x, ":", d, b):
                return TPi(x, self.type(d, scope),
                           close_at(self.type(b, scope + [x]), x))
            case RPi(_, "::", _, _):
                raise ParseError("type binders use ':', not '::'", e.span)
        raise ParseError("expected a type", _raw_span(e))

    def kind(self, e, scope: list[str]):
        match e:
            case RIdent("type"):
                return KType()
            case RArrow(d, c):
                return KPi("x", self.type(d, scope), self.kind(c, scope))
            case RPi(x, ":", d, b):
                return KPi(x, self.type(d, scope),
                           close_at(self.kind(b, scope + [x]), x))
        raise ParseError("expected a kind", _raw_span(e))

    def sort(self, e, scope: list[str]):
        match e:
            case RIdent(n):
                return SConst(n)
            case RTop():
                return STop()
            case RApp(f, a):
                fn = self.sort(f, scope)
                if not isinstance(fn, (SConst, SApp)):
                    raise ParseError("expected an atomic sort", _raw_span(e))
                return SApp(fn, self.term(a, scope))
            case RInter(l, r):
                return SInter(self.sort(l, scope), self.sort(r, scope))
            case RArrow(d, c):
                return SPi("x", self.sort(d, scope), None, self.sort(c, scope))
            case RPi(x, "::", d, b):
                return SPi(x, self.sort(d, scope), None,
                           close_at(self.sort(b, scope + [x]), x))
            case RPi(_, ":", _, _):
                raise ParseError("sort binders use '::', not ':'", e.span)
        raise ParseError("expected a sort", _raw_span(e))

    def cls(self, e, scope: list[str]):
        match e:
            case RIdent("sort"):
                return CSort()
            case RTop():
                return CTop()
            case RInter(l, r):
                return CInter(self.cls(l, scope), self.cls(r, scope))
            case RArrow(d, c):
                return CPi("x", self.sort(d, scope), None, self.cls(c, scope))
            case RPi(x, "::", d, b):
                return CPi(x, self.sort(d, scope), None,
                           close_at(self.cls(b, scope + [x]), x))
            case RPi(_, ":", _, _):
                raise ParseError("class binders use '::', not ':'", e.span)
        raise ParseError("expected a class", _raw_span(e))


def _default_class(kind):
    """The maximal class refining a kind: every domain is the top sort."""
    match kind:
        case KType():
            return CSort()
        case KPi(h, _, c):
            return CPi(h, STop(), None, _default_class(c))
    raise TypeError(f"_default_class: {kind!r}")


def parse_signature(text: str, filename: str = "<input>") -> Signature:
    tokens = _Lexer(text, filename, target_mode=False).tokens()
    p = _Parser(tokens, filename, target_mode=False)
    elab = _SourceElab()
    sig = Signature()
    while p.peek().kind != "EOF":
        if p.at("%infix"):
            p.next()
            assoc = p.expect_ident("an associativity").text
            if assoc != "right":
                raise ParseError("only right-associative infix is supported",
                                 p.toks[p.pos - 1].span)
            prec_tok = p.peek()
            if prec_tok.kind != "NUM":
                raise ParseError("expected a precedence", prec_tok.span)
            p.next()
            op = p.expect_ident("an operator name")
            if op.text not in elab.term_consts:
                raise ParseError(
                    f"infix operator {op.text} must name a declared constant",
                    op.span)
            p.expect(".")
            p.infix[op.text] = int(prec_tok.text)
            continue
        name = p.expect_ident("a declaration name")
        if p.at(":"):
            p.next()
            e = p.parse_expr()
            p.expect(".")
            if _is_kind_expr(e):
                kind = elab.kind(e, [])
                elab.fam_kinds[name.text] = kind
                sig.append(TypeFam(name.text, kind, name.span))
            else:
                ty = elab.type(e, [])
                elab.term_consts.add(name.text)
                sig.append(TermConst(name.text, ty, name.span))
        elif p.at("<<"):
            p.next()
            fam = p.expect_ident("a type family name")
            if p.at("::"):
                p.next()
                e = p.parse_expr()
                p.expect(".")
                cls = elab.cls(e, [])
            else:
                p.expect(".")
                kind = elab.fam_kinds.get(fam.text)
                if kind is None:
                    raise ParseError(
                        f"cannot default the class of {name.text}: unknown "
                        f"family {fam.text}", fam.span)
                cls = _default_class(kind)
            sig.append(SortFam(name.text, fam.text, cls, name.span))
        elif p.at("::"):
            p.next()
            e = p.parse_expr()
            p.expect(".")
            sig.append(ConstRef(name.text, elab.sort(e, []), name.span))
        elif p.at("<:"):
            p.next()
            sup = p.expect_ident("a sort family name")
            p.expect(".")
            sig.append(SubDecl(name.text, sup.text, name.span))
        else:
            t = p.peek()
            raise ParseError(
                f"expected ':', '::', '<<', or '<:' after {name.text}, "
                f"found {t.text or 'end of input'!r}", t.span)
    return sig


# ---------------------------------------------------------------------------
# Convenience entry points for single expressions


def parse_term(text: str, consts: frozenset[str] | set[str] = frozenset(),
               filename: str = "<term>"):
    """Parse one term; identifiers in `consts` become constants."""
    p, elab = _expr_parser(text, filename, consts)
    e = p.parse_expr()
    _expect_eof(p)
    return elab.term(e, [])


def parse_type(text: str, consts: frozenset[str] | set[str] = frozenset(),
               filename: str = "<type>"):
    p, elab = _expr_parser(text, filename, consts)
    e = p.parse_expr()
    _expect_eof(p)
    return elab.type(e, [])


def parse_kind(text: str, consts: frozenset[str] | set[str] = frozenset(),
               filename: str = "<kind>"):
    p, elab = _expr_parser(text, filename, consts)
    e = p.parse_expr()
    _expect_eof(p)
    return elab.kind(e, [])


def parse_sort(text: str, consts: frozenset[str] | set[str] = frozenset(),
               filename: str = "<sort>"):
    p, elab = _expr_parser(text, filename, consts)
    e = p.parse_expr()
    _expect_eof(p)
    return elab.sort(e, [])


def parse_class(text: str, consts: frozenset[str] | set[str] = frozenset(),
                filename: str = "<class>"):
    p, elab = _expr_parser(text, filename, consts)
    e = p.parse_expr()
    _expect_eof(p)
    return elab.cls(e, [])


def _expr_parser(text, filename, consts):
    tokens = _Lexer(text, filename, target_mode=False).tokens()
    p = _Parser(tokens, filename, target_mode=False)
    elab = _SourceElab()
    elab.term_consts = set(consts)
    return p, elab


def _expect_eof(p: _Parser) -> None:
    t = p.peek()
    if t.kind != "EOF":
        raise ParseError(f"unexpected trailing input {t.text!r}", t.span)


# ---------------------------------------------------------------------------
# Elaboration into the target AST


class _TargetElab:
    def __init__(self):
        self.consts: set[str] = set()

    def term(self, e, scope: list[str]):
        match e:
            case RIdent(n):
                if n in scope:
                    return L.IFVar(n)
                if n in self.consts:
                    return L.IConst(n)
                return L.IFVar(n)
            case RApp(f, a):
                fn = self.term(f, scope)
                if not L.is_lfi_atomic(fn):
                    raise ParseError("application of a non-atomic term",
                                     _raw_span(e))
                return L.IApp(fn, self.term(a, scope))
            case RIrrApp(f, a):
                fn = self.term(f, scope)
                if not L.is_lfi_atomic(fn):
                    raise ParseError("irrelevant application of a non-atomic "
                                     "term", _raw_span(e))
                return L.IIrrApp(fn, self.term(a, scope))
            case RProj(b, which):
                base = self.term(b, scope)
                if not L.is_lfi_atomic(base):
                    raise ParseError("projection from a non-atomic term",
                                     _raw_span(e))
                return (L.IFst if which == 1 else L.ISnd)(base)
            case RLam(x, b):
                return L.ILam(x, L.close_lfi(self.term(b, scope + [x]), x))
            case RPair(l, r):
                return L.IPair(self.term(l, scope), self.term(r, scope))
            case RUnitTerm():
                return L.IUnit()
        raise ParseError("expected a term", _raw_span(e))

    def type(self, e, scope: list[str]):
        match e:
            case RIdent(n):
                return L.ITConst(n)
            case RNum(1):
                return L.ITUnitT()
            case RApp(f, a):
                fn = self.type(f, scope)
                if not isinstance(fn, (L.ITConst, L.ITApp, L.ITIrrApp)):
                    raise ParseError("expected an atomic type", _raw_span(e))
                return L.ITApp(fn, self.term(a, scope))
            case RIrrApp(f, a):
                fn = self.type(f, scope)
                if not isinstance(fn, (L.ITConst, L.ITApp, L.ITIrrApp)):
                    raise ParseError("expected an atomic type", _raw_span(e))
                return L.ITIrrApp(fn, self.term(a, scope))
            case RArrow(d, c):
                return L.ITPi("x", self.type(d, scope), self.type(c, scope))
            case RIrrArrow(d, c):
                return L.ITIrrPi("x", self.type(d, scope), self.type(c, scope))
            case RPi(x, ":", d, b):
                return L.ITPi(x, self.type(d, scope),
                              L.close_lfi(self.type(b, scope + [x]), x))
            case RPi(x, "::", d, b):
                return L.ITIrrPi(x, self.type(d, scope),
                                 L.close_lfi(self.type(b, scope + [x]), x))
            case RProd(l, r):
                return L.ITProd(self.type(l, scope), self.type(r, scope))
        raise ParseError("expected a type", _raw_span(e))

    def kind(self, e, scope: list[str]):
        match e:
            case RIdent("type"):
                return L.IKType()
            case RNum(1):
                return L.IKUnit()
            case RArrow(d, c):
                return L.IKPi("x", self.type(d, scope), self.kind(c, scope))
            case RIrrArrow(d, c):
                return L.IKIrrPi("x", self.type(d, scope), self.kind(c, scope))
            case RPi(x, ":", d, b):
                return L.IKPi(x, self.type(d, scope),
                              L.close_lfi(self.kind(b, scope + [x]), x))
            case RPi(x, "::", d, b):
                return L.IKIrrPi(x, self.type(d, scope),
                                 L.close_lfi(self.kind(b, scope + [x]), x))
            case RProd(l, r):
                return L.IKProd(self.kind(l, scope), self.kind(r, scope))
        raise ParseError("expected a kind", _raw_span(e))


def parse_lfi(text: str, filename: str = "<input>") -> L.LfiSignature:
    tokens = _Lexer(text, filename, target_mode=True).tokens()
    p = _Parser(tokens, filename, target_mode=True)
    elab = _TargetElab()
    sig = L.LfiSignature()
    while p.peek().kind != "EOF":
        name = p.expect_ident("a declaration name")
        p.expect(":")
        e = p.parse_expr()
        p.expect(".")
        if _is_kind_expr(e):
            sig.append(L.LfiDecl(name.text, elab.kind(e, []), name.span))
        else:
            sig.append(L.LfiDecl(name.text, elab.type(e, []), name.span))
        elab.consts.add(name.text)
    return sig
