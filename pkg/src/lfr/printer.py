"""Pretty printers for source and target syntax.

Printing aims for minimal parentheses while staying reparseable: the
property parse(print(x)) == x (up to alpha-equivalence) is the contract.

Each position carries a precedence level and an "extends" flag.  Levels:
0 full expression, 1 intersection operand, 2 arrow domain or product
side, 3 application head, 4 spine argument.  The flag records whether
the reparse of this position runs to a closing delimiter, which is what
makes a bare binder (maximal scope) safe to print.
"""

from __future__ import annotations

import dataclasses

from . import lfi as L
from .syntax import (
    App,
    Arrow,
    Base,
    BVar,
    CInter,
    Const,
    ConstRef,
    CPi,
    CSort,
    CTop,
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
    free_vars,
    fresh_name,
    open_at,
    used_names,
)

# "?" cannot occur in identifiers, so this probe name never collides.
_PROBE = "?d"


def _wrap(cond: bool, s: str) -> str:
    return f"({s})" if cond else s


def _forge_fvar(t):
    if isinstance(t, (L.IConst, L.IFVar, L.IBVar, L.IApp, L.IIrrApp, L.IFst,
                      L.ISnd, L.IHole, L.ILam, L.IPair, L.IUnit, L.IRevApp,
                      L.ITConst, L.ITHole, L.ITApp, L.ITIrrApp, L.ITPi,
                      L.ITIrrPi, L.ITProd, L.ITUnitT, L.IKType, L.IKPi,
                      L.IKIrrPi, L.IKProd, L.IKUnit)):
        return L.IFVar(_PROBE)
    return FVar(_PROBE)


def _uses_binder(cod) -> bool:
    if isinstance(cod, (L.IKType, L.IKUnit, L.ITUnitT)):
        return False
    probe = _forge_fvar(cod)
    if isinstance(probe, L.IFVar):
        return _PROBE in L.lfi_free_vars(L.open_lfi(cod, probe))
    return _PROBE in free_vars(open_at(cod, probe))


# ---------------------------------------------------------------------------
# Source syntax


def pp_term(t) -> str:
    return _p_term(t, 0, True)


def pp_type(a) -> str:
    return _p_type(a, 0, True)


def pp_sort(s) -> str:
    return _p_sort(s, 0, True)


def pp_kind(k) -> str:
    return _p_kind(k, 0, True)


def pp_class(c) -> str:
    return _p_class(c, 0, True)


def pp_simple(a) -> str:
    match a:
        case Base(n):
            return n
        case Arrow(d, c):
            dom = pp_simple(d)
            if isinstance(d, Arrow):
                dom = f"({dom})"
            return f"{dom} -> {pp_simple(c)}"
    raise TypeError(f"pp_simple: {a!r}")


def _p_term(t, lvl: int, ext: bool) -> str:
    match t:
        case FVar(n) | Const(n):
            return n
        case BVar(i):
            return f"?{i}"
        case App(f, a):
            s = f"{_p_term(f, 3, False)} {_p_term(a, 4, False)}"
            return _wrap(lvl >= 4, s)
        case Lam(h, b):
            x = fresh_name(h, used_names(b))
            s = f"[{x}] {_p_term(open_at(b, FVar(x)), 0, True)}"
            return _wrap(not ext, s)
    raise TypeError(f"pp_term: {t!r}")


def _p_type(a, lvl: int, ext: bool) -> str:
    match a:
        case TConst(n):
            return n
        case TApp(f, arg):
            s = f"{_p_type(f, 3, False)} {_p_term(arg, 4, False)}"
            return _wrap(lvl >= 4, s)
        case TPi(h, d, c):
            if _uses_binder(c):
                x = fresh_name(h, used_names(c))
                s = f"{{{x} : {_p_type(d, 0, True)}}} {_p_type(open_at(c, FVar(x)), 0, True)}"
                return _wrap(not ext, s)
            s = f"{_p_type(d, 2, False)} -> {_p_type(open_at(c, FVar(_PROBE)), 1, ext)}"
            return _wrap(lvl >= 2, s)
    raise TypeError(f"pp_type: {a!r}")


def _p_kind(k, lvl: int, ext: bool) -> str:
    match k:
        case KType():
            return "type"
        case KPi(h, d, c):
            if _uses_binder(c):
                x = fresh_name(h, used_names(c))
                s = f"{{{x} : {_p_type(d, 0, True)}}} {_p_kind(open_at(c, FVar(x)), 0, True)}"
                return _wrap(not ext, s)
            s = f"{_p_type(d, 2, False)} -> {_p_kind(open_at(c, FVar(_PROBE)), 1, ext)}"
            return _wrap(lvl >= 2, s)
    raise TypeError(f"pp_kind: {k!r}")


def _p_sort(s, lvl: int, ext: bool) -> str:
    match s:
        case SConst(n):
            return n
        case STop():
            return "#"
        case SApp(f, arg):
            out = f"{_p_sort(f, 3, False)} {_p_term(arg, 4, False)}"
            return _wrap(lvl >= 4, out)
        case SInter(l, r):
            out = f"{_p_sort(l, 1, False)} ^ {_p_sort(r, 0, ext)}"
            return _wrap(lvl >= 1, out)
        case SPi(h, d, _, c):
            if _uses_binder(c):
                x = fresh_name(h, used_names(c))
                out = f"{{{x} :: {_p_sort(d, 0, True)}}} {_p_sort(open_at(c, FVar(x)), 0, True)}"
                return _wrap(not ext, out)
            out = f"{_p_sort(d, 2, False)} -> {_p_sort(open_at(c, FVar(_PROBE)), 1, ext)}"
            return _wrap(lvl >= 2, out)
    raise TypeError(f"pp_sort: {s!r}")


def _p_class(c, lvl: int, ext: bool) -> str:
    match c:
        case CSort():
            return "sort"
        case CTop():
            return "#"
        case CInter(l, r):
            out = f"{_p_class(l, 1, False)} ^ {_p_class(r, 0, ext)}"
            return _wrap(lvl >= 1, out)
        case CPi(h, d, _, b):
            if _uses_binder(b):
                x = fresh_name(h, used_names(b))
                out = f"{{{x} :: {_p_sort(d, 0, True)}}} {_p_class(open_at(b, FVar(x)), 0, True)}"
                return _wrap(not ext, out)
            out = f"{_p_sort(d, 2, False)} -> {_p_class(open_at(b, FVar(_PROBE)), 1, ext)}"
            return _wrap(lvl >= 2, out)
    raise TypeError(f"pp_class: {c!r}")


def pp_decl(d) -> str:
    match d:
        case TypeFam(n, k):
            return f"{n} : {pp_kind(k)}."
        case TermConst(n, a):
            return f"{n} : {pp_type(a)}."
        case SortFam(n, ref, cls):
            return f"{n} << {ref} :: {pp_class(cls)}."
        case SubDecl(s1, s2):
            return f"{s1} <: {s2}."
        case ConstRef(c, s):
            return f"{c} :: {pp_sort(s)}."
    raise TypeError(f"pp_decl: {d!r}")


def pp_signature(sig: Signature) -> str:
    return "".join(pp_decl(d) + "\n" for d in sig)


# ---------------------------------------------------------------------------
# Target syntax


def _lfi_used(t) -> set[str]:
    out: set[str] = set()
    _lfi_used_walk(t, out)
    return out


def _lfi_used_walk(t, out: set[str]) -> None:
    if isinstance(t, (L.IFVar, L.IConst, L.ITConst)):
        out.add(t.name)
        return
    if dataclasses.is_dataclass(t):
        for f in dataclasses.fields(t):
            v = getattr(t, f.name)
            if dataclasses.is_dataclass(v):
                _lfi_used_walk(v, out)


def pp_lfi_term(t) -> str:
    return _pl_term(t, 0, True)


def pp_lfi_type(a) -> str:
    return _pl_type(a, 0, True)


def pp_lfi_kind(k) -> str:
    return _pl_kind(k, 0, True)


def _pl_term(t, lvl: int, ext: bool) -> str:
    match t:
        case L.IConst(n) | L.IFVar(n):
            return n
        case L.IBVar(i):
            return f"?{i}"
        case L.IHole(k):
            return f"?h{k}"
        case L.IApp(f, a):
            s = f"{_pl_term(f, 3, False)} {_pl_term(a, 4, False)}"
            return _wrap(lvl >= 4, s)
        case L.IIrrApp(f, a):
            s = f"{_pl_term(f, 3, False)} [[ {_pl_term(a, 0, True)} ]]"
            return _wrap(lvl >= 4, s)
        case L.IFst(b):
            return f"{_pl_term(b, 4, False)}.1"
        case L.ISnd(b):
            return f"{_pl_term(b, 4, False)}.2"
        case L.ILam(h, b):
            x = fresh_name(h, _lfi_used(b))
            s = f"[{x}] {_pl_term(L.open_lfi(b, L.IFVar(x)), 0, True)}"
            return _wrap(not ext, s)
        case L.IPair(l, r):
            return f"<{_pl_term(l, 0, True)}, {_pl_term(r, 0, True)}>"
        case L.IUnit():
            return "<>"
        case L.IRevApp(f, a):
            return f"({_pl_term(f, 0, True)} @@ {_pl_term(a, 0, True)})"
    raise TypeError(f"pp_lfi_term: {t!r}")


def _pl_type(a, lvl: int, ext: bool) -> str:
    match a:
        case L.ITConst(n):
            return n
        case L.ITHole(k):
            return f"?T{k}"
        case L.ITApp(f, arg):
            s = f"{_pl_type(f, 3, False)} {_pl_term(arg, 4, False)}"
            return _wrap(lvl >= 4, s)
        case L.ITIrrApp(f, arg):
            s = f"{_pl_type(f, 3, False)} [[ {_pl_term(arg, 0, True)} ]]"
            return _wrap(lvl >= 4, s)
        case L.ITPi(h, d, c):
            if _uses_binder(c):
                x = fresh_name(h, _lfi_used(c))
                s = f"{{{x} : {_pl_type(d, 0, True)}}} {_pl_type(L.open_lfi(c, L.IFVar(x)), 0, True)}"
                return _wrap(not ext, s)
            s = f"{_pl_type(d, 2, False)} -> {_pl_type(L.open_lfi(c, L.IFVar(_PROBE)), 1, ext)}"
            return _wrap(lvl >= 2, s)
        case L.ITIrrPi(h, d, c):
            if _uses_binder(c):
                x = fresh_name(h, _lfi_used(c))
                s = f"{{{x} :: {_pl_type(d, 0, True)}}} {_pl_type(L.open_lfi(c, L.IFVar(x)), 0, True)}"
                return _wrap(not ext, s)
            s = f"{_pl_type(d, 2, False)} -:> {_pl_type(L.open_lfi(c, L.IFVar(_PROBE)), 1, ext)}"
            return _wrap(lvl >= 2, s)
        case L.ITProd(l, r):
            s = f"({_pl_type(l, 0, True)}) * ({_pl_type(r, 0, True)})"
            return _wrap(lvl >= 3, s)
        case L.ITUnitT():
            return "1"
    raise TypeError(f"pp_lfi_type: {a!r}")


def _pl_kind(k, lvl: int, ext: bool) -> str:
    match k:
        case L.IKType():
            return "type"
        case L.IKPi(h, d, c):
            if _uses_binder(c):
                x = fresh_name(h, _lfi_used(c))
                s = f"{{{x} : {_pl_type(d, 0, True)}}} {_pl_kind(L.open_lfi(c, L.IFVar(x)), 0, True)}"
                return _wrap(not ext, s)
            s = f"{_pl_type(d, 2, False)} -> {_pl_kind(L.open_lfi(c, L.IFVar(_PROBE)), 1, ext)}"
            return _wrap(lvl >= 2, s)
        case L.IKIrrPi(h, d, c):
            if _uses_binder(c):
                x = fresh_name(h, _lfi_used(c))
                s = f"{{{x} :: {_pl_type(d, 0, True)}}} {_pl_kind(L.open_lfi(c, L.IFVar(x)), 0, True)}"
                return _wrap(not ext, s)
            s = f"{_pl_type(d, 2, False)} -:> {_pl_kind(L.open_lfi(c, L.IFVar(_PROBE)), 1, ext)}"
            return _wrap(lvl >= 2, s)
        case L.IKProd(l, r):
            s = f"({_pl_kind(l, 0, True)}) * ({_pl_kind(r, 0, True)})"
            return _wrap(lvl >= 3, s)
        case L.IKUnit():
            return "1"
    raise TypeError(f"pp_lfi_kind: {k!r}")


def pp_lfi_decl(d: L.LfiDecl) -> str:
    if d.is_family():
        return f"{d.name} : {pp_lfi_kind(d.classifier)}."
    return f"{d.name} : {pp_lfi_type(d.classifier)}."


def print_lfi(sig: L.LfiSignature) -> str:
    return "".join(pp_lfi_decl(d) + "\n" for d in sig)
