"""Surface syntax: lexing, parsing, printing, and their round trips."""

from __future__ import annotations

import pytest

from lfr import (
    LexError,
    ParseError,
    parse_lfi,
    parse_signature,
    parse_sort,
    parse_term,
    parse_type,
    pp_signature,
    print_lfi,
)
from lfr.lfi import lfi_equal
from lfr.syntax import (
    App,
    Const,
    FVar,
    Lam,
    SConst,
    SInter,
    SPi,
    STop,
    TConst,
    TPi,
    alpha_eq,
)

from conftest import GOLDEN_NAMES, golden_path


def decls_alpha_eq(a, b) -> bool:
    if len(a) != len(b):
        return False
    return all(alpha_eq(x, y) for x, y in zip(a.decls, b.decls))


class TestRoundTrip:
    @pytest.mark.parametrize("name", GOLDEN_NAMES)
    def test_parse_print_parse_is_stable(self, name, parsed_goldens):
        first = parsed_goldens[name]
        second = parse_signature(pp_signature(first))
        assert decls_alpha_eq(first, second)
        third = parse_signature(pp_signature(second))
        assert decls_alpha_eq(second, third)

    @pytest.mark.parametrize("name", GOLDEN_NAMES)
    def test_checked_print_is_reparsable(self, name, checked_goldens):
        # Elaborated domain types are not part of the surface syntax, so
        # printing forgets them; the reprint must still be stable.
        text = pp_signature(checked_goldens[name])
        once = parse_signature(text)
        twice = parse_signature(pp_signature(once))
        assert decls_alpha_eq(once, twice)

    @pytest.mark.parametrize("name", ("even-odd", "double", "coerce"))
    def test_lfi_roundtrip(self, name):
        text = golden_path(name).with_suffix(".lfi").read_text()
        sig = parse_lfi(text)
        again = parse_lfi(print_lfi(sig))
        assert [d.name for d in sig] == [d.name for d in again]
        for d1, d2 in zip(sig, again):
            assert lfi_equal(d1.classifier, d2.classifier,
                             respect_irrelevance=False)


class TestExpressions:
    def test_identifier_forms(self):
        t = parse_term("dbl/z", consts={"dbl/z"})
        assert t == Const("dbl/z")
        assert parse_term("ev-app", consts={"ev-app"}) == Const("ev-app")
        assert parse_term("double*", consts={"double*"}) == Const("double*")

    def test_caret_is_not_an_identifier_character(self):
        with pytest.raises((LexError, ParseError)):
            parse_signature("na^t : type.")

    def test_application_left_nested(self):
        t = parse_term("f a b", consts={"f", "a", "b"})
        assert t == App(App(Const("f"), Const("a")), Const("b"))

    def test_lambda(self):
        t = parse_term("[x] [y] s x", consts={"s"})
        assert alpha_eq(t, Lam("x", Lam("y", App(Const("s"),
                                                 __import__("lfr").syntax.BVar(1)))))

    def test_reverse_arrow_order(self):
        fwd = parse_type("b -> a -> c", consts={"a", "b", "c"})
        rev = parse_type("c <- a <- b", consts={"a", "b", "c"})
        assert alpha_eq(fwd, rev)

    def test_mixed_arrows_need_parens(self):
        with pytest.raises(ParseError):
            parse_type("a -> b <- c", consts={"a", "b", "c"})
        ok = parse_type("a -> (b <- c)", consts={"a", "b", "c"})
        assert alpha_eq(ok, TPi("x", TConst("a"),
                                TPi("x", TConst("c"), TConst("b"))))

    def test_intersection_binds_looser_than_arrow(self):
        s = parse_sort("even -> odd ^ odd -> even", consts={"even", "odd"})
        assert s == SInter(SPi("x", SConst("even"), None, SConst("odd")),
                           SPi("x", SConst("odd"), None, SConst("even")))

    def test_top_sort(self):
        s = parse_sort("# -> even", consts={"even"})
        assert isinstance(s, SPi) and s.dom_sort == STop()

    def test_sort_pi_binder(self):
        s = parse_sort("{x :: even} odd", consts={"even", "odd"})
        assert isinstance(s, SPi)
        assert s.dom_sort == SConst("even")
        assert s.dom_type is None  # filled in by elaboration

    def test_dependent_pi(self):
        a = parse_type("{x : nat} d x x", consts={"nat", "d"})
        assert isinstance(a, TPi)
        from lfr.syntax import BVar, TApp

        assert a.cod == TApp(TApp(TConst("d"), BVar(0)), BVar(0))


class TestDeclarations:
    def test_default_class_is_maximal(self):
        sig = parse_signature(
            "nat : type. d : nat -> nat -> type. d* << d.")
        fam = sig.sort_fam("d*")
        from lfr.syntax import CPi, CSort, CTop, STop as Top

        cls = fam.cls
        assert isinstance(cls, CPi) and cls.dom_sort == Top()
        assert isinstance(cls.cod, CPi) and cls.cod.dom_sort == Top()
        assert isinstance(cls.cod.cod, CSort)

    def test_infix_pragma(self):
        sig = parse_signature(
            "tp : type.\n"
            "arr : tp -> tp -> tp.\n"
            "%infix right 10 arr.\n"
            "c : tp -> tp.\n")
        assert sig.term_const("arr") is not None

    def test_infix_right_associative(self):
        base = ("tp : type. a : tp. b : tp. arr : tp -> tp -> tp. "
                "%infix right 10 arr. f : tp -> tp. ")
        sugar = parse_signature(base + "c : f (a arr b arr a) -> tp.")
        explicit = parse_signature(base + "c : f (arr a (arr b a)) -> tp.")
        assert decls_alpha_eq(sugar, explicit)

    def test_implicit_quantification_rejected(self):
        text = ("nat : type. d : nat -> type. "
                "c : d X -> nat.")
        with pytest.raises(ParseError) as info:
            parse_signature(text)
        assert "explicit" in str(info.value)
        assert info.value.span is not None

    def test_subsort_declaration(self):
        sig = parse_signature(
            "nat : type. a << nat. b << nat. a <: b.")
        assert len(sig.sub_decls) == 1
        assert (sig.sub_decls[0].sub, sig.sub_decls[0].sup) == ("a", "b")


class TestErrors:
    BAD_INPUTS = (
        "nat :",
        "nat : type",
        ": type.",
        "nat : type. c : {x} nat.",
        "nat : type. c : [x] x.",
        "nat : type. %infix sideways 10 c.",
        "nat : type. c : {x : nat nat.",
        "@",
    )

    @pytest.mark.parametrize("text", BAD_INPUTS)
    def test_errors_carry_spans_in_bounds(self, text):
        with pytest.raises((LexError, ParseError)) as info:
            parse_signature(text)
        span = info.value.span
        assert span is not None
        lines = text.split("\n")
        assert 1 <= span.line <= len(lines) + 1
        assert span.col >= 1
        if span.line <= len(lines):
            assert span.col <= len(lines[span.line - 1]) + 2

    def test_error_format_has_location(self):
        with pytest.raises(ParseError) as info:
            parse_signature("nat :", filename="f.lfr")
        assert info.value.format().startswith("f.lfr:1:")

    def test_comments_are_skipped(self):
        sig = parse_signature("% comment\nnat : type. % trailing\n")
        assert sig.type_fam("nat") is not None


class TestLfiSyntax:
    def test_irrelevant_application(self):
        sig = parse_lfi("a : type. p : a -:> type. c : a. q : p [[ c ]].")
        from lfr.lfi import ITIrrApp

        assert isinstance(sig.decls[-1].classifier, ITIrrApp)

    def test_products_pairs_projections(self):
        sig = parse_lfi(
            "a : type. c : a * 1. d : a -> a. e : (a -> a) * (a -> 1).")
        from lfr.lfi import ITProd, ITUnitT

        assert isinstance(sig.decls[1].classifier, ITProd)
        assert isinstance(sig.decls[1].classifier.right, ITUnitT)

    def test_lfi_errors_have_spans(self):
        with pytest.raises((LexError, ParseError)) as info:
            parse_lfi("a : .")
        assert info.value.span is not None
