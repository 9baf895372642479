import random

import pytest

from puncteval.aligner import AlignedPair, Alignment, AlignStep
from puncteval.corpus import PunctMark
from puncteval.errors import EmptyReference, InsufficientClasses
from puncteval.metrics import (
    ClassScore,
    ErrorUnit,
    PunctConfusion,
    error_rates,
    macro_average,
    prf,
    punct_confusion,
    scored_marks,
)


def pair(ref_mark, hyp_mark, ref_text="a b c", hyp_text="a b c", aligned=True):
    return AlignedPair(
        ref_id="r",
        hyp_id="h" if aligned else None,
        score=1.0 if aligned else 0.0,
        step=AlignStep.PRELIMINARY if aligned else AlignStep.UNALIGNED,
        ref_text=ref_text,
        hyp_text=hyp_text if aligned else None,
        ref_mark=ref_mark,
        hyp_mark=hyp_mark if aligned else None,
    )


class TestPunctConfusion:
    def test_all_equal_marks(self):
        a = Alignment.from_pairs([pair(PunctMark.COMMA, PunctMark.COMMA)] * 3)
        c = punct_confusion(a)
        assert c.tp[PunctMark.COMMA] == 3
        assert sum(c.fp.values()) == 0 and sum(c.fn.values()) == 0

    def test_differing_marks(self):
        a = Alignment.from_pairs([pair(PunctMark.COMMA, PunctMark.FULLSTOP)])
        c = punct_confusion(a)
        assert c.fn[PunctMark.COMMA] == 1
        assert c.fp[PunctMark.FULLSTOP] == 1
        assert sum(c.tp.values()) == 0

    def test_semicolon_never_produced(self):
        a = Alignment.from_pairs(
            [pair(PunctMark.SEMICOLON, PunctMark.COMMA), pair(PunctMark.SEMICOLON, PunctMark.FULLSTOP)]
        )
        c = punct_confusion(a)
        assert c.fn[PunctMark.SEMICOLON] == 2
        assert c.tp[PunctMark.SEMICOLON] == 0
        assert PunctMark.SEMICOLON not in scored_marks(c)

    def test_hyp_tail_counts_false_negative(self):
        a = Alignment.from_pairs([pair(PunctMark.COMMA, None)])
        c = punct_confusion(a)
        assert c.fn[PunctMark.COMMA] == 1
        assert sum(c.fp.values()) == 0

    def test_unaligned_pairs_excluded(self):
        a = Alignment.from_pairs([pair(PunctMark.COMMA, None, aligned=False)])
        c = punct_confusion(a)
        assert sum(c.tp.values()) + sum(c.fp.values()) + sum(c.fn.values()) == 0

    def test_totals_invariant(self):
        rng = random.Random(31)
        marks = list(PunctMark)
        pairs = []
        for _ in range(200):
            ref = rng.choice(marks)
            hyp = rng.choice(marks + [None])
            pairs.append(pair(ref, hyp))
        c = punct_confusion(Alignment.from_pairs(pairs))
        assert sum(c.tp.values()) + sum(c.fn.values()) == len(pairs)
        n_hyp_marks = sum(1 for p in pairs if p.hyp_mark is not None)
        assert sum(c.tp.values()) + sum(c.fp.values()) == n_hyp_marks


class TestPrf:
    def test_direct_arithmetic(self):
        c = PunctConfusion()
        c.tp[PunctMark.COMMA] = 2
        c.fp[PunctMark.COMMA] = 1
        c.fn[PunctMark.COMMA] = 1
        s = prf(c, PunctMark.COMMA)
        assert s.precision == pytest.approx(66.667, abs=0.01)
        assert s.recall == pytest.approx(66.667, abs=0.01)
        assert s.f1 == pytest.approx(66.667, abs=0.01)

    def test_degenerate_all_zero(self):
        s = prf(PunctConfusion(), PunctMark.COLON)
        assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)
        assert s.degenerate

    def test_f1_between_p_and_r(self):
        rng = random.Random(37)
        for _ in range(200):
            c = PunctConfusion()
            c.tp[PunctMark.COMMA] = rng.randrange(1, 50)
            c.fp[PunctMark.COMMA] = rng.randrange(0, 50)
            c.fn[PunctMark.COMMA] = rng.randrange(0, 50)
            s = prf(c, PunctMark.COMMA)
            assert min(s.precision, s.recall) - 1e-9 <= s.f1 <= max(s.precision, s.recall) + 1e-9
            assert 0 <= s.precision <= 100 and 0 <= s.recall <= 100


# The published per-class results this toolkit must reproduce arithmetically:
# (precision, recall, printed F1) per mark, overall / female / male samples.
OVERALL_ROWS = {
    PunctMark.COMMA: (78.1, 77.0, 77.5),
    PunctMark.EXCLAMATION: (17.2, 3.0, 5.1),
    PunctMark.QUESTION: (71.5, 64.9, 68.0),
    PunctMark.FULLSTOP: (59.4, 69.2, 63.9),
    PunctMark.ELLIPSIS: (16.5, 18.3, 17.4),
}


def f1_of(p, r):
    return 2 * p * r / (p + r) if p + r else 0.0


class TestPublishedArithmetic:
    @pytest.mark.parametrize("mark,row", OVERALL_ROWS.items())
    def test_f1_recomputes_from_p_and_r(self, mark, row):
        p, r, printed_f1 = row
        assert f1_of(p, r) == pytest.approx(printed_f1, abs=0.1)

    def test_macro_precision_column(self):
        scores = [
            ClassScore(m, p, r, f1_of(p, r)) for m, (p, r, _) in OVERALL_ROWS.items()
        ]
        macro = macro_average(scores)
        assert macro.precision[0] == pytest.approx(48.5, abs=0.1)
        assert macro.precision[1] == pytest.approx(29.7, abs=0.1)

    def test_macro_f1_column_printed_values(self):
        scores = [ClassScore(m, 0.0, 0.0, f1) for m, (_, _, f1) in OVERALL_ROWS.items()]
        macro = macro_average(scores)
        assert macro.f1[0] == pytest.approx(46.4, abs=0.1)
        assert macro.f1[1] == pytest.approx(32.7, abs=0.1)

    def test_female_exclamation_row_is_inconsistent(self):
        # The published female exclamation F1 (6.8) cannot follow from its
        # own P/R (31.2, 0.4); the recomputed value is reported instead.
        assert f1_of(31.2, 0.4) == pytest.approx(0.79, abs=0.01)
        assert abs(f1_of(31.2, 0.4) - 6.8) > 5.0


class TestMacroAverage:
    def test_identical_scores_zero_std(self):
        scores = [ClassScore(m, 50.0, 50.0, 50.0) for m in list(PunctMark)[:3]]
        macro = macro_average(scores)
        assert macro.precision == (50.0, 0.0)

    def test_insufficient_classes(self):
        with pytest.raises(InsufficientClasses):
            macro_average([ClassScore(PunctMark.COMMA, 1.0, 1.0, 1.0)])


class TestErrorRates:
    def test_identity_zero(self):
        a = Alignment.from_pairs([pair(PunctMark.COMMA, PunctMark.COMMA)])
        assert error_rates(a, ErrorUnit.WORD).wer == 0.0
        assert error_rates(a, ErrorUnit.CHAR).wer == 0.0

    def test_single_substitution_third(self):
        a = Alignment.from_pairs(
            [pair(PunctMark.COMMA, PunctMark.COMMA, ref_text="a b c", hyp_text="a x c")]
        )
        rates = error_rates(a, ErrorUnit.WORD)
        assert rates.wer == pytest.approx(1 / 3)
        assert (rates.substitutions, rates.insertions, rates.deletions) == (1, 0, 0)

    def test_micro_average_arithmetic(self):
        pairs = [
            pair(PunctMark.COMMA, PunctMark.COMMA, ref_text="a b c d", hyp_text="a b c x"),
            pair(PunctMark.COMMA, PunctMark.COMMA,
                 ref_text="p q r s t u", hyp_text="p x y z t u"),
        ]
        rates = error_rates(Alignment.from_pairs(pairs), ErrorUnit.WORD)
        assert rates.wer == pytest.approx((1 + 3) / (4 + 6))

    def test_scale_consistency(self):
        pairs = [
            pair(PunctMark.COMMA, PunctMark.COMMA, ref_text="um dois três", hyp_text="um dois quatro"),
        ]
        once = error_rates(Alignment.from_pairs(pairs), ErrorUnit.WORD).wer
        twice = error_rates(Alignment.from_pairs(pairs * 2), ErrorUnit.WORD).wer
        assert once == pytest.approx(twice)

    def test_normalization_applied_before_edits(self):
        a = Alignment.from_pairs(
            [pair(PunctMark.COMMA, PunctMark.COMMA, ref_text="São Paulo, 30", hyp_text="são paulo trinta")]
        )
        assert error_rates(a, ErrorUnit.WORD).wer == 0.0

    def test_empty_reference(self):
        a = Alignment.from_pairs([pair(PunctMark.COMMA, PunctMark.COMMA, aligned=False)])
        with pytest.raises(EmptyReference):
            error_rates(a, ErrorUnit.WORD)
