import random
import warnings

import pytest

from puncteval.errors import RangeError, UnbalancedDelimiterWarning
from puncteval.textnorm import (
    normalize,
    number_to_words_pt,
    remove_quotes,
    strip_annotations,
)


class TestStripAnnotations:
    def test_removes_parenthesized_annotation(self):
        assert (
            strip_annotations("é quatrocentona (RISO) e é de São Paulo")
            == "é quatrocentona e é de São Paulo"
        )

    def test_identity_without_delimiters(self):
        text = "texto sem anotações nenhuma"
        assert strip_annotations(text) == text

    def test_brackets_keep_content(self):
        assert strip_annotations("[Universidade de São Paulo]") == "Universidade de São Paulo"

    def test_nested_parentheses_removed(self):
        assert strip_annotations("a ((RISO) PALMAS) b") == "a b"

    def test_unmatched_open_paren_kept_with_warning(self):
        with pytest.warns(UnbalancedDelimiterWarning):
            assert strip_annotations("a (RISO b") == "a (RISO b"

    def test_unmatched_open_bracket_kept_with_warning(self):
        with pytest.warns(UnbalancedDelimiterWarning):
            assert strip_annotations("a [USP b") == "a [USP b"


class TestRemoveQuotes:
    def test_curly_quotes_deleted(self):
        assert (
            remove_quotes("disse: “olha, o que você acha?...”")
            == "disse: olha, o que você acha?..."
        )

    def test_identity_on_quote_free_text(self):
        text = "nada de aspas aqui"
        assert remove_quotes(text) == text

    def test_mixed_quote_characters_all_removed(self):
        # character-class sweep: every quote char goes, nothing else changes
        quotes = "\"'‘’“”‚„«»"
        text = "a" + "b".join(quotes) + "z"
        cleaned = remove_quotes(text)
        assert not any(q in cleaned for q in quotes)
        assert cleaned == "a" + "b" * (len(quotes) - 1) + "z"

    def test_commutes_with_strip_annotations(self):
        text = 'ele disse "sim" (RISO) e [USP] também'
        assert remove_quotes(strip_annotations(text)) == strip_annotations(remove_quotes(text))


# Independent speller used as an oracle: digit-by-digit positional assembly,
# structured differently from the production recursion.
_O_UNITS = "zero um dois três quatro cinco seis sete oito nove".split()
_O_TEENS = ("dez onze doze treze quatorze quinze dezesseis dezessete dezoito dezenove").split()
_O_TENS = "vinte trinta quarenta cinquenta sessenta setenta oitenta noventa".split()
_O_HUNDREDS = ("cento duzentos trezentos quatrocentos quinhentos seiscentos "
               "setecentos oitocentos novecentos").split()


def _oracle_under_1000(n: int) -> list[str]:
    h, rest = divmod(n, 100)
    t, u = divmod(rest, 10)
    words: list[str] = []
    if h:
        words.append("cem" if rest == 0 and h == 1 else _O_HUNDREDS[h - 1])
    if 10 <= rest <= 19:
        words.append(_O_TEENS[rest - 10])
    else:
        if t >= 2:
            words.append(_O_TENS[t - 2])
        if u and (t >= 2 or t == 0):
            words.append(_O_UNITS[u])
    return words


def _oracle_spell(n: int) -> str:
    if n == 0:
        return "zero"
    thousands, rest = divmod(n, 1000)
    words: list[str] = []
    if thousands == 1:
        words.append("mil")
    elif thousands:
        words.extend(_oracle_under_1000(thousands))
        words.append("mil")
    rest_words = _oracle_under_1000(rest) if rest else []
    if thousands and rest and (rest < 100 or rest % 100 == 0):
        words.append("e")
    words.extend(rest_words)
    # join groups with "e" inside the hundreds block
    out: list[str] = []
    for i, w in enumerate(words):
        if out and w != "e" and out[-1] != "e" and out[-1] != "mil" and w != "mil" \
                and _needs_e(out[-1], w):
            out.append("e")
        out.append(w)
    return " ".join(out)


def _needs_e(prev: str, cur: str) -> bool:
    return (prev in _O_HUNDREDS or prev == "cem" or prev in _O_TENS) and (
        cur in _O_TENS or cur in _O_TEENS or cur in _O_UNITS
    )


KNOWN_SPELLINGS = {
    0: "zero",
    7: "sete",
    14: "quatorze",
    19: "dezenove",
    20: "vinte",
    21: "vinte e um",
    30: "trinta",
    99: "noventa e nove",
    100: "cem",
    101: "cento e um",
    115: "cento e quinze",
    200: "duzentos",
    231: "duzentos e trinta e um",
    400: "quatrocentos",
    999: "novecentos e noventa e nove",
    1000: "mil",
    1001: "mil e um",
    1100: "mil e cem",
    1101: "mil cento e um",
    1930: "mil novecentos e trinta",
    2000: "dois mil",
    2014: "dois mil e quatorze",
    3500: "três mil e quinhentos",
    100000: "cem mil",
    101000: "cento e um mil",
    999999: "novecentos e noventa e nove mil novecentos e noventa e nove",
}


class TestNumberToWords:
    def test_zero(self):
        assert number_to_words_pt(0) == "zero"

    @pytest.mark.parametrize("n,expected", sorted(KNOWN_SPELLINGS.items()))
    def test_known_values(self, n, expected):
        assert number_to_words_pt(n) == expected

    def test_matches_independent_oracle(self):
        rng = random.Random(2024)
        samples = list(range(0, 200)) + [rng.randrange(0, 1_000_000) for _ in range(400)]
        for n in samples:
            assert number_to_words_pt(n) == _oracle_spell(n), n

    def test_out_of_range(self):
        with pytest.raises(RangeError):
            number_to_words_pt(1_000_000)
        with pytest.raises(RangeError):
            number_to_words_pt(-1)


class TestNormalize:
    def test_paper_style_sentence(self):
        got = normalize("Revolução de 30, meu pai...")
        assert got.tokens == ("revolução", "de", "trinta", "meu", "pai")

    def test_empty_input(self):
        assert normalize("").tokens == ()

    def test_number_expansion(self):
        assert normalize("São Paulo é 400").tokens == ("são", "paulo", "é", "quatrocentos")

    def test_idempotent(self):
        texts = [
            "Qual é a origem da sua família, ela é de São Paulo mesmo?",
            "Na Revolução de 30 meu pai perdeu o emprego (RISO)!",
            "guarda-chuva d'água 8:30",
        ]
        for text in texts:
            once = normalize(text)
            twice = normalize(" ".join(once.tokens))
            assert twice.tokens == once.tokens

    def test_never_gains_letters_except_number_expansion(self):
        text = "Teve um português lá que veio pro Brasil, ficou aqui!"
        before = sum(c.isalpha() for c in text)
        after = sum(c.isalpha() for tok in normalize(text).tokens for c in tok)
        assert after <= before

    def test_source_map_monotone(self):
        got = normalize("ela tinha 8:30 e 1930 reais")
        assert all(a <= b for a, b in zip(got.source_map, got.source_map[1:]))
        # strictly increasing when nothing expands
        plain = normalize("ela não aceitava de jeito nenhum")
        assert all(a < b for a, b in zip(plain.source_map, plain.source_map[1:]))

    def test_source_map_indexes_whitespace_tokens(self):
        got = normalize("  Não, são de 30 anos")
        source_tokens = "Não, são de 30 anos".split()
        assert got.source_map[0] == 0  # leading whitespace does not shift indices
        for tok, src in zip(got.tokens, got.source_map):
            if tok == "trinta":
                assert source_tokens[src] == "30"
            else:
                assert tok in source_tokens[src].lower()

    def test_hyphenated_words_stay_single_tokens(self):
        assert normalize("guarda-chuva azul").tokens == ("guarda-chuva", "azul")

    def test_separator_numbers_split_and_spelled(self):
        assert normalize("às 8:30 da manhã").tokens == ("às", "oito", "trinta", "da", "manhã")

    def test_oversized_number_kept_as_digits(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert "1234567" in normalize("são 1234567 coisas").tokens
