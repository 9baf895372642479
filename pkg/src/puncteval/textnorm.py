"""Text preprocessing applied before alignment and error-rate accounting.

The pipeline order used elsewhere in the toolkit is:

    strip_annotations -> remove_quotes -> segmentation -> normalize

``normalize`` lowercases, drops punctuation, and spells out integers in
Brazilian Portuguese so that "Revolução de 30" and "revolução de trinta"
compare as equal during alignment. Diacritics are meaningful in Portuguese
and are never folded.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

from .errors import RangeError, UnbalancedDelimiterWarning

# Straight and curly double/single quotation characters, plus guillemets
# and the low-9 variants occasionally present in revised transcripts.
_QUOTE_CHARS = "\"'‘’“”‚„«»"

# A word is a run of letters (diacritics included) that may contain internal
# hyphens or apostrophes; digit runs are captured separately so that "8:30"
# yields the two integers 8 and 30.
_TOKEN_RE = re.compile(r"\d+|[^\W\d_]+(?:[-'][^\W\d_]+)*", re.UNICODE)

NUMBER_SPELL_MAX = 999_999


@dataclass(frozen=True)
class NormalizedText:
    """Lowercase, punctuation-free token list with provenance indices.

    ``source_map[i]`` is the index of the whitespace-delimited token of the
    original text that produced ``tokens[i]``. Indices are non-decreasing;
    they repeat only when one source token expands to several output tokens
    (e.g. a spelled-out number).
    """

    tokens: tuple[str, ...]
    source_map: tuple[int, ...]

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


def strip_annotations(text: str) -> str:
    """Remove parenthesized annotations; unwrap square-bracket expansions.

    Transcribers mark non-speech events in parentheses ("(RISO)") and spell
    out acronyms in square brackets; the bracket content is real speech and
    is kept. Unmatched '(' or '[' is left verbatim and triggers an
    UnbalancedDelimiterWarning instead of failing.
    """
    out: list[str] = []
    bracket_depth = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "(":
            depth = 1
            j = i + 1
            while j < n and depth:
                if text[j] == "(":
                    depth += 1
                elif text[j] == ")":
                    depth -= 1
                j += 1
            if depth == 0:
                i = j
                continue
            warnings.warn("unmatched '(' left verbatim", UnbalancedDelimiterWarning)
            out.append(ch)
        elif ch == "[":
            if "]" in text[i + 1 :]:
                bracket_depth += 1
                i += 1
                continue
            warnings.warn("unmatched '[' left verbatim", UnbalancedDelimiterWarning)
            out.append(ch)
        elif ch == "]" and bracket_depth > 0:
            bracket_depth -= 1
        else:
            out.append(ch)
        i += 1
    cleaned = "".join(out)
    return re.sub(r"[ \t]{2,}", " ", cleaned).strip()


def remove_quotes(text: str) -> str:
    """Delete every straight or curly quotation character, nothing else."""
    return text.translate({ord(c): None for c in _QUOTE_CHARS})


_UNITS = (
    "zero", "um", "dois", "três", "quatro", "cinco", "seis", "sete", "oito",
    "nove", "dez", "onze", "doze", "treze", "quatorze", "quinze", "dezesseis",
    "dezessete", "dezoito", "dezenove",
)
_TENS = (
    "", "", "vinte", "trinta", "quarenta", "cinquenta", "sessenta", "setenta",
    "oitenta", "noventa",
)
_HUNDREDS = (
    "", "cento", "duzentos", "trezentos", "quatrocentos", "quinhentos",
    "seiscentos", "setecentos", "oitocentos", "novecentos",
)


def _spell_below_1000(n: int) -> str:
    if n == 100:
        return "cem"
    parts: list[str] = []
    if n >= 100:
        parts.append(_HUNDREDS[n // 100])
        n %= 100
        if n == 0:
            return parts[0]
    if n >= 20:
        tens = _TENS[n // 10]
        n %= 10
        parts.append(f"{tens} e {_UNITS[n]}" if n else tens)
    elif parts or n:
        parts.append(_UNITS[n])
    return " e ".join(parts)


def number_to_words_pt(n: int) -> str:
    """Spell a non-negative integer as a Brazilian Portuguese cardinal.

    Supports 0..999999; the canonical form uses "quatorze" (not "catorze").
    Raises RangeError outside the supported range.
    """
    if n < 0 or n > NUMBER_SPELL_MAX:
        raise RangeError(f"number {n} outside supported range 0..{NUMBER_SPELL_MAX}")
    if n < 1000:
        return _spell_below_1000(n) if n else "zero"
    thousands, rest = divmod(n, 1000)
    head = "mil" if thousands == 1 else f"{_spell_below_1000(thousands)} mil"
    if rest == 0:
        return head
    # "e" joins the thousands to a final group under one hundred or to an
    # exact hundred ("mil e trinta", "dois mil e quinhentos"), otherwise the
    # groups are juxtaposed ("mil novecentos e trinta").
    joiner = " e " if rest < 100 or rest % 100 == 0 else " "
    return f"{head}{joiner}{_spell_below_1000(rest)}"


def normalize(text: str) -> NormalizedText:
    """Lowercase, strip punctuation, and spell out integers.

    Digit runs up to 999999 become their word form (several output tokens
    may share one source index); longer runs are kept as digits with a
    warning. Hyphenated words stay single tokens.
    """
    lowered = text.lower()
    # Map character offsets to whitespace-token indices of the original text.
    source_index = [0] * (len(lowered) + 1)
    idx = -1
    in_space = True
    for pos, ch in enumerate(lowered):
        if ch.isspace():
            in_space = True
        else:
            if in_space:
                idx += 1
            in_space = False
        source_index[pos] = max(idx, 0)

    tokens: list[str] = []
    source_map: list[int] = []
    for m in _TOKEN_RE.finditer(lowered):
        tok = m.group()
        src = source_index[m.start()]
        if tok.isdigit():
            if len(tok) <= 6 and int(tok) <= NUMBER_SPELL_MAX:
                for word in number_to_words_pt(int(tok)).split():
                    tokens.append(word)
                    source_map.append(src)
                continue
            warnings.warn(f"number {tok} exceeds spelling range; kept as digits")
        tokens.append(tok)
        source_map.append(src)
    return NormalizedText(tuple(tokens), tuple(source_map))
