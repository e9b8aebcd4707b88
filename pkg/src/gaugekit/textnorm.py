"""Unicode normalization shared by annotation storage and answer grading."""

from __future__ import annotations

import re
import unicodedata

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹⁻⁺", "0123456789-+")

# "3 × 10⁴" / "3 x 10^-4" style power-of-ten tails, glued to a number.
_POW10_SUP = re.compile(r"(?<=\d)\s*[×xX*]\s*10\s*([⁻⁺]?[⁰¹²³⁴⁵⁶⁷⁸⁹]+)")
_POW10_CARET = re.compile(r"(?<=\d)\s*[×xX*]\s*10\s*\^\s*([+-]?\d+)")

# Characters NFKC leaves alone but that must compare equal for grading.
_FOLD = {
    "−": "-",  # minus sign
    "⁄": "/",  # fraction slash
}


def normalize_text(text: str) -> str:
    """Normalize unicode variants so equivalent spellings compare equal.

    Power-of-ten notation ("a×10^k", superscript exponents) is rewritten to
    e-notation before compatibility normalization, because NFKC flattens
    superscript digits into plain digits and would corrupt the exponent.
    Case is preserved; unit matching folds case at compare time.
    """
    text = _POW10_SUP.sub(lambda m: "e" + m.group(1).translate(_SUPERSCRIPTS), text)
    text = _POW10_CARET.sub(lambda m: "e" + m.group(1), text)
    text = unicodedata.normalize("NFKC", text)
    for src, dst in _FOLD.items():
        text = text.replace(src, dst)
    return text
