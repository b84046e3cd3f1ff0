"""Word tokenization shared by every metric in the package.

All co-occurrence counting, masking, and lexicon matching is defined on
this one tokenizer so that a single fixture pins its behaviour.
"""

import re
from collections.abc import Callable

_WORD_RE = re.compile(r"\w+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase *text* and split it on word boundaries.

    Runs of letters, digits, and underscores form tokens; punctuation and
    whitespace never do. Empty input yields an empty list.
    """
    return _WORD_RE.findall(text.lower())


def replace_words(text: str, replacement: Callable[[str], str | None]) -> str:
    """Rebuild *text* with selected word tokens swapped out.

    ``replacement`` receives each token lowercased and returns the new
    surface form, or ``None`` to keep the original span untouched. All
    punctuation, whitespace, and the casing of untouched words are
    preserved verbatim.
    """
    parts: list[str] = []
    last = 0
    for match in _WORD_RE.finditer(text):
        new = replacement(match.group(0).lower())
        if new is not None:
            parts.append(text[last : match.start()])
            parts.append(new)
            last = match.end()
    parts.append(text[last:])
    return "".join(parts)
