"""Tweet text normalization.

One public operation, :func:`normalize_tweet`, applies three rule groups in a
fixed order:

1. substitution: URLs, email addresses and user mentions are replaced by the
   literal placeholder tokens ``[url]``, ``[email]`` and ``[user]``;
2. elimination: HTML entities and tags, line breaks, runs of three or more
   identical characters (collapsed to two), emoji/pictograph/format/control
   characters, and redundant spaces;
3. whitespace correction: a space is inserted at boundaries between Arabic
   words, Latin words and digit runs, and brackets are space-separated on both
   sides.

Placeholder tokens are protected from the elimination and whitespace passes,
so they always survive verbatim. Substitution runs a second time after
elimination because collapsing characters can expose a previously broken
pattern. The function is idempotent and deterministic.
"""

from __future__ import annotations

import html
import json
import re
import unicodedata
from dataclasses import dataclass

__all__ = ["NormalizedText", "normalize_tweet", "normalize_corpus_file",
           "PLACEHOLDERS", "URL_RE", "EMAIL_RE", "MENTION_RE"]

URL_PLACEHOLDER = "[url]"
EMAIL_PLACEHOLDER = "[email]"
USER_PLACEHOLDER = "[user]"
PLACEHOLDERS = (URL_PLACEHOLDER, EMAIL_PLACEHOLDER, USER_PLACEHOLDER)

_SHORTENERS = r"(?:t\.co|bit\.ly|tinyurl\.com|goo\.gl|ow\.ly|is\.gd|buff\.ly)"
URL_RE = re.compile(
    r"(?:https?://\S+|www\.\S+|\b" + _SHORTENERS + r"/\S+)", re.IGNORECASE
)
EMAIL_RE = re.compile(r"[\w.+-]+@[\w-]+(?:\.[\w-]+)+")
MENTION_RE = re.compile(r"@\w+")

_HTML_TAG_RE = re.compile(r"</?[A-Za-z][^<>]*>")
_LINEBREAK_RE = re.compile(r"[\r\n\t\v\f]+")
_CHAR_RUN_RE = re.compile(r"(.)\1{2,}", re.DOTALL)
_MULTISPACE_RE = re.compile(r"\s+")

# Emoji / pictograph blocks, misc symbols and dingbats, arrows, variation
# selectors and invisible format characters. Arabic punctuation is untouched.
_STRIP_RANGES = (
    ("​", "‏"),        # zero-width and direction marks
    ("‪", "‮"),
    ("⁠", "⁤"),
    ("︀", "️"),        # variation selectors
    ("﻿", "﻿"),
    ("←", "⇿"),        # arrows
    ("☀", "➿"),        # misc symbols, dingbats
    ("⬀", "⯿"),
    ("\U0001f000", "\U0001fbff"),  # emoji and pictographs
)
_STRIP_RE = re.compile(
    "[" + "".join(re.escape(a) + "-" + re.escape(b) for a, b in _STRIP_RANGES) + "]"
)

_ARABIC_LETTER = (
    "ء-يٮ-ۓەۮۯۺ-ۿ"
    "ݐ-ݿࢠ-ࣿﭐ-﷿ﹰ-﻿"
)
_DIGIT = "0-9٠-٩۰-۹"
_LATIN = "A-Za-z"

_BOUNDARY_RES = tuple(re.compile(p) for p in (
    rf"(?<=[{_ARABIC_LETTER}])(?=[{_DIGIT}])",
    rf"(?<=[{_DIGIT}])(?=[{_ARABIC_LETTER}])",
    rf"(?<=[{_ARABIC_LETTER}])(?=[{_LATIN}])",
    rf"(?<=[{_LATIN}])(?=[{_ARABIC_LETTER}])",
    rf"(?<=[{_LATIN}])(?=[{_DIGIT}])",
    rf"(?<=[{_DIGIT}])(?=[{_LATIN}])",
))

_BRACKET_RE = re.compile(r"\s*([()\[\]{}])\s*")

_PLACEHOLDER_SPLIT_RE = re.compile(
    "(" + "|".join(re.escape(p) for p in PLACEHOLDERS) + ")"
)


@dataclass(frozen=True)
class NormalizedText:
    text: str
    replacements: int


def _substitute(segment: str) -> tuple:
    """Replace URL, email and mention patterns; returns (segments, count).

    The output alternates free text and placeholder tokens so later passes
    can skip the placeholders. URLs go first so their @/dot innards are not
    claimed by the email or mention patterns.
    """
    count = 0
    for pattern, token in ((URL_RE, URL_PLACEHOLDER),
                           (EMAIL_RE, EMAIL_PLACEHOLDER),
                           (MENTION_RE, USER_PLACEHOLDER)):
        segment, n = pattern.subn(token, segment)
        count += n
    parts = _PLACEHOLDER_SPLIT_RE.split(segment)
    return parts, count


def _unescape_entities(text: str) -> str:
    # &amp;amp; style double escaping unescapes to a fixed point
    for _ in range(10):
        unescaped = html.unescape(text)
        if unescaped == text:
            return text
        text = unescaped
    return text


def _strip_tags(text: str) -> str:
    # removing a tag can expose another (e.g. "<<b>a>"), so iterate
    while True:
        stripped = _HTML_TAG_RE.sub("", text)
        if stripped == text:
            return text
        text = stripped


def _eliminate(segment: str) -> str:
    segment = _unescape_entities(segment)
    segment = _strip_tags(segment)
    segment = _LINEBREAK_RE.sub(" ", segment)
    segment = _STRIP_RE.sub("", segment)
    segment = "".join(c for c in segment if unicodedata.category(c) != "Cc")
    segment = _CHAR_RUN_RE.sub(r"\1\1", segment)
    return segment


def _correct_whitespace(segment: str) -> str:
    for boundary in _BOUNDARY_RES:
        segment = boundary.sub(" ", segment)
    segment = _BRACKET_RE.sub(r" \1 ", segment)
    return segment


def normalize_tweet(text: str) -> NormalizedText:
    """Apply the full normalization pipeline to one tweet."""
    # literal placeholder tokens already in the input are protected too,
    # otherwise a second pass would space out their brackets
    segments = _PLACEHOLDER_SPLIT_RE.split(text)
    replacements = 0

    out = []
    for i, seg in enumerate(segments):
        if i % 2 == 1:  # odd indices are placeholder tokens
            out.append([seg])
            continue
        parts, n = _substitute(seg)
        replacements += n
        out.append(parts)
    segments = [p for parts in out for p in parts]

    result = []
    for seg in segments:
        if seg in PLACEHOLDERS:
            result.append(seg)
            continue
        seg = _eliminate(seg)
        # elimination can expose a pattern (e.g. "htttp" collapsing to "http")
        parts, n = _substitute(seg)
        replacements += n
        for part in parts:
            if part in PLACEHOLDERS:
                result.append(part)
            else:
                result.append(_correct_whitespace(part))

    joined = "".join(result)
    joined = _MULTISPACE_RE.sub(" ", joined).strip()
    return NormalizedText(joined, replacements)


def normalize_corpus_file(in_path, out_path) -> int:
    """Rewrite a JSON-lines corpus with normalized text.

    The original text is preserved under ``raw_text``. Returns the number of
    records written.
    """
    n = 0
    with open(in_path, encoding="utf-8") as src, \
            open(out_path, "w", encoding="utf-8") as dst:
        for line in src:
            if not line.strip():
                continue
            record = json.loads(line)
            raw = record.get("raw_text", record["text"])
            record["raw_text"] = raw
            record["text"] = normalize_tweet(raw).text
            dst.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    return n
