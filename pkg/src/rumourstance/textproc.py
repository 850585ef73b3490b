"""Tweet normalisation and tokenisation.

Rules, applied to the lowercased text:

* URLs are ``http://...``, ``https://...`` or ``t.co/...`` runs of non-space
  characters. They are counted and removed, never emitted as tokens.
* ``#word`` and ``@user`` are single tokens (``\\w`` characters after the sigil).
* Everything else is split on whitespace and punctuation; a token is a run of
  word characters, optionally joined by internal apostrophes (``don't``).
  Punctuation, symbols and emoji are not tokens.
* Elongations ("sooo") are left as they are.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

URL_RE = re.compile(r"(?:https?://|\bt\.co/)\S*", re.IGNORECASE)
_TOKEN_RE = re.compile(r"(?<!\w)[#@]\w+|\w+(?:['’]\w+)*")
_MARKER_RE = re.compile(r"(?:https?://|\bt\.co/)\S*|(?<!\w)[#@]\w+", re.IGNORECASE)
_SPACE_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class TokenList:
    tokens: tuple[str, ...] = ()
    hashtags: int = 0
    mentions: int = 0
    urls: int = 0
    question_marks: int = 0

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    @property
    def marker_counts(self) -> dict[str, int]:
        return {
            "hashtags": self.hashtags,
            "mentions": self.mentions,
            "urls": self.urls,
            "question_marks": self.question_marks,
        }


def tokenize(text: str) -> TokenList:
    text = text.lower()
    n_urls = len(URL_RE.findall(text))
    rest = URL_RE.sub(" ", text)
    tokens = tuple(t.replace("’", "'") for t in _TOKEN_RE.findall(rest))
    return TokenList(
        tokens=tokens,
        hashtags=sum(t.startswith("#") for t in tokens),
        mentions=sum(t.startswith("@") for t in tokens),
        urls=n_urls,
        # question marks inside URLs are query strings, not punctuation
        question_marks=rest.count("?"),
    )


def strip_markers(text: str) -> str:
    """Remove hashtags, mentions and URLs, then squeeze whitespace."""
    return _SPACE_RE.sub(" ", _MARKER_RE.sub(" ", text)).strip()


def _is_url(token: str) -> bool:
    return URL_RE.match(token) is not None


def lexical_tokens(tokens: TokenList | tuple[str, ...] | list[str]) -> list[str]:
    """Word tokens for lexicon lookup and similarity: mentions and URLs
    dropped, hashtags kept without the ``#``. Multiplicity is preserved."""
    out = []
    for tok in tokens:
        if tok.startswith("@") or _is_url(tok):
            continue
        if tok.startswith("#"):
            tok = tok[1:]
            if not tok:
                continue
        out.append(tok)
    return out


def content_token_set(tokens: TokenList | tuple[str, ...] | list[str]) -> set[str]:
    return set(lexical_tokens(tokens))
