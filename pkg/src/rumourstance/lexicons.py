"""Affective lexicons behind one lookup interface.

Three on-disk formats are understood:

categorical (NRC association format, used for Emolex and EmoSenticNet)
    ``word<TAB>category<TAB>flag`` with flag 0 or 1.
scored (DAL, ANEW)
    a header ``word<TAB>dim1<TAB>dim2...`` followed by ``word<TAB>v1<TAB>v2...``.
wildcard dictionary (LIWC ``.dic``)
    ``%`` / ``id<TAB>name`` lines / ``%`` / ``pattern<TAB>id...`` lines, where
    a pattern ending in ``*`` matches any token it prefixes.

Fields may be separated by any run of whitespace. Lines starting with ``#``
and blank lines are skipped in the categorical and scored formats.
"""

from __future__ import annotations

import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

logger = logging.getLogger(__name__)

# Published sizes of the full resources; a loaded file of another size is
# reported but accepted.
EXPECTED_SIZES = {"emolex": 14182, "emosn": 13189, "dal": 8742, "anew": 1034}

LEXICON_ENV = "RUMOURSTANCE_LEXICONS"

# name -> (file name, kind)
RESOURCE_FILES = {
    "emolex": ("emolex.txt", "categorical"),
    "emosn": ("emosn.txt", "categorical"),
    "dal": ("dal.txt", "scored"),
    "anew": ("anew.txt", "scored"),
    "liwc": ("liwc.dic", "wildcard"),
}


class LexiconError(ValueError):
    pass


def _check_size(name: str, n: int) -> None:
    expected = EXPECTED_SIZES.get(name.lower())
    if expected is not None and n != expected:
        logger.warning("lexicon %s has %d words, the published resource has %d", name, n, expected)


@dataclass(frozen=True)
class CategoricalLexicon:
    name: str
    entries: Mapping[str, frozenset[str]]
    categories: tuple[str, ...]

    def categories_of(self, token: str) -> frozenset[str]:
        return self.entries.get(token, frozenset())


@dataclass(frozen=True)
class ScoredLexicon:
    name: str
    entries: Mapping[str, tuple[float, ...]]
    dimensions: tuple[str, ...]


@dataclass
class WildcardDictionary:
    name: str
    patterns: list[tuple[str, frozenset[str]]]
    category_names: Mapping[str, str]
    _exact: dict = field(default_factory=dict, init=False, repr=False)
    _prefix: dict = field(default_factory=dict, init=False, repr=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        for pattern, ids in self.patterns:
            names = frozenset(self.category_names[i] for i in ids)
            table = self._prefix if pattern.endswith("*") else self._exact
            key = pattern.rstrip("*")
            table[key] = table.get(key, frozenset()) | names

    @property
    def categories(self) -> tuple[str, ...]:
        return tuple(self.category_names.values())

    def categories_of(self, token: str) -> frozenset[str]:
        hit = self._cache.get(token)
        if hit is None:
            cats = set(self._exact.get(token, ()))
            for k in range(len(token) + 1):
                found = self._prefix.get(token[:k])
                if found:
                    cats |= found
            hit = self._cache[token] = frozenset(cats)
        return hit

    def matches(self, pattern: str, token: str) -> bool:
        if pattern.endswith("*"):
            return token.startswith(pattern[:-1])
        return token == pattern


CountingLexicon = Union[CategoricalLexicon, WildcardDictionary]
Lexicon = Union[CategoricalLexicon, ScoredLexicon, WildcardDictionary]


def _data_lines(path: str | os.PathLike):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                yield lineno, stripped.split()


def load_categorical(path: str | os.PathLike, name: str, check_size: bool = True) -> CategoricalLexicon:
    entries: dict[str, set[str]] = {}
    categories: dict[str, None] = {}
    for lineno, parts in _data_lines(path):
        if len(parts) != 3 or parts[2] not in ("0", "1"):
            raise LexiconError(f"{path}:{lineno}: expected 'word category 0|1'")
        word, category, flag = parts[0].lower(), parts[1].lower(), parts[2]
        categories.setdefault(category)
        if flag == "1":
            entries.setdefault(word, set()).add(category)
        else:
            entries.setdefault(word, set())
    lex = CategoricalLexicon(
        name=name,
        entries={w: frozenset(c) for w, c in entries.items() if c},
        categories=tuple(categories),
    )
    if check_size:
        _check_size(name, len(entries))
    return lex


def load_scored(path: str | os.PathLike, name: str, check_size: bool = True) -> ScoredLexicon:
    rows = _data_lines(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise LexiconError(f"{path}: missing header line") from None
    dims = tuple(h.lower() for h in header[1:])
    if not dims:
        raise LexiconError(f"{path}: header names no dimensions")
    entries: dict[str, tuple[float, ...]] = {}
    for lineno, parts in rows:
        if len(parts) != len(dims) + 1:
            raise LexiconError(f"{path}:{lineno}: expected {len(dims) + 1} fields, got {len(parts)}")
        try:
            entries[parts[0].lower()] = tuple(float(v) for v in parts[1:])
        except ValueError:
            raise LexiconError(f"{path}:{lineno}: non-numeric score") from None
    if check_size:
        _check_size(name, len(entries))
    return ScoredLexicon(name, entries, dims)


def load_wildcard_dic(path: str | os.PathLike, name: str) -> WildcardDictionary:
    with open(path, encoding="utf-8-sig") as fh:
        lines = [ln.strip() for ln in fh]
    marks = [i for i, ln in enumerate(lines) if ln == "%"]
    if len(marks) < 2:
        raise LexiconError(f"{path}: expected two '%' delimiter lines")
    start, end = marks[0], marks[1]
    category_names: dict[str, str] = {}
    for i in range(start + 1, end):
        if not lines[i]:
            continue
        parts = lines[i].split()
        if len(parts) < 2:
            raise LexiconError(f"{path}:{i + 1}: expected 'id name'")
        category_names[_norm_id(parts[0])] = parts[1].lower()
    patterns = []
    for i in range(end + 1, len(lines)):
        if not lines[i]:
            continue
        parts = lines[i].split()
        ids = []
        for raw in parts[1:]:
            cid = _norm_id(raw)
            if cid not in category_names:
                raise LexiconError(f"{path}:{i + 1}: unknown category id {raw!r}")
            ids.append(cid)
        patterns.append((parts[0].lower(), frozenset(ids)))
    return WildcardDictionary(name, patterns, category_names)


def _norm_id(raw: str) -> str:
    return str(int(raw)) if raw.isdigit() else raw


def _known(lexicon, category: str) -> str:
    category = category.lower()
    if category not in lexicon.categories:
        raise KeyError(f"lexicon {lexicon.name!r} has no category {category!r}")
    return category


def category_count(lexicon: CountingLexicon, tokens: Iterable[str], category: str) -> int:
    """Number of tokens (with repeats) carrying ``category``."""
    category = _known(lexicon, category)
    return sum(category in lexicon.categories_of(tok) for tok in tokens)


def category_counts(lexicon: CountingLexicon, tokens: Iterable[str],
                    categories: Sequence[str]) -> list[int]:
    """Like :func:`category_count` for several categories in one pass."""
    wanted = [_known(lexicon, c) for c in categories]
    hits: Counter[str] = Counter()
    for tok in tokens:
        hits.update(lexicon.categories_of(tok))
    return [hits[c] for c in wanted]


def mean_dimension(lexicon: ScoredLexicon, tokens: Iterable[str], dimension: str) -> float:
    """Mean score over the tokens found in the lexicon; 0.0 if none is."""
    dimension = dimension.lower()
    try:
        k = lexicon.dimensions.index(dimension)
    except ValueError:
        raise KeyError(f"lexicon {lexicon.name!r} has no dimension {dimension!r}") from None
    values = [lexicon.entries[t][k] for t in tokens if t in lexicon.entries]
    return sum(values) / len(values) if values else 0.0


@dataclass
class LexiconRegistry:
    resources: dict[str, Lexicon] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.resources

    def get(self, name: str) -> Lexicon | None:
        return self.resources.get(name)

    def __getitem__(self, name: str) -> Lexicon:
        return self.resources[name]

    def missing(self, names: Iterable[str]) -> list[str]:
        return [n for n in names if n not in self.resources]

    @classmethod
    def from_directory(cls, path: str | os.PathLike | None = None) -> "LexiconRegistry":
        """Load whichever of the known resource files exist in ``path``.

        ``path`` defaults to the ``RUMOURSTANCE_LEXICONS`` environment
        variable; with neither set an empty registry is returned.
        """
        if path is None:
            path = os.environ.get(LEXICON_ENV)
            if not path:
                return cls()
        root = Path(path)
        if not root.is_dir():
            raise LexiconError(f"lexicon directory {root} does not exist")
        check = root.resolve() != fixture_directory().resolve()
        resources: dict[str, Lexicon] = {}
        for name, (fname, kind) in RESOURCE_FILES.items():
            fpath = root / fname
            if not fpath.exists():
                continue
            if kind == "categorical":
                resources[name] = load_categorical(fpath, name, check)
            elif kind == "scored":
                resources[name] = load_scored(fpath, name, check)
            else:
                resources[name] = load_wildcard_dic(fpath, name)
        return cls(resources)


def fixture_directory() -> Path:
    """Directory of the small synthetic lexicons shipped with the package.

    They follow the documented formats and carry the category and dimension
    names the feature extractor expects, but only a handful of words each.
    """
    return Path(__file__).parent / "data" / "lexicons"
