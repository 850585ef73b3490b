"""Per-tweet feature vectors and feature-group configurations.

Four groups, always concatenated in this order:

=================  ====  ===============================================
group              size  contents
=================  ====  ===============================================
structural            6  retweets, "?" presence/count, hashtag presence,
                         marker-free text length, URL count
conversational        3  Jaccard similarity to source and to parent, depth
affective            24  Emolex (10 counts), EmoSN (6 counts), DAL (3 means),
                         ANEW (3 means), LIWC posemo/negemo (2 counts)
dialogue_act         11  LIWC counts for assent, certain, affect, negate,
                         inhib, you, cause, future, sad, insight, cogmech
=================  ====  ===============================================
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import ConversationThread, Dataset, StanceLabel, Tweet, depth_of
from .lexicons import (
    LexiconRegistry,
    ScoredLexicon,
    WildcardDictionary,
    category_counts,
    mean_dimension,
)
from .textproc import TokenList, content_token_set, lexical_tokens, strip_markers, tokenize

logger = logging.getLogger(__name__)


class FeatureError(ValueError):
    pass


STRUCTURAL = (
    "retweet_count",
    "question_mark",
    "question_mark_count",
    "hashtag_presence",
    "text_length",
    "url_count",
)
CONVERSATIONAL = ("similarity_to_source", "similarity_to_replied", "depth")

EMOLEX_CATEGORIES = ("anger", "anticipation", "disgust", "fear", "joy", "sadness",
                     "surprise", "trust", "positive", "negative")
EMOSN_CATEGORIES = ("anger", "disgust", "fear", "joy", "sadness", "surprise")
DAL_DIMENSIONS = ("pleasantness", "activation", "imagery")
ANEW_DIMENSIONS = ("valence", "arousal", "dominance")
LIWC_AFFECT = ("posemo", "negemo")
DIALOGUE_ACT_CATEGORIES = ("assent", "certain", "affect", "negate", "inhib", "you",
                           "cause", "future", "sad", "insight", "cogmech")

# (resource, kind, keys) in output order
_AFFECTIVE_LAYOUT = (
    ("emolex", "count", EMOLEX_CATEGORIES),
    ("emosn", "count", EMOSN_CATEGORIES),
    ("dal", "mean", DAL_DIMENSIONS),
    ("anew", "mean", ANEW_DIMENSIONS),
    ("liwc", "count", LIWC_AFFECT),
)
AFFECTIVE = tuple(f"{res}_{key}" for res, _, keys in _AFFECTIVE_LAYOUT for key in keys)
DIALOGUE_ACT = tuple(f"liwc_{c}" for c in DIALOGUE_ACT_CATEGORIES)

GROUPS = {
    "structural": STRUCTURAL,
    "conversational": CONVERSATIONAL,
    "affective": AFFECTIVE,
    "dialogue_act": DIALOGUE_ACT,
}
GROUP_ORDER = tuple(GROUPS)
GROUP_RESOURCES = {
    "structural": (),
    "conversational": (),
    "affective": ("emolex", "emosn", "dal", "anew", "liwc"),
    "dialogue_act": ("liwc",),
}

BEST_AFFECTIVE = ("dal_activation", "anew_dominance", "emolex_negative", "emolex_fear",
                  "liwc_assent", "liwc_cause", "liwc_certain", "liwc_sad")


@dataclass(frozen=True)
class FeatureConfig:
    """A named selection of feature groups.

    ``selection`` optionally narrows the affective and dialogue-act columns
    to the listed names; structural and conversational columns are always
    kept whole when their group is selected.
    """

    name: str
    groups: frozenset[str]
    selection: frozenset[str] | None = None

    @property
    def schema(self) -> tuple[str, ...]:
        names = []
        for group in GROUP_ORDER:
            if group not in self.groups:
                continue
            for col in GROUPS[group]:
                if (self.selection is None or group in ("structural", "conversational")
                        or col in self.selection):
                    names.append(col)
        return tuple(names)

    @property
    def dimension(self) -> int:
        return len(self.schema)

    @property
    def resources(self) -> tuple[str, ...]:
        """Lexicons whose columns appear in the schema."""
        cols = self.schema
        needed = []
        for res in ("emolex", "emosn", "dal", "anew", "liwc"):
            if any(c.startswith(res + "_") for c in cols):
                needed.append(res)
        return tuple(needed)


def _cfg(name: str, *groups: str, selection: Iterable[str] | None = None) -> FeatureConfig:
    return FeatureConfig(name, frozenset(groups), None if selection is None else frozenset(selection))


_S, _C, _A, _D = "structural", "conversational", "affective", "dialogue_act"
CONFIGS: dict[str, FeatureConfig] = {
    "A": _cfg("A", _S),
    "B": _cfg("B", _C),
    "C": _cfg("C", _A),
    "D": _cfg("D", _D),
    "E": _cfg("E", _S, _C),
    "F": _cfg("F", _S, _A),
    "G": _cfg("G", _S, _D),
    "H": _cfg("H", _S, _C, _A),
    "I": _cfg("I", _S, _C, _D),
    "J": _cfg("J", _S, _A, _D),
    "K": _cfg("K", _S, _C, _A, _D),
    "BEST17": _cfg("BEST17", _S, _C, _A, _D, selection=BEST_AFFECTIVE),
}
ABLATION_CONFIGS = tuple("ABCDEFGHIJK")


def get_config(name: str) -> FeatureConfig:
    try:
        return CONFIGS[name.upper()]
    except KeyError:
        raise FeatureError(f"unknown feature config {name!r}; choose from {', '.join(CONFIGS)}") from None


# -- individual groups -----------------------------------------------------


def jaccard(a: set[str] | frozenset[str], b: set[str] | frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union


def structural_features(tweet: Tweet, tokens: TokenList | None = None) -> list[float]:
    tokens = tokens if tokens is not None else tokenize(tweet.text)
    return [
        float(tweet.retweet_count),
        float(tokens.question_marks > 0),
        float(tokens.question_marks),
        float(tokens.hashtags > 0),
        float(len(strip_markers(tweet.text))),
        float(tokens.urls),
    ]


def conversational_features(tweet: Tweet, thread: ConversationThread) -> list[float]:
    if tweet.id not in thread:
        raise FeatureError(f"tweet {tweet.id} is not in thread {thread.id}")
    depth = depth_of(thread, tweet.id)
    if tweet.is_source:
        return [1.0, 1.0, float(depth)]
    own = content_token_set(tokenize(tweet.text))
    src = content_token_set(tokenize(thread.source.text))
    parent = thread.parent_of(tweet.id)
    par = src if parent is None or parent.id == thread.source.id else content_token_set(tokenize(parent.text))
    return [jaccard(own, src), jaccard(own, par), float(depth)]


def _warn_absent(name: str, _seen: set = set()) -> None:
    if name not in _seen:
        _seen.add(name)
        logger.warning("lexicon %s not loaded; its features are set to 0", name)


def affective_features(tokens: TokenList | Sequence[str], registry: LexiconRegistry,
                       resources: Iterable[str] | None = None) -> list[float]:
    """24 affect values. An absent resource contributes zeros.

    ``resources`` limits lookups to the named lexicons; the others are
    zero-filled without a warning.
    """
    words = lexical_tokens(tokens)
    wanted = None if resources is None else set(resources)
    out: list[float] = []
    for res, kind, keys in _AFFECTIVE_LAYOUT:
        lex = registry.get(res) if wanted is None or res in wanted else None
        if lex is None:
            if wanted is None or res in wanted:
                _warn_absent(res)
            out.extend([0.0] * len(keys))
        elif kind == "count":
            out.extend(float(v) for v in category_counts(lex, words, keys))
        else:
            out.extend(mean_dimension(lex, words, k) for k in keys)
    return out


def dialogue_act_features(tokens: TokenList | Sequence[str], liwc: WildcardDictionary) -> list[float]:
    return [float(v) for v in category_counts(liwc, lexical_tokens(tokens), DIALOGUE_ACT_CATEGORIES)]


def validate_registry(registry: LexiconRegistry, config: FeatureConfig,
                      allow_missing: bool = False) -> list[str]:
    """Check that lexicons needed by ``config`` are loaded and well formed.

    Returns the list of missing resources (empty when all are present);
    raises if any is missing and ``allow_missing`` is false, or if a loaded
    resource lacks a category or dimension the extractor reads.
    """
    missing = registry.missing(config.resources)
    if missing and not allow_missing:
        raise FeatureError(f"config {config.name} needs lexicons not loaded: {', '.join(missing)}")
    required = {
        "emolex": EMOLEX_CATEGORIES,
        "emosn": EMOSN_CATEGORIES,
        "dal": DAL_DIMENSIONS,
        "anew": ANEW_DIMENSIONS,
        "liwc": LIWC_AFFECT + DIALOGUE_ACT_CATEGORIES,
    }
    for res in config.resources:
        lex = registry.get(res)
        if lex is None:
            continue
        have = lex.dimensions if isinstance(lex, ScoredLexicon) else lex.categories
        absent = [k for k in required[res] if k not in have]
        if absent:
            raise FeatureError(f"lexicon {res} lacks {', '.join(absent)}")
    return missing


# -- vectors ---------------------------------------------------------------


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    schema: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.schema):
            raise FeatureError("values and schema differ in length")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.schema, (float(v) for v in self.values)))


def _full_vector(tweet: Tweet, thread: ConversationThread, registry: LexiconRegistry,
                 config: FeatureConfig) -> dict[str, float]:
    groups = config.groups
    tokens = tokenize(tweet.text)
    values: dict[str, float] = {}
    if "structural" in groups:
        values.update(zip(STRUCTURAL, structural_features(tweet, tokens)))
    if "conversational" in groups:
        values.update(zip(CONVERSATIONAL, conversational_features(tweet, thread)))
    if "affective" in groups:
        values.update(zip(AFFECTIVE, affective_features(tokens, registry, config.resources)))
    if "dialogue_act" in groups:
        liwc = registry.get("liwc")
        if liwc is None:
            _warn_absent("liwc")
            values.update(dict.fromkeys(DIALOGUE_ACT, 0.0))
        else:
            values.update(zip(DIALOGUE_ACT, dialogue_act_features(tokens, liwc)))
    return values


def extract(tweet: Tweet, thread: ConversationThread, registry: LexiconRegistry,
            config: FeatureConfig) -> FeatureVector:
    schema = config.schema
    values = _full_vector(tweet, thread, registry, config)
    return FeatureVector(np.array([values[c] for c in schema], dtype=float), schema)


def build_matrix(dataset: Dataset, registry: LexiconRegistry, config: FeatureConfig
                 ) -> tuple[np.ndarray, list[StanceLabel], list[str]]:
    """Feature matrix, gold labels and tweet ids for the dataset's instances."""
    schema = config.schema
    rows, labels, ids = [], [], []
    for tweet, thread in dataset.instances():
        values = _full_vector(tweet, thread, registry, config)
        rows.append([values[c] for c in schema])
        labels.append(tweet.label)
        ids.append(tweet.id)
    X = np.array(rows, dtype=float).reshape(len(rows), len(schema))
    return X, labels, ids


def build_unlabeled(dataset: Dataset, registry: LexiconRegistry, config: FeatureConfig
                    ) -> tuple[np.ndarray, list[str]]:
    """Feature matrix and ids for every tweet, labeled or not."""
    schema = config.schema
    rows, ids = [], []
    for tweet, thread in dataset.iter_tweets():
        values = _full_vector(tweet, thread, registry, config)
        rows.append([values[c] for c in schema])
        ids.append(tweet.id)
    return np.array(rows, dtype=float).reshape(len(rows), len(schema)), ids


# -- standardisation -------------------------------------------------------


@dataclass(frozen=True)
class Scaler:
    """Per-column z-scoring with population standard deviation.

    Columns that were constant in the training data map to 0.
    """

    mean: np.ndarray
    std: np.ndarray
    schema: tuple[str, ...]

    @property
    def constant(self) -> np.ndarray:
        return self.std == 0

    @classmethod
    def fit(cls, X: np.ndarray, schema: Sequence[str]) -> "Scaler":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise FeatureError("cannot fit a scaler on an empty matrix")
        if X.shape[1] != len(schema):
            raise FeatureError("matrix width does not match schema")
        return cls(X.mean(axis=0), X.std(axis=0), tuple(schema))

    @classmethod
    def identity(cls, schema: Sequence[str]) -> "Scaler":
        d = len(schema)
        return cls(np.zeros(d), np.ones(d), tuple(schema))

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != len(self.schema):
            raise FeatureError(f"expected {len(self.schema)} features, got {X.shape[-1]}")
        safe = np.where(self.constant, 1.0, self.std)
        return np.where(self.constant, 0.0, (X - self.mean) / safe)


def fit_scaler(vectors: Sequence[FeatureVector]) -> Scaler:
    if not vectors:
        raise FeatureError("cannot fit a scaler on no vectors")
    schema = vectors[0].schema
    if any(v.schema != schema for v in vectors):
        raise FeatureError("vectors have different schemas")
    return Scaler.fit(np.vstack([v.values for v in vectors]), schema)


def apply_scaler(scaler: Scaler, vector: FeatureVector) -> FeatureVector:
    if vector.schema != scaler.schema:
        raise FeatureError("vector schema does not match the scaler")
    return FeatureVector(scaler.transform(vector.values), vector.schema)
