"""Conversation-thread corpora with SDQC stance labels.

Two input layouts are supported:

* the official RumourEval directory tree
  (``<event>/<thread-id>/{source-tweet,replies}/<id>.json`` plus
  ``structure.json``) together with a JSON key file mapping tweet id to label;
* a flat JSONL file, one tweet per line (see :func:`load_flat`).
"""

from __future__ import annotations

import json
import logging
import os
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping

logger = logging.getLogger(__name__)


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus input."""


class StanceLabel(str, Enum):
    SUPPORT = "support"
    DENY = "deny"
    QUERY = "query"
    COMMENT = "comment"

    @classmethod
    def parse(cls, value: str) -> "StanceLabel":
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise CorpusError(f"unknown stance label {value!r}") from None

    @property
    def short(self) -> str:
        return self.value[0].upper()


# Fixed order used for confusion matrices and one-vs-one pairs.
LABELS: tuple[StanceLabel, ...] = (
    StanceLabel.SUPPORT,
    StanceLabel.DENY,
    StanceLabel.QUERY,
    StanceLabel.COMMENT,
)


@dataclass(frozen=True)
class Tweet:
    id: str
    text: str
    in_reply_to: str | None = None
    thread_id: str = ""
    retweet_count: int = 0
    label: StanceLabel | None = None

    @property
    def is_source(self) -> bool:
        return self.in_reply_to is None


@dataclass(frozen=True)
class ConversationThread:
    """A source tweet and its tree of direct and nested replies.

    ``tweets`` maps every id in the thread (source included) to its tweet and
    ``children`` maps a tweet id to the ids replying to it, in input order.
    """

    source: Tweet
    tweets: Mapping[str, Tweet]
    children: Mapping[str, tuple[str, ...]]
    event: str = ""
    _depths: Mapping[str, int] = field(default=None, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        depths = {self.source.id: 0}
        stack = [self.source.id]
        while stack:
            node = stack.pop()
            for child in self.children.get(node, ()):
                if child in depths:
                    raise CorpusError(f"thread {self.id}: tweet {child} reached twice (cycle or shared parent)")
                depths[child] = depths[node] + 1
                stack.append(child)
        unreachable = set(self.tweets) - set(depths)
        if unreachable:
            raise CorpusError(
                f"thread {self.id}: tweets not reachable from source (cycle?): {sorted(unreachable)}"
            )
        object.__setattr__(self, "_depths", depths)

    @property
    def id(self) -> str:
        return self.source.thread_id or self.source.id

    def __len__(self) -> int:
        return len(self.tweets)

    def __contains__(self, tweet_id: object) -> bool:
        return tweet_id in self.tweets

    def parent_of(self, tweet_id: str) -> Tweet | None:
        tweet = self.tweets[tweet_id]
        return None if tweet.in_reply_to is None else self.tweets[tweet.in_reply_to]

    def iter_tweets(self) -> Iterator[Tweet]:
        """Yield tweets in depth-first pre-order, source first."""
        stack = [self.source.id]
        while stack:
            node = stack.pop()
            yield self.tweets[node]
            stack.extend(reversed(self.children.get(node, ())))


def depth_of(thread: ConversationThread, tweet_id: str) -> int:
    """Number of reply edges between the source tweet and ``tweet_id``."""
    try:
        return thread._depths[tweet_id]
    except KeyError:
        raise KeyError(f"tweet {tweet_id!r} is not in thread {thread.id!r}") from None


@dataclass(frozen=True)
class Dataset:
    """A split of threads.

    ``instance_ids`` restricts which labeled tweets count as training or
    evaluation instances; ``None`` means every labeled tweet. Threads are
    always kept whole so that context features can be computed.
    """

    threads: tuple[ConversationThread, ...]
    split: str = "train"
    instance_ids: frozenset[str] | None = None

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for thread in self.threads:
            dup = seen.intersection(thread.tweets)
            if dup:
                raise CorpusError(f"duplicate tweet ids across threads: {sorted(dup)[:5]}")
            seen.update(thread.tweets)

    def iter_tweets(self) -> Iterator[tuple[Tweet, ConversationThread]]:
        for thread in self.threads:
            for tweet in thread.iter_tweets():
                yield tweet, thread

    def instances(self) -> list[tuple[Tweet, ConversationThread]]:
        """Labeled tweets that are classification instances, in stable order."""
        return [
            (tweet, thread)
            for tweet, thread in self.iter_tweets()
            if tweet.label is not None and (self.instance_ids is None or tweet.id in self.instance_ids)
        ]

    @property
    def n_tweets(self) -> int:
        return sum(len(t) for t in self.threads)


def class_counts(dataset: Dataset) -> dict[StanceLabel, int]:
    counts = Counter(tweet.label for tweet, _ in dataset.instances())
    return {label: counts.get(label, 0) for label in LABELS}


def balanced_subset(dataset: Dataset, per_class: int, seed: int) -> Dataset:
    """Sample ``per_class`` instances of every label without replacement."""
    by_label: dict[StanceLabel, list[str]] = {label: [] for label in LABELS}
    for tweet, _ in dataset.instances():
        by_label[tweet.label].append(tweet.id)
    rng = random.Random(seed)
    chosen: set[str] = set()
    for label in LABELS:
        ids = by_label[label]
        if len(ids) < per_class:
            raise CorpusError(f"class {label.value!r} has only {len(ids)} instances, {per_class} requested")
        chosen.update(rng.sample(ids, per_class))
    return Dataset(dataset.threads, dataset.split, frozenset(chosen))


def merge(*datasets: Dataset, split: str | None = None) -> Dataset:
    threads = tuple(t for d in datasets for t in d.threads)
    if any(d.instance_ids is not None for d in datasets):
        ids: frozenset[str] | None = frozenset(
            tweet.id for d in datasets for tweet, _ in d.instances()
        )
    else:
        ids = None
    return Dataset(threads, split or datasets[0].split, ids)


# -- building threads ------------------------------------------------------


def build_thread(tweets: Iterable[Tweet], event: str = "") -> ConversationThread:
    """Assemble a thread from tweets linked by ``in_reply_to``.

    Replies whose parent is not in the thread are re-attached to the source.
    """
    tweets = list(tweets)
    by_id: dict[str, Tweet] = {}
    for tweet in tweets:
        if tweet.id in by_id:
            raise CorpusError(f"duplicate tweet id {tweet.id}")
        by_id[tweet.id] = tweet
    sources = [t for t in tweets if t.in_reply_to is None]
    thread_name = tweets[0].thread_id if tweets else "?"
    if len(sources) != 1:
        raise CorpusError(f"thread {thread_name}: expected exactly one source tweet, found {len(sources)}")
    source = sources[0]

    children: dict[str, list[str]] = {}
    for tweet in tweets:
        if tweet.in_reply_to is None:
            continue
        parent = tweet.in_reply_to
        if parent not in by_id:
            logger.warning("thread %s: tweet %s replies to missing %s; attached to source",
                           thread_name, tweet.id, parent)
            tweet = replace(tweet, in_reply_to=source.id)
            by_id[tweet.id] = tweet
            parent = source.id
        children.setdefault(parent, []).append(tweet.id)
    return ConversationThread(
        source=source,
        tweets=by_id,
        children={k: tuple(v) for k, v in children.items()},
        event=event,
    )


# -- flat JSONL ------------------------------------------------------------

_FLAT_FIELDS = ("id", "text", "in_reply_to", "thread_id", "retweet_count", "label")


def _tweet_from_record(rec: Mapping, where: str) -> Tweet:
    try:
        tweet_id = str(rec["id"])
    except KeyError:
        raise CorpusError(f"{where}: missing 'id'") from None
    reply = rec.get("in_reply_to")
    label = rec.get("label")
    return Tweet(
        id=tweet_id,
        text=rec.get("text") or "",
        in_reply_to=None if reply is None else str(reply),
        thread_id=str(rec.get("thread_id") or ""),
        retweet_count=int(rec.get("retweet_count") or 0),
        label=None if label is None else StanceLabel.parse(label),
    )


def load_flat(path: str | os.PathLike, split: str = "train") -> Dataset:
    """Read a JSONL file with fields id, text, in_reply_to, thread_id,
    retweet_count and label. Unknown fields are ignored."""
    groups: dict[str, list[Tweet]] = {}
    events: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            tweet = _tweet_from_record(rec, f"{path}:{lineno}")
            groups.setdefault(tweet.thread_id, []).append(tweet)
            if rec.get("event"):
                events.setdefault(tweet.thread_id, str(rec["event"]))
    threads = tuple(build_thread(tweets, events.get(tid, "")) for tid, tweets in groups.items())
    return Dataset(threads, split)


def write_flat(dataset: Dataset, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tweet, thread in dataset.iter_tweets():
            rec = {
                "id": tweet.id,
                "text": tweet.text,
                "in_reply_to": tweet.in_reply_to,
                "thread_id": tweet.thread_id,
                "retweet_count": tweet.retweet_count,
                "label": None if tweet.label is None else tweet.label.value,
            }
            if thread.event:
                rec["event"] = thread.event
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


# -- official RumourEval layout -----------------------------------------------


def load_key(path: str | os.PathLike) -> dict[str, StanceLabel]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise CorpusError(f"{path}: key file must be a JSON object mapping tweet id to label")
    return {str(k): StanceLabel.parse(v) for k, v in raw.items()}


def _read_tweet_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{path}: invalid tweet JSON ({exc.msg})") from None


def _walk_structure(node, parent: str | None, out: list[tuple[str, str | None]]) -> None:
    if isinstance(node, dict):
        for key, sub in node.items():
            out.append((str(key), parent))
            _walk_structure(sub, str(key), out)
    elif isinstance(node, list):
        for item in node:
            if isinstance(item, (str, int)):
                out.append((str(item), parent))
            else:
                _walk_structure(item, parent, out)
    # anything else (null, "") is a leaf marker


def _load_thread_dir(thread_dir: Path, event: str, key: Mapping[str, StanceLabel],
                     strict: bool) -> ConversationThread:
    struct_path = thread_dir / "structure.json"
    try:
        with open(struct_path, encoding="utf-8") as fh:
            structure = json.load(fh)
    except FileNotFoundError:
        raise CorpusError(f"thread {thread_dir.name}: missing structure.json") from None
    except json.JSONDecodeError as exc:
        raise CorpusError(f"thread {thread_dir.name}: unparsable structure.json ({exc.msg})") from None
    if not isinstance(structure, dict) or len(structure) != 1:
        raise CorpusError(f"thread {thread_dir.name}: structure.json must have exactly one root")

    edges: list[tuple[str, str | None]] = []
    _walk_structure(structure, None, edges)
    source_id = edges[0][0]
    thread_id = thread_dir.name

    files: dict[str, Path] = {}
    for sub in ("source-tweet", "replies"):
        d = thread_dir / sub
        if d.is_dir():
            for f in d.glob("*.json"):
                files[f.stem] = f

    present = {tid for tid, _ in edges if tid in files}
    tweets: list[Tweet] = []
    for tid, parent in edges:
        path = files.get(tid)
        if path is None:
            if strict or tid == source_id:
                raise CorpusError(f"thread {thread_id}: tweet {tid} is in structure.json but has no file")
            logger.warning("thread %s: tweet %s missing on disk, dropped", thread_id, tid)
            continue
        raw = _read_tweet_json(path)
        if parent is not None and parent not in present:
            parent = source_id
        tweets.append(Tweet(
            id=tid,
            text=raw.get("text") or raw.get("full_text") or "",
            in_reply_to=parent,
            thread_id=thread_id,
            retweet_count=int(raw.get("retweet_count") or 0),
            label=key.get(tid),
        ))
    return build_thread(tweets, event)


def load_semeval(root_path: str | os.PathLike, key_path: str | os.PathLike | None = None,
                 split: str = "train", strict: bool = True) -> Dataset:
    """Load the official directory layout.

    ``root_path`` holds event directories, each holding thread directories.
    A thread directory directly under the root (as in the released test
    data) is accepted too, with an empty event name. With ``strict=False``
    tweets named in ``structure.json`` but absent on disk are dropped and
    their replies re-attached to the source instead of raising.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise CorpusError(f"{root}: not a directory")
    key = load_key(key_path) if key_path is not None else {}
    threads = []
    for entry in sorted(p for p in root.iterdir() if p.is_dir()):
        if (entry / "structure.json").exists() or (entry / "source-tweet").is_dir():
            threads.append(_load_thread_dir(entry, "", key, strict))
            continue
        for thread_dir in sorted(p for p in entry.iterdir() if p.is_dir()):
            threads.append(_load_thread_dir(thread_dir, entry.name, key, strict))
    return Dataset(tuple(threads), split)


def write_semeval(dataset: Dataset, root_path: str | os.PathLike,
                  key_path: str | os.PathLike | None = None) -> None:
    """Write ``dataset`` in the official layout (inverse of :func:`load_semeval`)."""
    root = Path(root_path)
    key: dict[str, str] = {}
    for thread in dataset.threads:
        tdir = root / (thread.event or "_") / thread.id
        (tdir / "source-tweet").mkdir(parents=True, exist_ok=True)
        (tdir / "replies").mkdir(exist_ok=True)

        def nest(node: str):
            kids = thread.children.get(node, ())
            return {k: nest(k) for k in kids} if kids else []

        with open(tdir / "structure.json", "w", encoding="utf-8") as fh:
            json.dump({thread.source.id: nest(thread.source.id)}, fh)
        for tweet in thread.iter_tweets():
            sub = "source-tweet" if tweet.is_source else "replies"
            rec = {
                "id_str": tweet.id,
                "text": tweet.text,
                "in_reply_to_status_id_str": tweet.in_reply_to,
                "retweet_count": tweet.retweet_count,
            }
            with open(tdir / sub / f"{tweet.id}.json", "w", encoding="utf-8") as fh:
                json.dump(rec, fh, ensure_ascii=False)
            if tweet.label is not None:
                key[tweet.id] = tweet.label.value
    if key_path is not None:
        with open(key_path, "w", encoding="utf-8") as fh:
            json.dump(key, fh, indent=1, sort_keys=True)
