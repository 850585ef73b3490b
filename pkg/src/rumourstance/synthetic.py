"""Synthetic rumour threads for demos and tests.

The real RumourEval data cannot be redistributed, so this module generates
threads with the same shape: a source tweet that states a rumour, replies
nested a few levels deep, and an SDQC label on every tweet with roughly the
official class balance. Label-specific vocabulary, question marks, URLs and
quoting of the source make the classes learnable but not trivially so.
"""

from __future__ import annotations

import random

from .corpus import Dataset, StanceLabel, Tweet, build_thread

EVENTS = ("ferguson", "sydneysiege", "ottawashooting", "charliehebdo", "germanwings")

_RUMOURS = (
    "police confirmed a gunman is still inside the building",
    "hostage situation reported at the cafe downtown",
    "shooting at the memorial, soldier killed",
    "the suspect was arrested by police an hour ago",
    "plane crashed in the mountains with no survivors",
    "attack on the magazine office, several killed",
)

_VOCAB = {
    StanceLabel.SUPPORT: ("confirmed", "true", "yes", "definitely", "absolutely", "sure",
                          "reports", "confirm", "agree", "truth", "police", "know"),
    StanceLabel.DENY: ("fake", "false", "not", "no", "never", "hoax", "lie", "wrong",
                       "nothing", "stop", "cannot", "don't"),
    StanceLabel.QUERY: ("is", "this", "really", "source", "why", "you", "how", "what",
                        "because", "any", "proof", "confirm"),
    StanceLabel.COMMENT: ("wow", "sad", "pray", "omg", "thoughts", "terrible", "will",
                          "think", "people", "hope", "safe", "horrible"),
}
_FILLER = ("the", "a", "this", "that", "it", "just", "so", "all", "they", "we", "now",
           "here", "today", "news", "everyone", "world", "story", "right")

_REPLY_WEIGHTS = {
    StanceLabel.SUPPORT: 0.12,
    StanceLabel.DENY: 0.08,
    StanceLabel.QUERY: 0.09,
    StanceLabel.COMMENT: 0.71,
}


def _text(rng: random.Random, label: StanceLabel, source_text: str | None, user: str) -> str:
    words = []
    n = rng.randint(4, 14)
    for _ in range(n):
        if rng.random() < 0.45:
            words.append(rng.choice(_VOCAB[label]))
        else:
            words.append(rng.choice(_FILLER))
    if source_text and label is StanceLabel.SUPPORT and rng.random() < 0.5:
        # echoing the claim is typical of supporting replies
        words.extend(source_text.split()[: rng.randint(3, 8)])
    text = " ".join(words)
    if label is StanceLabel.QUERY and rng.random() < 0.8:
        text += "?" * rng.choice((1, 1, 2))
    elif rng.random() < 0.06:
        text += "?"
    if rng.random() < 0.7 and source_text is not None:
        text = f"@{user} " + text
    if rng.random() < (0.35 if label is StanceLabel.SUPPORT else 0.1):
        text += f" http://t.co/{rng.randrange(16 ** 6):06x}"
    if rng.random() < 0.15:
        text += f" #{rng.choice(EVENTS)}"
    return text


def make_dataset(n_threads: int = 30, seed: int = 0, split: str = "train",
                 replies: tuple[int, int] = (4, 20), id_offset: int = 0) -> Dataset:
    rng = random.Random(seed)
    labels = list(_REPLY_WEIGHTS)
    weights = list(_REPLY_WEIGHTS.values())
    threads = []
    next_id = 10_000_000 + id_offset
    for t in range(n_threads):
        event = EVENTS[t % len(EVENTS)]
        thread_id = str(next_id)
        src_label = StanceLabel.SUPPORT if rng.random() < 0.85 else StanceLabel.DENY
        claim = rng.choice(_RUMOURS)
        source = Tweet(
            id=thread_id,
            text=f"BREAKING: {claim} #{event}" + (" http://t.co/src" if rng.random() < 0.6 else ""),
            thread_id=thread_id,
            retweet_count=int(rng.lognormvariate(4.0, 1.0)),
            label=src_label,
        )
        next_id += 1
        tweets = [source]
        for _ in range(rng.randint(*replies)):
            label = rng.choices(labels, weights)[0]
            parent = source if len(tweets) == 1 or rng.random() < 0.6 else rng.choice(tweets[1:])
            tweets.append(Tweet(
                id=str(next_id),
                text=_text(rng, label, claim, f"user{rng.randrange(500)}"),
                in_reply_to=parent.id,
                thread_id=thread_id,
                retweet_count=int(rng.expovariate(1.5)),
                label=label,
            ))
            next_id += 1
        threads.append(build_thread(tweets, event))
    return Dataset(tuple(threads), split)


def make_splits(seed: int = 0) -> tuple[Dataset, Dataset, Dataset]:
    """Train, dev and test splits with disjoint tweet ids."""
    return (
        make_dataset(60, seed, "train"),
        make_dataset(12, seed + 1, "dev", id_offset=1_000_000),
        make_dataset(20, seed + 2, "test", id_offset=2_000_000),
    )
