import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rumourstance import synthetic  # noqa: E402
from rumourstance.corpus import Dataset, StanceLabel, Tweet, build_thread  # noqa: E402
from rumourstance.lexicons import LexiconRegistry, fixture_directory  # noqa: E402

# filled by test_acceptance.py, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def registry():
    return LexiconRegistry.from_directory(fixture_directory())


@pytest.fixture(scope="session")
def splits():
    return synthetic.make_splits(0)


def T(id, text="", reply=None, thread="t1", rt=0, label=None):
    return Tweet(id, text, reply, thread, rt, None if label is None else StanceLabel(label))


@pytest.fixture
def small_thread():
    """s1 <- r1 <- r2, plus r3 replying to s1."""
    return build_thread([
        T("s1", "Hillary is ill #breaking http://t.co/abc", label="support", rt=120),
        T("r1", "@a hillary is fine", "s1", label="deny"),
        T("r2", "@b is this true??", "r1", label="query"),
        T("r3", "wow sad", "s1", label="comment"),
    ], event="hillary")


@pytest.fixture
def small_dataset(small_thread):
    return Dataset((small_thread,), "train")


def write_thread_dir(root: Path, event: str, thread_id: str, structure: dict,
                     tweets: dict[str, str], retweets: dict[str, int] | None = None):
    tdir = root / event / thread_id
    (tdir / "source-tweet").mkdir(parents=True)
    (tdir / "replies").mkdir()
    (tdir / "structure.json").write_text(json.dumps(structure))
    source = next(iter(structure))
    for tid, text in tweets.items():
        sub = "source-tweet" if tid == source else "replies"
        rec = {"id_str": tid, "text": text}
        if retweets and tid in retweets:
            rec["retweet_count"] = retweets[tid]
        (tdir / sub / f"{tid}.json").write_text(json.dumps(rec))
    return tdir
