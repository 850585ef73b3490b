import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import T
from rumourstance.corpus import build_thread
from rumourstance.features import (
    ABLATION_CONFIGS,
    AFFECTIVE,
    CONFIGS,
    DIALOGUE_ACT,
    FeatureError,
    FeatureVector,
    Scaler,
    affective_features,
    apply_scaler,
    build_matrix,
    conversational_features,
    dialogue_act_features,
    extract,
    fit_scaler,
    get_config,
    jaccard,
    structural_features,
    validate_registry,
)
from rumourstance.lexicons import (
    CategoricalLexicon,
    LexiconRegistry,
    ScoredLexicon,
    WildcardDictionary,
)
from rumourstance.textproc import tokenize


def test_jaccard_examples():
    assert jaccard({"a", "b"}, {"a", "b"}) == 1.0
    assert jaccard({"a"}, {"b"}) == 0.0
    assert jaccard({"hillary", "is", "ill"}, {"hillary", "is", "fine"}) == 0.5
    assert jaccard(set(), set()) == 1.0
    assert jaccard({"a"}, set()) == 0.0


@given(st.sets(st.sampled_from("abcdefg")), st.sets(st.sampled_from("abcdefg")))
def test_jaccard_properties(a, b):
    v = jaccard(a, b)
    assert v == jaccard(b, a)
    assert 0.0 <= v <= 1.0
    if a:
        assert jaccard(a, a) == 1.0


def test_structural_example():
    tw = T("x", "Is this real? #Ferguson http://t.co/abc", rt=5)
    assert structural_features(tw) == [5, 1, 1, 1, 13, 1]
    assert structural_features(T("y", "")) == [0, 0, 0, 0, 0, 0]
    v = structural_features(T("z", "??"))
    assert v[1:3] == [1, 2]


def test_conversational(small_thread):
    s1 = small_thread.tweets["s1"]
    assert conversational_features(s1, small_thread) == [1.0, 1.0, 0.0]
    r1 = small_thread.tweets["r1"]
    # {hillary, is, fine} vs {hillary, is, ill, breaking}
    assert conversational_features(r1, small_thread) == [pytest.approx(2 / 5), pytest.approx(2 / 5), 1.0]
    r2 = small_thread.tweets["r2"]
    # {is, this, true} vs source {hillary, is, ill, breaking}: 1/6; vs r1 {hillary, is, fine}: 1/5
    assert conversational_features(r2, small_thread) == [pytest.approx(1 / 6), pytest.approx(1 / 5), 2.0]
    with pytest.raises(FeatureError):
        conversational_features(T("zz"), small_thread)


def test_conversational_identical_reply():
    # hashtag words count as content, mentions do not
    th = build_thread([T("s", "the claim #x"), T("r", "@u the claim", "s")])
    assert conversational_features(th.tweets["r"], th) == [pytest.approx(2 / 3), pytest.approx(2 / 3), 1.0]
    th = build_thread([T("s", "the claim"), T("r", "the claim", "s")])
    assert conversational_features(th.tweets["r"], th) == [1.0, 1.0, 1.0]


def test_conversational_nested_reply():
    th = build_thread([T("s", "hillary is ill"), T("r1", "something else", "s"),
                       T("r2", "hillary is fine", "r1")])
    sim_src, sim_par, depth = conversational_features(th.tweets["r2"], th)
    assert sim_src == 0.5 and sim_par == 0.0 and depth == 2


def _mini_registry():
    emolex = CategoricalLexicon("emolex", {"horrible": frozenset({"fear", "negative"})},
                                ("anger", "anticipation", "disgust", "fear", "joy", "sadness",
                                 "surprise", "trust", "positive", "negative"))
    dal = ScoredLexicon("dal", {"calm": (0.5, 1.0, 0.2)}, ("pleasantness", "activation", "imagery"))
    liwc = WildcardDictionary(
        "liwc", [("yes", frozenset({"1"})), ("because", frozenset({"2"})), ("cannot", frozenset({"3"})),
                 ("can*", frozenset({"4"}))],
        {"1": "assent", "2": "cause", "3": "negate", "4": "certain", "5": "affect", "6": "inhib",
         "7": "you", "8": "future", "9": "sad", "10": "insight", "11": "cogmech", "12": "posemo",
         "13": "negemo"})
    return LexiconRegistry({"emolex": emolex, "dal": dal, "liwc": liwc})


def test_affective_examples():
    reg = _mini_registry()
    assert affective_features(tokenize(""), reg) == [0.0] * 24
    vals = dict(zip(AFFECTIVE, affective_features(tokenize("horrible"), reg)))
    assert vals["emolex_fear"] == 1 and vals["emolex_negative"] == 1
    assert sum(vals.values()) == 2
    vals = dict(zip(AFFECTIVE, affective_features(tokenize("calm"), reg)))
    assert vals["dal_activation"] == 1.0


def test_affective_absent_resource_warns(caplog):
    from rumourstance import features

    features._warn_absent.__defaults__[0].clear()
    affective_features(tokenize("horrible"), _mini_registry())
    assert "emosn" in caplog.text and "anew" in caplog.text


def test_dialogue_act_examples():
    liwc = _mini_registry()["liwc"]
    vals = dict(zip(DIALOGUE_ACT, dialogue_act_features(tokenize("yes because"), liwc)))
    assert vals["liwc_assent"] == 1 and vals["liwc_cause"] == 1
    assert sum(vals.values()) == 2
    assert dialogue_act_features(tokenize(""), liwc) == [0.0] * 11
    vals = dict(zip(DIALOGUE_ACT, dialogue_act_features(tokenize("cannot"), liwc)))
    assert vals["liwc_negate"] == 1


def test_config_dimensions():
    dims = {name: CONFIGS[name].dimension for name in ABLATION_CONFIGS}
    assert dims == {"A": 6, "B": 3, "C": 24, "D": 11, "E": 9, "F": 30, "G": 17, "H": 33,
                    "I": 20, "J": 41, "K": 44}
    assert CONFIGS["BEST17"].dimension == 17
    assert CONFIGS["BEST17"].schema[9:] == ("emolex_fear", "emolex_negative", "dal_activation",
                                            "anew_dominance", "liwc_assent", "liwc_certain",
                                            "liwc_cause", "liwc_sad")
    assert CONFIGS["BEST17"].resources == ("emolex", "dal", "anew", "liwc")
    assert CONFIGS["A"].resources == ()
    assert get_config("best17") is CONFIGS["BEST17"]
    with pytest.raises(FeatureError):
        get_config("Z")


def test_extract_schema(small_thread, registry):
    for name, cfg in CONFIGS.items():
        vec = extract(small_thread.tweets["r2"], small_thread, registry, cfg)
        assert vec.schema == cfg.schema
        assert len(vec.values) == cfg.dimension


def test_build_matrix_deterministic(splits, registry):
    train = splits[0]
    for name in ("A", "E", "K", "BEST17"):
        cfg = CONFIGS[name]
        X1, y1, ids1 = build_matrix(train, registry, cfg)
        X2, y2, ids2 = build_matrix(train, registry, cfg)
        assert X1.shape == (len(train.instances()), cfg.dimension)
        assert np.array_equal(X1, X2) and y1 == y2 and ids1 == ids2


def test_validate_registry(registry):
    assert validate_registry(registry, CONFIGS["K"]) == []
    empty = LexiconRegistry()
    assert validate_registry(empty, CONFIGS["E"]) == []
    with pytest.raises(FeatureError, match="liwc"):
        validate_registry(empty, CONFIGS["D"])
    assert validate_registry(empty, CONFIGS["D"], allow_missing=True) == ["liwc"]
    partial = WildcardDictionary("liwc", [("yes", frozenset({"1"}))], {"1": "assent"})
    with pytest.raises(FeatureError, match="lacks"):
        validate_registry(LexiconRegistry({"liwc": partial}), CONFIGS["D"])


def test_scaler_examples():
    s = Scaler.fit(np.array([[1.0], [3.0]]), ["a"])
    assert s.transform(np.array([[1.0], [3.0]])).ravel().tolist() == [-1.0, 1.0]
    s = Scaler.fit(np.array([[4.0, 1.0], [4.0, 2.0]]), ["c", "v"])
    assert s.constant.tolist() == [True, False]
    assert s.transform(np.array([[4.0, 1.0], [7.0, 0.0]]))[:, 0].tolist() == [0.0, 0.0]


def test_scaler_vectors():
    vecs = [FeatureVector(np.array([1.0, 5.0]), ("a", "b")),
            FeatureVector(np.array([3.0, 5.0]), ("a", "b"))]
    s = fit_scaler(vecs)
    assert apply_scaler(s, vecs[0]).values.tolist() == [-1.0, 0.0]
    with pytest.raises(FeatureError):
        apply_scaler(s, FeatureVector(np.array([1.0, 2.0]), ("a", "c")))
    with pytest.raises(FeatureError):
        fit_scaler([vecs[0], FeatureVector(np.array([1.0]), ("a",))])
    with pytest.raises(FeatureError):
        fit_scaler([])


@given(arrays(np.float64, st.tuples(st.integers(2, 30), st.integers(1, 6)),
              elements=st.floats(-1e4, 1e4, allow_nan=False)))
def test_scaled_columns_standardised(X):
    s = Scaler.fit(X, [f"f{i}" for i in range(X.shape[1])])
    Z = s.transform(X)
    for k in range(X.shape[1]):
        if s.std[k] > 1e-6 * max(1.0, np.abs(X[:, k]).max()):
            assert abs(Z[:, k].mean()) < 1e-9
            assert abs(Z[:, k].std() - 1) < 1e-9
        elif s.std[k] == 0:
            assert np.all(Z[:, k] == 0)
