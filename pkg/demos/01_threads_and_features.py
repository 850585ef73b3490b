# %% [markdown]
# # Threads and features
#
# Build a tiny conversation by hand, look at its tree, then turn every tweet
# into the four feature groups. The bundled fixture lexicons stand in for the
# licensed resources.

# %%
from rumourstance.corpus import Tweet, build_thread, depth_of
from rumourstance.features import CONFIGS, extract
from rumourstance.lexicons import LexiconRegistry, fixture_directory
from rumourstance.textproc import tokenize

thread = build_thread([
    Tweet("1", "BREAKING: gunman still inside the building #ottawa http://t.co/x1", retweet_count=230),
    Tweet("2", "@news is this confirmed? any source??", in_reply_to="1"),
    Tweet("3", "@news fake, police said nothing like that", in_reply_to="1"),
    Tweet("4", "@anna yes, police confirmed it on tv", in_reply_to="2"),
], event="ottawashooting")

for tweet in thread.iter_tweets():
    print("  " * depth_of(thread, tweet.id) + f"{tweet.id}: {tweet.text}")

# %% [markdown]
# Tokenization lowercases, keeps hashtags and mentions as tokens, and counts
# URLs and question marks separately.

# %%
toks = tokenize(thread.tweets["2"].text)
print(toks.tokens, toks.question_marks, toks.urls)

# %%
registry = LexiconRegistry.from_directory(fixture_directory())
config = CONFIGS["BEST17"]
for tweet in thread.iter_tweets():
    vec = extract(tweet, thread, registry, config)
    row = {k: round(float(v), 3) for k, v in zip(vec.schema, vec.values) if v}
    print(tweet.id, row)

# %% [markdown]
# Every ablation set has a fixed width.

# %%
print({name: cfg.dimension for name, cfg in CONFIGS.items()})
