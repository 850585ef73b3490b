# %% [markdown]
# # Ablation over feature sets, then a hyper-parameter grid
#
# The ablation keeps the classifier fixed and swaps feature groups. The grid
# search then scores C, kernel and class weighting on the dev split. Only a
# slice of the 56-cell grid is run here to keep the demo quick.

# %%
from rumourstance.evaluation import format_ablation, grid_params, grid_search, run_ablation
from rumourstance.features import CONFIGS
from rumourstance.lexicons import LexiconRegistry, fixture_directory
from rumourstance.synthetic import make_splits

train, dev, test = make_splits(seed=1)
registry = LexiconRegistry.from_directory(fixture_directory())
print(format_ablation(run_ablation(train, test, registry)))

# %%
candidates = [p for p in grid_params() if p.C in (0.1, 1.0, 10.0) and p.kernel.kind in ("rbf", "linear")]
result = grid_search(train, dev, registry, CONFIGS["BEST17"], candidates=candidates)
print(result.format())

# %% [markdown]
# Without any lexicons only the structural and conversational rows can run;
# the others are reported as skipped instead of being filled with zeros.

# %%
print(format_ablation(run_ablation(train, test, LexiconRegistry())))
