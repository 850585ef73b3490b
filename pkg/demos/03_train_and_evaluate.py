# %% [markdown]
# # Training and evaluating a stance model
#
# Synthetic threads mimic the shape and class balance of the real corpus
# (mostly comments, few denials). We train the 17-feature configuration with
# an RBF kernel and print the confusion matrix.

# %%
from rumourstance.evaluation import train_and_evaluate
from rumourstance.features import CONFIGS
from rumourstance.lexicons import LexiconRegistry, fixture_directory
from rumourstance.corpus import class_counts
from rumourstance.svm import TrainParams
from rumourstance.synthetic import make_splits

train, dev, test = make_splits(seed=0)
registry = LexiconRegistry.from_directory(fixture_directory())
print({k.value: v for k, v in class_counts(train).items()})

# %%
report = train_and_evaluate(train, test, registry, CONFIGS["BEST17"], TrainParams())
print(report.format())

# %% [markdown]
# Class weighting trades comment precision for recall on the rare classes.

# %%
weighted = train_and_evaluate(train, test, registry, CONFIGS["BEST17"],
                              TrainParams(class_weights="balanced"))
print(f"macro F1 unweighted {report.macro_f1:.3f}, balanced weights {weighted.macro_f1:.3f}")
