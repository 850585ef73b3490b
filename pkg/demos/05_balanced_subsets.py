# %% [markdown]
# # Balanced subsets
#
# Drawing the same number of instances per class removes the comment
# majority. Accuracy drops, but denials finally get predicted.

# %%
from rumourstance.corpus import balanced_subset, class_counts
from rumourstance.evaluation import run_balanced
from rumourstance.features import CONFIGS
from rumourstance.lexicons import LexiconRegistry, fixture_directory
from rumourstance.synthetic import make_dataset

registry = LexiconRegistry.from_directory(fixture_directory())
train = make_dataset(120, seed=5)
test = make_dataset(40, seed=6, split="test", id_offset=5_000_000)
n_train = min(class_counts(train).values())
n_test = min(class_counts(test).values())
print("per class:", n_train, "train /", n_test, "test")
print({k.value: v for k, v in class_counts(balanced_subset(train, n_train, seed=42)).items()})

# %%
report = run_balanced(train, test, registry, CONFIGS["BEST17"], seed=42,
                      train_per_class=n_train, test_per_class=n_test)
print(report.format())
