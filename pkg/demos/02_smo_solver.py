# %% [markdown]
# # The SMO solver on a toy problem
#
# XOR is not linearly separable, so a linear kernel fails and an RBF kernel
# separates it. The callback shows the dual objective rising at each step.

# %%
import numpy as np

from rumourstance.svm import KernelSpec, TrainParams, train_binary

X = np.array([[0, 0], [1, 1], [0, 1], [1, 0]], dtype=float)
y = np.array([1, 1, -1, -1])

for kind in ("linear", "rbf"):
    trace = []
    model = train_binary(X, y, TrainParams(C=10, kernel=KernelSpec(kind, gamma=1.0)),
                         callback=lambda it, obj: trace.append(obj))
    pred = np.sign(model.decision_function(X)).astype(int)
    print(f"{kind:6s} predictions {pred.tolist()} after {model.n_iter} steps,"
          f" objective {trace[0]:.3f} -> {trace[-1]:.3f}")

# %% [markdown]
# The dual variables respect the box and the equality constraint.

# %%
print("support vectors:", len(model.dual_coef), " sum(a*y) =", model.dual_coef.sum())
