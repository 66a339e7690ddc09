# From counts to labels: shot noise and a toy device
#
# On hardware the final state is only seen through measurement counts. The
# binary problems need one Z measurement; three classes also need X. The
# sampler backend draws binomial counts, optionally after shrinking the Bloch
# vector (depolarizing) and flipping readout bits.

import numpy as np

from uqc import data, trainer
from uqc.backend import NoiseModel, SamplerBackend, default_noise, infer_dataset
from uqc.model import classify_exact

train_set = data.generate("sine", 1000, seed=7)
test_set = data.generate("sine", 2000, seed=8)
infer_set = data.generate("sine", 200, seed=9)
params, _ = trainer.train(train_set, test_set, 6, init_seed=1, tcfg=trainer.TrainConfig(shuffle_seed=1))

exact_labels = classify_exact(params, infer_set.points)
print("exact accuracy:", np.mean(exact_labels == infer_set.labels))

# With no noise, shot noise alone only matters for points whose z component is
# within a few 1/sqrt(shots) of the equator.

for shots in (10, 100, 1000, 100_000):
    res = infer_dataset(params, infer_set.points, backend=SamplerBackend(0), shots=shots)
    print(f"{shots:6d} shots: {res.total_measurements} measurements, "
          f"agreement with exact labels {np.mean(res.labels == exact_labels):.3f}")

# Depolarizing noise pulls every estimate towards the centre of the sphere.
# At p = 1 every outcome is a coin flip.

for p in (0.0, 0.3, 0.6, 0.9, 1.0):
    be = lambda s: SamplerBackend(s, NoiseModel(depolarizing_p=p))
    accs = [np.mean(infer_dataset(params, infer_set.points, backend=be(s)).labels
                    == infer_set.labels) for s in range(10)]
    print(f"depolarizing {p:.1f}: mean accuracy {np.mean(accs):.3f}")

print("packaged noise model:", default_noise())
