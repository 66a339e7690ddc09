"""Single-qubit data re-uploading classifier: training on an exact simulator,
condensation to one RX-RY-RX program per point, and exact or shot-sampled
inference."""

__version__ = "0.1.0"

from .backend import (  # noqa: E402
    Counts,
    ExactBackend,
    NoiseModel,
    SamplerBackend,
    classify_from_counts,
    estimate_bloch,
    infer_dataset,
    run_program,
)
from .data import Dataset, Problem, generate, label_of, load_csv, save_csv  # noqa: E402
from .model import (  # noqa: E402
    LabelSet,
    LayerParams,
    UqcParams,
    classify_exact,
    forward_state,
    label_states,
    layer_unitary,
    model_unitary,
)
from .trainer import AdamConfig, TrainConfig, cost, evaluate_accuracy, grad, train  # noqa: E402
from .transpiler import NativeProgram, compile_point, decompose_xyx  # noqa: E402
