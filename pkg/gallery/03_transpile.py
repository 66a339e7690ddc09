# Condensing a trained circuit into three native rotations
#
# For a fixed input point every layer is a known 2x2 unitary, so the whole
# circuit multiplies out to one unitary. Any single-qubit unitary equals
# RX(a) RY(b) RX(c) up to a global phase, and that is all the device runs.

import numpy as np

from uqc import qmath
from uqc.model import forward_state, random_params
from uqc.transpiler import compile_point, decompose_xyx, reconstruction_error, serialize

params = random_params(num_layers=10, num_classes=3, seed=1)
x = [0.25, -0.5]

prog = compile_point(params, x, basis="Z", shots=100, model_id="demo")
print(serialize(prog))

# The compiled program leaves |0> in the same state as the 10 layers, up to
# a phase, which the Bloch vector does not see.

print("layered  :", np.round(qmath.bloch_of(forward_state(params, x)), 12))
print("compiled :", np.round(qmath.bloch_of(prog.unitary()[:, 0]), 12))

# The X-basis program appends RY(-pi/2), which rotates the Bloch x axis onto z.

prog_x = compile_point(params, x, basis="X")
print("X basis gates:", prog_x.gates)

# The decomposition is exact: here is the worst error over random unitaries.

rng = np.random.default_rng(0)
worst = max(reconstruction_error(u, decompose_xyx(u)) for u in qmath.random_su2(rng, 2000))
print(f"worst reconstruction error over 2000 random unitaries: {worst:.1e}")

# Near b = 0 the two X rotations commute and only their sum matters, so c is
# set to 0 and the whole rotation goes into a.

print(decompose_xyx(qmath.rx(0.3) @ qmath.rx(0.4)))
