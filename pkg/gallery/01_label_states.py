# Label states and the Bloch picture
#
# A single qubit has room for only a few well separated classes. Two classes
# sit on the poles of the Bloch sphere; three classes are spread 120 degrees
# apart on a great circle through |0>. Classification picks the label state
# with the largest fidelity (1 + s.r) / 2 to the output Bloch vector r.

import numpy as np

from uqc import qmath
from uqc.model import classify_bloch, label_states

for c in (2, 3):
    labels = label_states(c)
    print(f"{c} classes")
    for i, (psi, s) in enumerate(zip(labels, labels.bloch)):
        print(f"  |Y{i}> = {np.round(psi, 4)}   bloch = {np.round(s, 4)}")
    fids = [[qmath.overlap_fidelity(a, b) for b in labels] for a in labels]
    print("  pairwise fidelities\n", np.round(fids, 6))

# Any state in the northern hemisphere is class 0 in the binary case, however
# far it leans towards the equator.

labels = label_states(2)
for polar in (0.1, 1.0, 1.5, 1.6, 3.0):
    r = np.array([np.sin(polar), 0.0, np.cos(polar)])
    print(f"polar angle {polar:.1f} -> class {int(classify_bloch(r, labels))}")

# The three-class decision regions are 120 degree sectors in the X-Z plane.
# Points exactly between two sectors go to the lower class index.

labels = label_states(3)
for deg in range(0, 360, 30):
    t = np.radians(deg)
    r = np.array([np.sin(t), 0.0, np.cos(t)])
    print(f"{deg:3d} deg -> class {int(classify_bloch(r, labels))}")
