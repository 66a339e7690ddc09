"""Single-qubit linear algebra on plain numpy arrays.

Unitaries are complex arrays of shape ``(..., 2, 2)``, pure states complex
arrays of shape ``(..., 2)`` and Bloch vectors real arrays of shape
``(..., 3)``. Every constructor broadcasts over a leading batch of angles so
that a whole dataset can be pushed through a circuit in one call.

Rotations follow the half-angle convention ``R_A(t) = exp(-i t A / 2)``.
"""

from __future__ import annotations

import numpy as np

# Tolerances used throughout the package.
ALGEBRAIC_TOL = 1e-12
GEOMETRIC_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def _half(theta):
    t = np.asarray(theta, dtype=float) / 2.0
    return np.cos(t), np.sin(t)


def rx(theta) -> np.ndarray:
    """Rotation about the X axis, ``exp(-i theta X / 2)``."""
    c, s = _half(theta)
    out = np.empty(c.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -1j * s
    out[..., 1, 0] = -1j * s
    out[..., 1, 1] = c
    return out


def ry(theta) -> np.ndarray:
    """Rotation about the Y axis, ``exp(-i theta Y / 2)``. Entries are real."""
    c, s = _half(theta)
    out = np.empty(c.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def rz(theta) -> np.ndarray:
    """Rotation about the Z axis, ``exp(-i theta Z / 2)``."""
    t = np.asarray(theta, dtype=float) / 2.0
    out = np.zeros(t.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-1j * t)
    out[..., 1, 1] = np.exp(1j * t)
    return out


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product ``a @ b`` with broadcasting over leading axes."""
    return np.matmul(a, b)


def dagger(u: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(u, -1, -2))


def apply(u: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Apply unitary ``u`` to state ``psi``."""
    return np.einsum("...ij,...j->...i", u, psi)


def unitarity_error(u: np.ndarray) -> np.ndarray:
    """Frobenius norm of ``u^dagger u - I``."""
    d = np.matmul(dagger(u), u) - I2
    return np.sqrt(np.sum(np.abs(d) ** 2, axis=(-2, -1)))


def is_unitary(u: np.ndarray, tol: float = ALGEBRAIC_TOL) -> bool:
    u = np.asarray(u)
    if u.shape[-2:] != (2, 2) or not np.all(np.isfinite(u)):
        return False
    return bool(np.all(unitarity_error(u) <= tol))


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi, axis=-1, keepdims=True)


def bloch_of(psi: np.ndarray) -> np.ndarray:
    """Bloch vector ``(<X>, <Y>, <Z>)`` of a pure state.

    For ``psi = (a0, a1)`` this is ``(2 Re(conj(a0) a1), 2 Im(conj(a0) a1),
    |a0|^2 - |a1|^2)``, so ``|+>`` maps to ``+x`` and ``|+i>`` to ``+y``.
    """
    psi = np.asarray(psi, dtype=complex)
    a0 = psi[..., 0]
    a1 = psi[..., 1]
    cross = np.conj(a0) * a1
    return np.stack(
        [2.0 * cross.real, 2.0 * cross.imag, np.abs(a0) ** 2 - np.abs(a1) ** 2],
        axis=-1,
    )


def state_from_bloch(r) -> np.ndarray:
    """A pure state whose Bloch vector is the unit vector ``r``.

    The global phase is fixed by making the ``|0>`` amplitude real and
    non-negative.
    """
    r = np.asarray(r, dtype=float)
    polar = np.arccos(np.clip(r[..., 2], -1.0, 1.0))
    azimuth = np.arctan2(r[..., 1], r[..., 0])
    return np.stack(
        [np.cos(polar / 2) + 0j, np.exp(1j * azimuth) * np.sin(polar / 2)], axis=-1
    )


def fidelity(label: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Fidelity ``<label| rho |label>`` of a pure label state with the
    (possibly mixed) state whose Bloch vector is ``r``.

    Equals ``(1 + s . r) / 2`` with ``s`` the Bloch vector of ``label``.
    """
    s = bloch_of(label)
    return 0.5 * (1.0 + np.sum(s * np.asarray(r, dtype=float), axis=-1))


def overlap_fidelity(phi: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """``|<phi|psi>|^2`` for pure states."""
    return np.abs(np.sum(np.conj(phi) * psi, axis=-1)) ** 2


def rotation_so3(u: np.ndarray) -> np.ndarray:
    """The 3x3 rotation ``R`` with ``bloch_of(u psi) = R bloch_of(psi)``.

    ``R_ij = tr(sigma_i u sigma_j u^dagger) / 2``.
    """
    paulis = (PAULI_X, PAULI_Y, PAULI_Z)
    ud = dagger(u)
    out = np.empty(np.shape(u)[:-2] + (3, 3))
    for i, si in enumerate(paulis):
        for j, sj in enumerate(paulis):
            prod = si @ u @ sj @ ud
            out[..., i, j] = 0.5 * np.trace(prod, axis1=-2, axis2=-1).real
    return out


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = GEOMETRIC_TOL) -> bool:
    """True if ``a = exp(i g) b`` for some real ``g`` (states or matrices)."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    inner = np.vdot(b, a)
    if abs(inner) < tol:
        return bool(np.linalg.norm(a) < tol and np.linalg.norm(b) < tol)
    phase = inner / abs(inner)
    return bool(np.linalg.norm(a - phase * b) <= tol)


def random_su2(rng: np.random.Generator, size=None) -> np.ndarray:
    """Haar-random SU(2) matrices from uniformly distributed unit quaternions."""
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    q = rng.normal(size=shape + (4,))
    q /= np.linalg.norm(q, axis=-1, keepdims=True)
    a = q[..., 0] + 1j * q[..., 3]
    b = q[..., 2] + 1j * q[..., 1]
    out = np.empty(shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = -np.conj(b)
    out[..., 1, 0] = b
    out[..., 1, 1] = np.conj(a)
    return out


def random_state(rng: np.random.Generator, size=None) -> np.ndarray:
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    z = rng.normal(size=shape + (2,)) + 1j * rng.normal(size=shape + (2,))
    return normalize(z)
