"""Exact spin-J algebra on small dense complex matrices.

Conventions used throughout the package:

* ``|J, m>`` amplitudes are stored in descending-m order, so index ``k``
  holds ``m = J - k``.
* Collective rotations are ``exp(-i * theta1 * u . J)`` with spin operators
  normalized so that ``[Jx, Jy] = i Jz``.  Per photon this is the half-angle
  rotation ``exp(-i * (theta1/2) * u . sigma)``; writing the exponent with
  bare Pauli matrices (no 1/2) would double every rotation angle and
  quadruple the Fisher information, so the half convention is load-bearing.
* In the qubit picture qubit 0 is the most significant bit and
  ``|H> -> |0>``, ``|V> -> |1>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Tolerances: plain operator algebra is good to 1e-12 in double precision at
# these dimensions; anything routed through a 2^N tensor product gets 1e-10.
ATOL_ALGEBRA = 1e-12
ATOL_CROSS_PICTURE = 1e-10

_NORM_SLACK = 1e-6  # constructor rejects inputs farther than this from unit norm


def _check_spin(j) -> int:
    """Validate a half-integer spin value, returning 2J as an int."""
    two_j = 2.0 * float(j)
    if two_j < 0 or abs(two_j - round(two_j)) > 1e-9:
        raise ValueError(f"J must be a non-negative half-integer, got {j}")
    return int(round(two_j))


def _normalized(amps: np.ndarray, forgiving: bool) -> np.ndarray:
    amps = np.asarray(amps, dtype=complex).reshape(-1).copy()
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise ValueError("state amplitudes are identically zero")
    if not forgiving and abs(norm - 1.0) > _NORM_SLACK:
        raise ValueError(f"state amplitudes are not normalized (norm={norm:.6g})")
    amps /= norm
    amps.setflags(write=False)
    return amps


@dataclass(frozen=True)
class SpinState:
    """Pure state of a spin-J system, amplitudes over |J,m> with m = J..-J."""

    J: float
    amps: np.ndarray

    def __post_init__(self):
        two_j = _check_spin(self.J)
        amps = _normalized(self.amps, forgiving=getattr(self, "_forgiving", False))
        if amps.size != two_j + 1:
            raise ValueError(f"expected {two_j + 1} amplitudes for J={self.J}, got {amps.size}")
        object.__setattr__(self, "J", two_j / 2.0)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, j, amps) -> "SpinState":
        """Construct from unnormalized amplitudes, rescaling to unit norm."""
        state = object.__new__(cls)
        object.__setattr__(state, "_forgiving", True)
        object.__setattr__(state, "J", j)
        object.__setattr__(state, "amps", amps)
        state.__post_init__()
        return state

    @classmethod
    def from_m_amplitudes(cls, j, components: dict) -> "SpinState":
        """Build a state from a {m: amplitude} mapping (other m are zero)."""
        two_j = _check_spin(j)
        # index of m in descending order: k = J - m
        amps = np.zeros(two_j + 1, dtype=complex)
        for m, amp in components.items():
            k = round(two_j / 2.0 - float(m))
            if not 0 <= k <= two_j or abs((two_j / 2.0 - float(m)) - k) > 1e-9:
                raise ValueError(f"m={m} is not a valid projection for J={j}")
            amps[k] = amp
        return cls.normalized(j, amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def m_values(self) -> np.ndarray:
        return self.J - np.arange(self.dim)

    def to_json_dict(self) -> dict:
        return {"J": self.J, "amps": [[z.real, z.imag] for z in self.amps]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "SpinState":
        amps = np.array([complex(re, im) for re, im in data["amps"]])
        return cls.normalized(data["J"], amps)


@dataclass(frozen=True)
class QubitState:
    """Pure state of an n-qubit register; qubit 0 is the most significant bit."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        n = int(self.n_qubits)
        if n < 1:
            raise ValueError("n_qubits must be a positive integer")
        amps = _normalized(self.amps, forgiving=getattr(self, "_forgiving", False))
        if amps.size != 2**n:
            raise ValueError(f"expected {2**n} amplitudes for {n} qubits, got {amps.size}")
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, n_qubits, amps) -> "QubitState":
        state = object.__new__(cls)
        object.__setattr__(state, "_forgiving", True)
        object.__setattr__(state, "n_qubits", n_qubits)
        object.__setattr__(state, "amps", amps)
        state.__post_init__()
        return state

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "QubitState":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    def to_json_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "amps": [[z.real, z.imag] for z in self.amps]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "QubitState":
        amps = np.array([complex(re, im) for re, im in data["amps"]])
        return cls.normalized(data["n_qubits"], amps)


@dataclass(frozen=True)
class RotationParams:
    """Rotation by theta1 about the axis with polar angle theta2, azimuth theta3."""

    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    @property
    def axis(self) -> np.ndarray:
        return axis_from_angles(self.theta2, self.theta3)

    @classmethod
    def from_axis(cls, theta1: float, u) -> "RotationParams":
        u = np.asarray(u, dtype=float)
        norm = np.linalg.norm(u)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("axis must be a unit vector")
        theta2 = math.acos(min(1.0, max(-1.0, u[2])))
        theta3 = math.atan2(u[1], u[0])
        return cls(theta1, theta2, theta3)

    def replace(self, **kwargs) -> "RotationParams":
        values = {"theta1": self.theta1, "theta2": self.theta2, "theta3": self.theta3}
        values.update(kwargs)
        return RotationParams(**values)


def axis_from_angles(theta2: float, theta3: float) -> np.ndarray:
    """Unit vector (sin t2 cos t3, sin t2 sin t3, cos t2)."""
    return np.array(
        [
            math.sin(theta2) * math.cos(theta3),
            math.sin(theta2) * math.sin(theta3),
            math.cos(theta2),
        ]
    )


@lru_cache(maxsize=None)
def _spin_operators_cached(two_j: int):
    dim = two_j + 1
    j = two_j / 2.0
    m = j - np.arange(dim)
    # raising operator: <m+1| J+ |m> = sqrt(J(J+1) - m(m+1)), m = J-1 .. -J
    up = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.zeros((dim, dim), dtype=complex)
    jp[np.arange(dim - 1), np.arange(1, dim)] = up
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = -0.5j * (jp - jm)
    jz = np.diag(m).astype(complex)
    for op in (jx, jy, jz):
        op.setflags(write=False)
    return jx, jy, jz


def spin_operators(j):
    """Spin matrices (Jx, Jy, Jz) in the (2J+1)-dimensional irrep."""
    return _spin_operators_cached(_check_spin(j))


def rotation_unitary(j, params: RotationParams) -> np.ndarray:
    """exp(-i * theta1 * u . J), computed by eigendecomposition of u . J."""
    jx, jy, jz = spin_operators(j)
    u = params.axis
    generator = u[0] * jx + u[1] * jy + u[2] * jz
    evals, evecs = np.linalg.eigh(generator)
    phases = np.exp(-1j * params.theta1 * evals)
    return (evecs * phases) @ evecs.conj().T


def matrix_exponential(a: np.ndarray) -> np.ndarray:
    """Dense matrix exponential for dimensions up to 128.

    Hermitian and skew-Hermitian inputs (the only ones arising from rotation
    generators) go through an exact eigendecomposition; anything else falls
    back to scaling-and-squaring with a truncated series.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix_exponential requires a square matrix")
    if a.shape[0] > 128:
        raise ValueError("matrix_exponential supports dimensions up to 128")
    if a.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)

    scale = max(1.0, float(np.linalg.norm(a)))
    if np.linalg.norm(a - a.conj().T) <= 1e-13 * scale:
        evals, evecs = np.linalg.eigh(a)
        return (evecs * np.exp(evals.real)) @ evecs.conj().T
    if np.linalg.norm(a + a.conj().T) <= 1e-13 * scale:
        evals, evecs = np.linalg.eigh(-1j * a)  # a = i * hermitian
        return (evecs * np.exp(1j * evals.real)) @ evecs.conj().T

    # scaling and squaring with a 30-term series on the scaled matrix
    norm = float(np.linalg.norm(a, ord=np.inf))
    squarings = max(0, int(math.ceil(math.log2(norm / 0.25))) if norm > 0.25 else 0)
    scaled = a / (2.0**squarings)
    result = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, 31):
        term = term @ scaled / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    counts = np.zeros(2**n, dtype=np.int64)
    for q in range(n):
        counts += (np.arange(2**n) >> q) & 1
    counts.setflags(write=False)
    return counts


def dicke_to_qubit(state: SpinState) -> QubitState:
    """Expand |J,m> into the symmetric N-qubit picture, N = 2J.

    |J,m> maps to the equal-amplitude superposition of all computational
    strings with exactly J - m ones (V photons).
    """
    n = _check_spin(state.J)
    if n < 1:
        raise ValueError("need at least one qubit (J >= 1/2)")
    ones = _popcounts(n)
    amps = np.zeros(2**n, dtype=complex)
    for k in range(n + 1):
        amps[ones == k] = state.amps[k] / math.sqrt(math.comb(n, k))
    return QubitState(n, amps)


def qubit_to_dicke(state: QubitState) -> tuple[SpinState, float]:
    """Project onto the maximal-J symmetric subspace.

    Returns the renormalized symmetric component and the squared weight lost
    to lower-J subspaces.  Raises if the state is orthogonal to the
    symmetric subspace.
    """
    n = state.n_qubits
    ones = _popcounts(n)
    comps = np.array(
        [state.amps[ones == k].sum() / math.sqrt(math.comb(n, k)) for k in range(n + 1)]
    )
    weight = float(np.sum(np.abs(comps) ** 2))
    lost = max(0.0, 1.0 - weight)
    if weight < 1e-12:
        raise ValueError("state has no component in the symmetric subspace")
    return SpinState.normalized(n / 2.0, comps), lost
