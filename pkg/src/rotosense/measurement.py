"""Optimal projector basis and the induced multinomial statistics.

For an anti-coherent probe phi0, the basis {phi0, J_1 phi0, J_2 phi0,
J_3 phi0} (normalized) is orthonormal and, measured after a small rotation,
yields outcome probabilities whose classical Fisher information saturates
the quantum bound.  The remaining 2J-3 dimensions are lumped into a single
rest outcome; their weight is third order in the rotation angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metrology import anticoherence_report, qfi_matrix
from .spin_core import RotationParams, SpinState, rotation_unitary, spin_operators

FD_STEP = 1e-5  # central-difference step for probability derivatives (radians)
_P_FLOOR = 1e-15  # outcomes below this are treated as exactly zero in Fisher sums


@dataclass(frozen=True)
class ProjectorBasis:
    """Ordered orthonormal measurement states [psi0, psi1, psi2, psi3]."""

    states: tuple
    J: float


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities [P0, P1, P2, P3, Prest] for given rotation parameters."""

    p: np.ndarray
    params: RotationParams

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).copy()
        if p.size != 5:
            raise ValueError("expected five outcome categories")
        if p.min() < -1e-12 or p.max() > 1.0 + 1e-12:
            raise ValueError("probabilities out of range")
        total = p.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, not 1")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def to_json_dict(self) -> dict:
        return {
            "theta1": self.params.theta1,
            "theta2": self.params.theta2,
            "theta3": self.params.theta3,
            "p": list(self.p),
        }


def optimal_basis(phi0: SpinState, tol: float = 1e-10) -> ProjectorBasis:
    """Measurement basis [phi0, J_i phi0 / sqrt(J(J+1)/3)].

    Requires a second-order anti-coherent phi0; otherwise the J_i phi0 are
    not orthogonal and no valid projector set exists.
    """
    report = anticoherence_report(phi0, tol)
    if not report.passed:
        raise ValueError(
            "optimal_basis requires a second-order anti-coherent state "
            f"(max deviations: mean {report.max_mean_abs:.3g}, "
            f"diag {report.max_diagonal_dev:.3g}, offdiag {report.max_offdiagonal_abs:.3g})"
        )
    scale = math.sqrt(phi0.J * (phi0.J + 1) / 3.0)
    states = [phi0]
    for op in spin_operators(phi0.J):
        states.append(SpinState.normalized(phi0.J, op @ phi0.amps / scale))
    return ProjectorBasis(states=tuple(states), J=phi0.J)


def exact_probabilities(
    phi0: SpinState, basis: ProjectorBasis, params: RotationParams
) -> OutcomeDistribution:
    """P_mu = |<psi_mu| exp(-i theta1 u.J) |phi0>|^2 with the rest aggregated."""
    if basis.J != phi0.J:
        raise ValueError("basis and state belong to different spin sectors")
    rotated = rotation_unitary(phi0.J, params) @ phi0.amps
    p = np.array([abs(np.vdot(s.amps, rotated)) ** 2 for s in basis.states])
    rest = 1.0 - p.sum()
    return OutcomeDistribution(np.append(p, max(0.0, rest)), params)


def small_angle_probabilities(j, theta1: float, u) -> OutcomeDistribution:
    """Second-order expansion P0 = 1 - theta1^2 J(J+1)/3, P_i = theta1^2 u_i^2 J(J+1)/3."""
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise ValueError("u must be a unit 3-vector")
    jj = float(j) * (float(j) + 1.0) / 3.0
    leak = theta1**2 * jj
    if leak > 1.0:
        raise ValueError(
            f"theta1={theta1} outside the small-angle validity range "
            f"(theta1^2 J(J+1)/3 = {leak:.3g} > 1)"
        )
    p = np.array([1.0 - leak, *(leak * u**2), 0.0])
    return OutcomeDistribution(p, RotationParams.from_axis(theta1, u))


def classical_fisher(
    phi0: SpinState,
    basis: ProjectorBasis,
    params: RotationParams,
    which: int,
    step: float = FD_STEP,
) -> float:
    """Multinomial Fisher information sum_mu (dP_mu/dtheta_k)^2 / P_mu.

    Derivatives are central finite differences of the exact probabilities;
    outcomes with P_mu below the floor contribute zero (their probability
    and derivative vanish together).
    """
    if which not in (1, 2, 3):
        raise ValueError("which must be 1, 2 or 3")
    name = f"theta{which}"
    center = exact_probabilities(phi0, basis, params).p
    plus = exact_probabilities(
        phi0, basis, params.replace(**{name: getattr(params, name) + step})
    ).p
    minus = exact_probabilities(
        phi0, basis, params.replace(**{name: getattr(params, name) - step})
    ).p
    deriv = (plus - minus) / (2.0 * step)
    mask = center > _P_FLOOR
    return float(np.sum(deriv[mask] ** 2 / center[mask]))


@dataclass(frozen=True)
class SaturationReport:
    """Classical Fisher information F(theta_k) against the quantum matrix diagonal."""

    fisher: np.ndarray  # F(theta_k), k = 1, 2, 3
    qfi_diag: np.ndarray  # Q_kk
    relative_dev: tuple  # F/Q - 1, or None where Q_kk vanishes

    def to_dict(self) -> dict:
        return {
            "fisher": list(self.fisher),
            "qfi_diag": list(self.qfi_diag),
            "relative_dev": list(self.relative_dev),
        }


def multiparam_saturation_check(phi0: SpinState, params: RotationParams) -> SaturationReport:
    """Compare F(theta_k) with Q_kk for k = 1, 2, 3 at the given parameters.

    Meaningful for small theta1 with sin(theta1) != 0; at theta2 in {0, pi}
    the azimuth generator vanishes and Q_33 = 0 is reported with a None
    deviation rather than an error.
    """
    basis = optimal_basis(phi0)
    fisher = np.array([classical_fisher(phi0, basis, params, k) for k in (1, 2, 3)])
    q = qfi_matrix(phi0, params)
    qdiag = np.diag(q).copy()
    rel = tuple(
        (float(f / qk - 1.0) if qk > 1e-12 else None) for f, qk in zip(fisher, qdiag)
    )
    return SaturationReport(fisher=fisher, qfi_diag=qdiag, relative_dev=rel)
