"""Finite-dimensional model of the operator A and the perturbation coefficients.

The state space H is R^n with the euclidean inner product.  A is self-adjoint
and positive definite, held as an eigendecomposition computed once at
construction; every piece of spectral calculus (fractional powers, the
semigroup e^{-tA}, resolvents) routes through it.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NegativeTime, NotPositiveDefinite, NotSymmetric

SYMMETRY_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-12


@dataclass(frozen=True)
class OperatorModel:
    """Self-adjoint positive definite operator, diagonalized.

    eigenvalues are sorted ascending; columns of eigenbasis are the
    corresponding orthonormal eigenvectors; matrix is Q diag(lam) Q^T.
    """

    n: int
    eigenvalues: np.ndarray
    eigenbasis: np.ndarray
    matrix: np.ndarray = field(repr=False)

    @property
    def lambda0(self) -> float:
        """Lower edge of the spectrum."""
        return float(self.eigenvalues[0])


@dataclass(frozen=True)
class PerturbationSet:
    """Coefficients A_1..A_4 together with their normalized forms B_j = A_j A^{-j}.

    beta[j-1] is the spectral norm of B_j; these are the only quantities the
    solvability condition ever consumes.
    """

    operator: OperatorModel
    matrices: tuple  # (A_1, A_2, A_3, A_4)
    normalized: tuple  # (B_1, B_2, B_3, B_4)
    beta: np.ndarray  # shape (4,)

    def is_zero(self) -> bool:
        return bool(np.all(self.beta == 0.0))


def make_operator(matrix) -> OperatorModel:
    """Build an OperatorModel from a dense symmetric positive definite matrix."""
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    asym = np.abs(M - M.T).max()
    if asym > SYMMETRY_TOL:
        raise NotSymmetric(f"matrix asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.0e}")
    eigenvalues, Q = np.linalg.eigh(0.5 * (M + M.T))
    if eigenvalues[0] <= 0.0:
        raise NotPositiveDefinite(f"smallest eigenvalue {eigenvalues[0]:.3e} is not > 0")
    return OperatorModel(
        n=M.shape[0],
        eigenvalues=eigenvalues,
        eigenbasis=Q,
        matrix=Q @ np.diag(eigenvalues) @ Q.T,
    )


def operator_from_spectrum(eigenvalues, eigenbasis=None) -> OperatorModel:
    """Build an OperatorModel directly from eigenvalues (and optional basis)."""
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    n = lam.size
    if lam[0] <= 0.0:
        raise NotPositiveDefinite(f"smallest eigenvalue {lam[0]:.3e} is not > 0")
    if eigenbasis is None:
        Q = np.eye(n)
    else:
        Q = np.asarray(eigenbasis, dtype=float)
        if Q.shape != (n, n):
            raise DimensionMismatch(f"eigenbasis shape {Q.shape} does not match n={n}")
        if np.abs(Q.T @ Q - np.eye(n)).max() > 1e-8:
            raise NotSymmetric("eigenbasis columns are not orthonormal")
    return OperatorModel(n=n, eigenvalues=lam, eigenbasis=Q, matrix=Q @ np.diag(lam) @ Q.T)


def frac_power(A: OperatorModel, s: float) -> np.ndarray:
    """A^s as a dense matrix, any real s (A is positive definite)."""
    return A.eigenbasis @ np.diag(A.eigenvalues ** s) @ A.eigenbasis.T


def semigroup_apply(A: OperatorModel, t: float, phi) -> np.ndarray:
    """e^{-tA} phi for t >= 0."""
    if t < 0:
        raise NegativeTime(f"semigroup time t={t} must be nonnegative")
    phi = np.asarray(phi, dtype=float)
    if phi.shape[-1] != A.n:
        raise DimensionMismatch(f"vector length {phi.shape[-1]} != n={A.n}")
    coeff = phi @ A.eigenbasis
    return (coeff * np.exp(-A.eigenvalues * t)) @ A.eigenbasis.T


def op_norm(M) -> float:
    """Spectral norm (largest singular value)."""
    M = np.asarray(M, dtype=float)
    if M.size == 0 or not M.any():
        return 0.0
    return float(np.linalg.norm(M, 2))


def make_perturbations(A: OperatorModel, matrices, normalized=False) -> PerturbationSet:
    """Bundle the four coefficients A_1..A_4.

    matrices is a sequence of four n x n arrays (entries may be None for
    zero).  With normalized=True the inputs are taken to be B_j = A_j A^{-j}
    directly and A_j = B_j A^j is reconstructed.
    """
    if len(matrices) != 4:
        raise DimensionMismatch(f"expected 4 coefficient matrices, got {len(matrices)}")
    raw = []
    for j, M in enumerate(matrices, start=1):
        if M is None:
            raw.append(np.zeros((A.n, A.n)))
            continue
        M = np.asarray(M, dtype=float)
        if M.shape != (A.n, A.n):
            raise DimensionMismatch(f"coefficient {j} has shape {M.shape}, expected {(A.n, A.n)}")
        raw.append(M)
    if normalized:
        B = tuple(raw)
        As = tuple(B[j] @ frac_power(A, j + 1) for j in range(4))
    else:
        As = tuple(raw)
        B = tuple(As[j] @ frac_power(A, -(j + 1)) for j in range(4))
    beta = np.array([op_norm(Bj) for Bj in B])
    return PerturbationSet(operator=A, matrices=As, normalized=B, beta=beta)


def zero_perturbations(A: OperatorModel) -> PerturbationSet:
    return make_perturbations(A, [None, None, None, None])
