"""Closed-form solvability certificate.

gamma(lambda0) = 1 - kappa^2/(4 lambda0^2) controls every constant; the
certificate is the contraction sum q = sum_j c_j(kappa) ||A_j A^{-j}|| and
the verdict is CERTIFIED exactly when the weight is admissible and q < 1.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InadmissibleWeight
from .operators import OperatorModel, PerturbationSet, zero_perturbations


class Verdict(str, Enum):
    CERTIFIED = "REGULARLY_SOLVABLE_CERTIFIED"
    UNCERTIFIED = "UNCERTIFIED"
    INADMISSIBLE = "INADMISSIBLE_WEIGHT"


@dataclass(frozen=True)
class SolvabilityCertificate:
    kappa: float
    lambda0: float
    gamma: float
    c: tuple  # (c_1, c_2, c_3, c_4) or None when inadmissible
    beta: tuple  # (beta_1, .., beta_4)
    q: float  # math.inf when inadmissible
    admissible: bool
    verdict: Verdict

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "lambda0": self.lambda0,
            "gamma": self.gamma,
            "constants": None if self.c is None else list(self.c),
            "beta": list(self.beta),
            "q": self.q,
            "admissible": self.admissible,
            "verdict": self.verdict.value,
        }


def gamma(lambda0: float, kappa: float) -> float:
    """1 - kappa^2 / (4 lambda0^2); positive iff |kappa| < 2 lambda0."""
    if lambda0 <= 0:
        raise ValueError("lambda0 must be positive")
    return 1.0 - kappa ** 2 / (4.0 * lambda0 ** 2)


def constants(lambda0: float, kappa: float):
    """(c_1, c_2, c_3, c_4) = (g^-1/2 / 2, g^-1/2 / (2 sqrt 2), g^-1/2 / 2, g^-1)."""
    g = gamma(lambda0, kappa)
    if g <= 0:
        raise InadmissibleWeight(
            f"|kappa|={abs(kappa):.6g} >= 2*lambda0={2 * lambda0:.6g}")
    root = 1.0 / math.sqrt(g)
    return (0.5 * root, root / (2.0 * math.sqrt(2.0)), 0.5 * root, 1.0 / g)


def certify(A: OperatorModel, P: PerturbationSet, kappa: float) -> SolvabilityCertificate:
    """Evaluate the sufficient condition; never raises, all cases map to verdicts."""
    lam0 = A.lambda0
    g = gamma(lam0, kappa)
    beta = tuple(float(b) for b in P.beta)
    if abs(kappa) >= 2.0 * lam0:
        return SolvabilityCertificate(
            kappa=kappa, lambda0=lam0, gamma=g, c=None, beta=beta,
            q=math.inf, admissible=False, verdict=Verdict.INADMISSIBLE)
    c = constants(lam0, kappa)
    q = float(np.dot(c, beta))
    verdict = Verdict.CERTIFIED if q < 1.0 else Verdict.UNCERTIFIED
    return SolvabilityCertificate(
        kappa=kappa, lambda0=lam0, gamma=g, c=c, beta=beta,
        q=q, admissible=True, verdict=verdict)


def critical_sweep(A: OperatorModel, kappa_values, P: PerturbationSet = None):
    """Tabulate (kappa, gamma, c4, verdict) rows over a weight range.

    c4 = gamma^-1 blows up as |kappa| -> 2 lambda0, the numerical signature
    of the lost invertibility at the critical weights; rows at or beyond the
    critical weight are flagged INADMISSIBLE_WEIGHT.
    """
    if P is None:
        P = zero_perturbations(A)
    rows = []
    for kappa in kappa_values:
        cert = certify(A, P, float(kappa))
        c4 = None if cert.c is None else cert.c[3]
        rows.append({
            "kappa": float(kappa),
            "gamma": cert.gamma,
            "c4": c4,
            "verdict": cert.verdict.value,
            "q": None if not cert.admissible else cert.q,
            "constants": None if cert.c is None else list(cert.c),
        })
    return rows
