"""Run configuration shared by both approximation algorithms."""

import dataclasses
import logging

from .errors import InputError

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class ApproxConfig:
    """Tolerances, caps and seed for an approximation run.

    Attributes
    ----------
    epsilon : float
        Target truncated Hausdorff accuracy of the returned cone pair.
        Must be positive.
    tol_psd : float
        Slack for positive semidefiniteness checks (feasibility re-checks,
        strict interiority tests).
    tol_lin : float
        Slack for linear equation residuals in solver solutions.
    tol_gap : float
        Relative duality gap accepted for an Optimal status.
    tol_geom : float
        Combinatorial geometry tolerance (vertex identity, halfspace
        activity, deduplication).
    tol_qp : float
        Accuracy of point-to-polytope distance computations.
    tol_eig : float
        Accuracy demanded of eigenvalue computations.
    max_iterations : int
        Refinement-round cap (outer while loop / full passes).
    seed : int
        Seed for every random number stream a run may use.
    """

    epsilon: float = 0.1
    tol_psd: float = 1e-7
    tol_lin: float = 1e-7
    tol_gap: float = 1e-7
    tol_geom: float = 1e-8
    tol_qp: float = 1e-8
    tol_eig: float = 1e-9
    max_iterations: int = 200
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InputError(f"epsilon must be positive, got {self.epsilon}")
        for name in ("tol_psd", "tol_lin", "tol_gap", "tol_geom", "tol_qp", "tol_eig"):
            value = getattr(self, name)
            if not value >= 0:
                raise InputError(f"{name} must be nonnegative, got {value}")
            if value >= self.epsilon / 10:
                logger.warning(
                    "%s = %g is not below epsilon/10 = %g; certification may be "
                    "dominated by numerical noise",
                    name, value, self.epsilon / 10,
                )
        if self.max_iterations < 1:
            raise InputError(
                f"max_iterations must be at least 1, got {self.max_iterations}"
            )
