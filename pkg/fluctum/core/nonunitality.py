"""
The nonunitality operator G = Phi(rho_*) - rho_* and the bounds on its size.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from fluctum.config.settings import settings
from fluctum.core.bloch import BlochVector, to_bloch
from fluctum.core.channel import QuantumChannel, apply, map_norm, nonunital_part
from fluctum.core.linalg import ComplexMatrix, identity, schatten_norm
from fluctum.models.matrices import BlochPayload, MatrixLiteral
from fluctum.utils.error_handling import DimensionMismatchError
from fluctum.utils.input_validation import InputValidator

logger = logging.getLogger(__name__)


def nonunitality_operator(phi: QuantumChannel) -> ComplexMatrix:
    """G = Phi(I/N_A) - I/N_B, traceless and Hermitian for trace-preserving maps."""
    return apply(phi, identity(phi.dim_in) / phi.dim_in) - identity(phi.dim_out) / phi.dim_out


@dataclass(frozen=True, eq=False)
class NonunitalityReport:
    dim: int
    G: ComplexMatrix
    tau: BlochVector
    hs_norm: float
    tau_norm: float
    map_norm: float
    unitality_defect: float
    output_norm: float
    bound_prop2: float
    bound_dim: float
    bound_rscmn: float
    bound_tau: float
    choi_lhs: float
    choi_rhs: float

    @property
    def slack_prop2(self) -> float:
        return self.bound_prop2 - self.unitality_defect

    @property
    def slack_dim(self) -> float:
        return self.bound_dim - self.unitality_defect

    @property
    def slack_rscmn(self) -> float:
        return self.bound_rscmn - self.hs_norm

    @property
    def slack_tau(self) -> float:
        return self.bound_tau - self.tau_norm

    def violations(self, tol: Optional[float] = None) -> List[str]:
        """Names of every bound inequality that fails by more than tol."""
        tol = settings.tolerances.validation if tol is None else tol
        n = self.dim
        checks = {
            "prop2": self.slack_prop2 >= -tol,
            "dim": self.slack_dim >= -tol,
            "rscmn": self.slack_rscmn >= -tol,
            "rscmn_ceiling": self.bound_rscmn <= math.sqrt(1.0 - 1.0 / n) + tol,
            "tau": self.slack_tau >= -tol,
            "tau_ceiling": self.bound_tau <= math.sqrt(2.0 - 2.0 / n) + tol,
            "choi_marginal": self.choi_lhs <= self.choi_rhs + tol,
            "choi_consistency": abs(self.choi_lhs - self.hs_norm) <= tol,
            "traceless": abs(np.trace(self.G)) <= tol,
        }
        return [name for name, ok in checks.items() if not ok]

    def to_row(self, channel_id: str, tol: Optional[float] = None) -> Dict[str, Any]:
        return {
            "channel_id": channel_id,
            "N": self.dim,
            "unitality_defect": self.unitality_defect,
            "map_norm": self.map_norm,
            "hs_norm": self.hs_norm,
            "tau_norm": self.tau_norm,
            "bound_prop2": self.bound_prop2,
            "bound_dim": self.bound_dim,
            "bound_rscmn": self.bound_rscmn,
            "bound_tau": self.bound_tau,
            "slack_prop2": self.slack_prop2,
            "slack_dim": self.slack_dim,
            "slack_rscmn": self.slack_rscmn,
            "slack_tau": self.slack_tau,
            "choi_lhs": self.choi_lhs,
            "choi_rhs": self.choi_rhs,
            "violations": ";".join(self.violations(tol)),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "G": MatrixLiteral.from_array(self.G).model_dump(),
            "tau": BlochPayload(dim=self.dim, components=self.tau.to_list()).model_dump(),
            "hs_norm": self.hs_norm,
            "tau_norm": self.tau_norm,
            "map_norm": self.map_norm,
            "unitality_defect": self.unitality_defect,
            "output_norm": self.output_norm,
            "bound_prop2": self.bound_prop2,
            "bound_dim": self.bound_dim,
            "bound_rscmn": self.bound_rscmn,
            "bound_tau": self.bound_tau,
            "choi_lhs": self.choi_lhs,
            "choi_rhs": self.choi_rhs,
        }


def choi_marginal_bound_check(phi: QuantumChannel) -> Tuple[float, float]:
    """(||Tr_R(eta) - rho_*||_2, N^{-1/2} sqrt(||Phi|| - 1))"""
    _require_square(phi)
    n = phi.dim_in
    lhs = float(np.linalg.norm(phi.choi_matrix.output_marginal() - identity(n) / n))
    rhs = math.sqrt(max(map_norm(phi) - 1.0, 0.0) / n)
    return lhs, rhs


def bounds_report(phi: QuantumChannel) -> NonunitalityReport:
    _require_square(phi)
    n = phi.dim_in
    G = nonunitality_operator(phi)
    tau = to_bloch(G)
    norm = map_norm(phi)
    output_norm = schatten_norm(G + identity(n) / n, math.inf)
    bound_rscmn = math.sqrt(max(output_norm - 1.0 / n, 0.0))
    choi_lhs, choi_rhs = choi_marginal_bound_check(phi)

    report = NonunitalityReport(
        dim=n,
        G=G,
        tau=tau,
        hs_norm=float(np.linalg.norm(G)),
        tau_norm=tau.norm,
        map_norm=norm,
        unitality_defect=float(np.linalg.norm(nonunital_part(phi))),
        output_norm=output_norm,
        bound_prop2=math.sqrt(n * max(norm - 1.0, 0.0)),
        bound_dim=math.sqrt(n * (n - 1)),
        bound_rscmn=bound_rscmn,
        bound_tau=math.sqrt(2.0) * bound_rscmn,
        choi_lhs=choi_lhs,
        choi_rhs=choi_rhs,
    )
    logger.debug("Bounds for %r: |G|=%.6g, ||Phi||=%.6g", phi, report.hs_norm, norm)
    return report


def hs_angle_with_hamiltonian(G: ComplexMatrix, H: ComplexMatrix) -> float:
    """<H, G>_HS, real for Hermitian arguments."""
    G = InputValidator.hermitian(G, "G")
    H = InputValidator.hermitian(H, "H")
    InputValidator.same_shape(G, H, "G and H")
    return float(np.vdot(H, G).real)


def _require_square(phi: QuantumChannel) -> None:
    if not phi.is_square:
        raise DimensionMismatchError(f"Bounds need a square channel, got {phi.dim_in}->{phi.dim_out}")
