"""Tolerances and iteration limits shared by the analysis pipeline."""

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

TEMPLATE_DIR = Path(__file__).parent / "reports" / "templates"


@dataclass(frozen=True)
class AnalysisSettings:
    """
    Numerical settings for one analysis run.

    Attributes:
        validation_tol: Slack allowed on row sums and negative entries when ingesting
        zero_tol: Entries at or below this are structural zeros of the support digraph
        proj_tol: Stopping threshold for the squaring limit and projection checks
        alg_tol: Residual threshold for the Choi-Effros algebra checks
        epsilon: Target for the decoherence time
        max_squarings: Squaring budget for the peripheral projection
        gap_iters: Squarings used by the mass-gap estimate
        t_max: Step budget for the decoherence time scan
        max_face_states: Largest state count for brute-force face enumeration
        rank_tol: Floor of the pivot threshold used for numerical rank
    """

    validation_tol: float = 1e-9
    zero_tol: float = 1e-12
    proj_tol: float = 1e-8
    alg_tol: float = 1e-8
    epsilon: float = 1e-3
    max_squarings: int = 64
    gap_iters: int = 20
    t_max: int = 10**6
    max_face_states: int = 16
    rank_tol: float = 1e-7

    def with_overrides(self, **overrides: Any) -> "AnalysisSettings":
        """Return a copy with every non-None override applied (unknown keys are ignored)."""
        known = {f.name for f in fields(self)}
        changes = {k: v for k, v in overrides.items() if v is not None and k in known}
        return replace(self, **changes)

    def as_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_SETTINGS = AnalysisSettings()
