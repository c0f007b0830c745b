"""Tools composing the analysis pipeline into JSON-ready reports."""

import logging
import math
import time
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any

import numpy as np

from analysis.catalog import named
from analysis.chain_structure import (
    ReducedForm,
    canonical_form,
    invariant_faces_bruteforce,
    is_irreducible,
    is_primitive,
)
from analysis.choi_effros import (
    algebra_check,
    build_persistent_algebra,
    decoherence_split_check,
    idempotents_are_indicators,
    multiplicative_domain,
    restricted_automorphism_check,
)
from analysis.matrix_core import StochasticMatrix, inf_op_norm
from analysis.spectral import (
    compute_spectral_data,
    decoherence_time,
    spectral_reconstruction_residuals,
    stationary_distributions,
)
from analysis.ucp_lift import (
    Superoperator,
    diag_pullover,
    embedded_stochastic,
    persistent_iso_check,
    phase_damping,
)
from config import DEFAULT_SETTINGS, AnalysisSettings
from loaders.matrix_files import load_matrix, rows_digest

logger = logging.getLogger(__name__)


@contextmanager
def _timed(timings: dict[str, float], phase: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[f"{phase}_ms"] = (time.perf_counter() - start) * 1000.0


def _complex_pair(z: complex) -> dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


def _canonical_summary(
    S: StochasticMatrix, rf: ReducedForm, settings: AnalysisSettings
) -> dict[str, Any]:
    faces = None
    if S.n <= settings.max_face_states:
        faces = len(invariant_faces_bruteforce(S, settings.zero_tol, settings.max_face_states))

    return {
        "permutation": list(rf.permutation),
        "order": list(rf.order),
        "transient": list(rf.transient),
        "classes": [
            {
                "states": list(c.states),
                "period": c.period,
                "cyclic_classes": [list(b) for b in c.cyclic_classes],
                "primitive": is_primitive(rf.class_block(j), settings.zero_tol),
            }
            for j, c in enumerate(rf.classes)
        ],
        "L": rf.L,
        "transient_block": rf.transient_block.tolist(),
        "irreducible": is_irreducible(S, settings.zero_tol),
        "invariant_faces_count": faces,
    }


def analyze_matrix(
    S: StochasticMatrix,
    settings: AnalysisSettings = DEFAULT_SETTINGS,
    input_info: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """
    Run the full pipeline on S and collect every result into one report.

    canonical form -> peripheral projection -> ergodic projection -> peripheral
    spectrum -> persistent algebra -> algebra, automorphism and split checks.

    Args:
        S: Validated stochastic matrix
        settings: Tolerances and limits
        input_info: Extra fields for the "input" section (source, name, digest)

    Returns:
        Report dict with keys input, canonical, spectral, algebra, timings
    """
    timings: dict[str, float] = {}
    total_start = time.perf_counter()

    with _timed(timings, "canonical"):
        rf = canonical_form(S, settings.zero_tol)
        canonical = _canonical_summary(S, rf, settings)

    with _timed(timings, "spectral"):
        data = compute_spectral_data(S, rf, settings)
        P = data.P
        sum_residual, action_residual = spectral_reconstruction_residuals(
            S, P, data.L, data.peripheral_values
        )
        t_eps = decoherence_time(S, P, settings.epsilon, settings.t_max)
        spectral = {
            "rank_P": data.rank_P,
            "rank_E1": data.rank_E1,
            "peripheral_values": [_complex_pair(z) for z in data.peripheral_values],
            "peripheral_count": len(data.peripheral_values),
            "gap_estimate": data.gap_estimate,
            "decoherence_time": t_eps,
            "epsilon": settings.epsilon,
            "squarings": data.squarings,
            "idempotence_residual": inf_op_norm(P @ P - P),
            "commutation_residual": inf_op_norm(S.entries @ P - P @ S.entries),
            "row_sum_residual": float(np.max(np.abs(P.sum(axis=1) - 1.0))),
            "reconstruction_residual": sum_residual,
            "action_residual": action_residual,
            "stationary_distributions": [
                d.weights.tolist() for d in stationary_distributions(data.E1, rf)
            ],
        }

    with _timed(timings, "algebra"):
        A = build_persistent_algebra(S, rf, P, settings)
        checks = algebra_check(A, settings.alg_tol)
        auto = restricted_automorphism_check(S, A, settings.alg_tol)
        partition = multiplicative_domain(S, settings.zero_tol)
        split = decoherence_split_check(S, P, partition, settings.alg_tol, settings.rank_tol)
        algebra = {
            "dim": A.dim,
            "checks": checks.as_dict(),
            "idempotent_count": len(A.idempotents),
            "unit_residual": float(np.max(np.abs(np.sum(A.idempotents, axis=0) - 1.0))),
            "automorphism_order": auto.order,
            "automorphism": auto.as_dict(),
            "product_coincides": split.product_coincides,
            "idempotents_are_indicators": idempotents_are_indicators(list(A.idempotents)),
            "split_holds": split.split_holds,
            "decoherence": split.as_dict(),
            "passed": checks.passed and auto.passed,
        }

    timings["total_ms"] = (time.perf_counter() - total_start) * 1000.0
    logger.info("analyzed %d-state matrix in %.1f ms", S.n, timings["total_ms"])
    return {
        "input": {
            "n": S.n,
            "matrix": S.tolist(),
            "settings": settings.as_dict(),
            **(input_info or {}),
        },
        "canonical": canonical,
        "spectral": spectral,
        "algebra": algebra,
        "timings": timings,
    }


def report_passed(report: dict[str, Any]) -> bool:
    """True iff every verification recorded in the report passed."""
    passed = bool(report["algebra"]["passed"])
    if "lift" in report:
        passed = passed and bool(report["lift"]["iso"]["holds"])
    return passed


def tool_analyze_matrix(
    path: str | None = None,
    example: str | None = None,
    input_format: str | None = None,
    settings: AnalysisSettings = DEFAULT_SETTINGS,
) -> dict[str, Any]:
    """
    Analyze a stochastic matrix read from a file or taken from the built-in examples.

    Args:
        path: CSV or JSON matrix file
        example: Name of a built-in example matrix (used when path is None)
        input_format: "csv" or "json"; guessed from the extension when None
        settings: Tolerances and limits
    """
    if path is not None:
        loaded = load_matrix(path, input_format, settings.validation_tol)
        info = {"source": loaded.source, "name": loaded.name, "input_digest": loaded.digest}
        return analyze_matrix(loaded.matrix, settings, info)
    if example is not None:
        S = named(example)
        info = {"source": "example", "name": example, "input_digest": rows_digest(S.tolist())}
        return analyze_matrix(S, settings, info)
    raise ValueError("either path or example is required")


def _lift_report(
    phi: Superoperator,
    kind: str,
    settings: AnalysisSettings,
    input_info: dict[str, Any],
) -> dict[str, Any]:
    S = embedded_stochastic(phi, settings.validation_tol)
    report = analyze_matrix(S, settings, input_info)

    start = time.perf_counter()
    iso = persistent_iso_check(phi, S, settings.alg_tol, settings)
    report["timings"]["lift_ms"] = (time.perf_counter() - start) * 1000.0

    report["lift"] = {
        "kind": kind,
        "n": phi.n,
        "superoperator": phi.M.tolist(),
        "basis": [list(unit) for unit in phi.basis_order],
        "embedded_stochastic": S.tolist(),
        "unitality_residual": phi.unitality_residual(),
        "rank": iso.rank_phi,
        "iso": iso.as_dict(),
    }
    return report


def tool_lift_pullover(
    path: str | None = None,
    example: str | None = None,
    input_format: str | None = None,
    settings: AnalysisSettings = DEFAULT_SETTINGS,
) -> dict[str, Any]:
    """
    Lift a stochastic matrix to the diagonal pullover map and compare persistent systems.

    Args:
        path: CSV or JSON matrix file
        example: Name of a built-in example matrix (used when path is None)
        input_format: "csv" or "json"; guessed from the extension when None
        settings: Tolerances and limits
    """
    if path is not None:
        loaded = load_matrix(path, input_format, settings.validation_tol)
        S, info = loaded.matrix, {
            "source": loaded.source,
            "name": loaded.name,
            "input_digest": loaded.digest,
        }
    elif example is not None:
        S = named(example)
        info = {"source": "example", "name": example, "input_digest": rows_digest(S.tolist())}
    else:
        raise ValueError("either path or example is required")
    return _lift_report(diag_pullover(S), "pullover", settings, info)


def tool_lift_phase_damping(
    alpha: float, beta: float, settings: AnalysisSettings = DEFAULT_SETTINGS
) -> dict[str, Any]:
    """
    Build the two-angle map on 2 x 2 matrices and compare its persistent system with S.

    Args:
        alpha: First angle in radians
        beta: Second angle in radians
        settings: Tolerances and limits
    """
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise ValueError("alpha and beta must be finite")
    phi = phase_damping(alpha, beta)
    info = {"source": "phase-damping", "name": None, "alpha": alpha, "beta": beta}
    info["input_digest"] = rows_digest(phi.M.tolist())
    return _lift_report(phi, "phase-damping", settings, info)
