"""Single-point evaluation: dispatch a scenario to the classical or
delocalized pipeline and assemble a HarvestResult."""

from __future__ import annotations

from .classical import entangling_classical_iv, excitation_classical_iv
from .delocalized import entangling_delocalized_iv, excitation_delocalized_iv
from .entanglement import SecondOrderState, negativity
from .quadrature import IntegralValue, NonConvergenceError, QuadratureSpec
from .scenario import Delocalized, HarvestResult, ScenarioConfig

__all__ = ["harvest", "harvest_cell"]


def _stages(cfg: ScenarioConfig, path, spec):
    if isinstance(cfg.model, Delocalized):
        return (
            lambda: excitation_delocalized_iv(cfg, path, spec),
            lambda: entangling_delocalized_iv(cfg, path, spec),
        )
    return (
        lambda: excitation_classical_iv(cfg, spec),
        lambda: entangling_classical_iv(cfg, spec),
    )


def harvest(
    cfg: ScenarioConfig,
    path: str | None = None,
    spec: QuadratureSpec | None = None,
    p_precomputed: IntegralValue | None = None,
) -> HarvestResult:
    """P, M and negativity for one scenario (raises on non-convergence)."""
    p_stage, m_stage = _stages(cfg, path, spec)
    p_iv = p_precomputed if p_precomputed is not None else p_stage()
    m_iv = m_stage()
    p = float(p_iv.value.real if isinstance(p_iv.value, complex) else p_iv.value)
    m = complex(m_iv.value)
    n = negativity(SecondOrderState(p, p, m))
    return HarvestResult(p, p, m, n, float(p_iv.err_estimate), float(m_iv.err_estimate))


def harvest_cell(
    cfg: ScenarioConfig,
    path: str | None = None,
    spec: QuadratureSpec | None = None,
    p_precomputed: IntegralValue | None = None,
) -> tuple[HarvestResult, bool]:
    """Like harvest(), but non-convergence degrades to a flagged cell
    carrying the best available estimates instead of raising."""
    converged = True
    p_stage, m_stage = _stages(cfg, path, spec)
    try:
        p_iv = p_precomputed if p_precomputed is not None else p_stage()
    except NonConvergenceError as exc:
        p_iv = IntegralValue(exc.estimate, exc.err_estimate, exc.evaluations)
        converged = False
    try:
        m_iv = m_stage()
    except NonConvergenceError as exc:
        m_iv = IntegralValue(exc.estimate, exc.err_estimate, exc.evaluations)
        converged = False
    p = float(p_iv.value.real if isinstance(p_iv.value, complex) else p_iv.value)
    m = complex(m_iv.value)
    n = negativity(SecondOrderState(max(p, 0.0), max(p, 0.0), m))
    res = HarvestResult(
        max(p, 0.0), max(p, 0.0), m, n, float(p_iv.err_estimate), float(m_iv.err_estimate)
    )
    return res, converged
