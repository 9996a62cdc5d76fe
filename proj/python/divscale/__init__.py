"""Divergence-token analysis: trace container, estimators, bounds and scaling fits."""

import numpy as np

from ._core import (
    BoundChainReport,
    BranchPairTrace,
    DependencyMode,
    DependencyProfile,
    DivergenceCurve,
    Error,
    EstimatorMode,
    PsiConstants,
    ScalingFit,
    SynthSpec,
    TraceSet,
    alpha_constant_psi,
    balance_point,
    decode_trace,
    dependency_profile,
    divergence_curve,
    encode_trace,
    expected_psi,
    fit_lambda,
    fit_lambda_profile,
    fit_power_law,
    generate,
    norm_bound,
    read_trace_file,
    rho,
    scaling_constant,
    upsilon,
    upsilon_profile,
    validate_bound_chain,
    write_trace_file,
)


def trace_set_from_arrays(pairs, metadata=None):
    """Build a TraceSet from (a, b) array pairs of shape (n, dim)."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no samples")
    dim = np.asarray(pairs[0][0]).shape[-1]
    out = TraceSet(dim, {k: str(v) for k, v in (metadata or {}).items()})
    for a, b in pairs:
        out.add_arrays(np.asarray(a, dtype=np.float32), np.asarray(b, dtype=np.float32))
    return out


__all__ = [name for name in dir() if not name.startswith("_")]
