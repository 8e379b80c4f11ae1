# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""
sdp contains the problem representation: the dual slack operator, slackness
diagnostics, the linear-combination-of-states decomposition, low-spectrum
summaries, a phase-1 search for a strictly feasible dual point and a reference
solver that does not touch the Bose-Einstein machinery.
"""

from typing import Literal, Optional, Sequence, Union

import numpy as np
import scipy.linalg as la

from .exceptions import (
    DimensionMismatch,
    DualInfeasible,
    DualUnbounded,
    EmptyDualInterior,
    InstanceValidationError,
    ZeroOperator,
)
from .linalg import (
    PSD_CLIP_RTOL,
    MatrixLike,
    as_array,
    as_hermitian,
    check_same_dim,
    eigh,
    psd_spectrum,
    spectral_norm,
    trace_product,
)
from .logging_utils import logger
from .models import DualPoint, HermitianMatrix, SdpInstance, SpectralSummary, StateModel, StateTerm

GROUPING_RTOL = 1e-8
PHASE1_MAX_ITERS = 2000
UNBOUNDED_LIMIT = 1e9

DualLike = Union[DualPoint, Sequence[float], np.ndarray]


def make_instance(
    H: MatrixLike, Q: Sequence[MatrixLike], q: Sequence[float]
) -> SdpInstance:
    """
    Builds an :class:`SdpInstance`, symmetrizing every matrix on the way in

    :raises NotHermitian: Some matrix is not Hermitian
    :raises InstanceValidationError: Shapes do not agree
    """
    h = as_hermitian(H)
    constraints = tuple(as_hermitian(m) for m in Q)
    if not constraints:
        raise InstanceValidationError("Q", "at least one constraint is required")
    for i, m in enumerate(constraints):
        if m.dim != h.dim:
            raise InstanceValidationError(
                f"Q[{i}]", f"dimension {m.dim} does not match H dimension {h.dim}"
            )
    targets = np.asarray(q, dtype=float).reshape(-1)
    if targets.shape[0] != len(constraints):
        raise InstanceValidationError(
            "q", f"length {targets.shape[0]} does not match {len(constraints)} constraints"
        )
    if not np.all(np.isfinite(targets)):
        raise InstanceValidationError("q", "entries must be finite")
    return SdpInstance(H=h, Q=constraints, q=targets)


def as_dual_point(mu: DualLike) -> DualPoint:
    if isinstance(mu, DualPoint):
        return mu
    return DualPoint(mu=mu)


def _mu_vector(inst: SdpInstance, mu: DualLike) -> np.ndarray:
    vector = as_dual_point(mu).mu
    if vector.shape[0] != inst.c:
        raise DimensionMismatch("dual point", inst.c, vector.shape[0])
    return vector


def slack_entries(inst: SdpInstance, mu: DualLike) -> np.ndarray:
    """K_mu as a raw array"""
    vector = _mu_vector(inst, mu)
    return inst.H.entries - np.einsum("i,ijk->jk", vector, inst.constraint_stack())


def dual_slack(inst: SdpInstance, mu: DualLike) -> HermitianMatrix:
    """
    Returns K_mu = H - sum_i mu_i Q_i

    :raises DimensionMismatch: mu does not have one entry per constraint
    """
    return HermitianMatrix(entries=slack_entries(inst, mu))


def lambda_min(inst: SdpInstance, mu: DualLike) -> float:
    """Smallest eigenvalue of K_mu"""
    return float(la.eigvalsh(slack_entries(inst, mu), check_finite=False)[0])


def slackness_residuals(
    K: MatrixLike, X: MatrixLike, rtol: float = PSD_CLIP_RTOL
) -> tuple[float, float]:
    """
    Returns (Tr[KX], ||KX||_F). Both vanish exactly when K and X satisfy
    complementary slackness.

    :raises NotPositiveSemidefinite: K or X is not PSD
    :raises DimensionMismatch: Different dimensions
    """
    k = as_hermitian(K)
    x = as_hermitian(X)
    check_same_dim("slackness_residuals", k.entries, x.entries)
    psd_spectrum(k, rtol)
    psd_spectrum(x, rtol)
    product = k.entries @ x.entries
    return trace_product(k, x), float(np.linalg.norm(product, "fro"))


def decompose_state_model(A: MatrixLike, rtol: float = PSD_CLIP_RTOL) -> StateModel:
    """
    Writes A as a signed combination of at most two density matrices using its
    Jordan decomposition A = A+ - A-. Eigenvalues within ``rtol`` times the
    spectral norm of zero are dropped.

    Example:

    .. code:: python

        model = bose_core.sdp.decompose_state_model(np.diag([1.0, -1.0]))
        print(model.one_norm)  # 2.0

    :raises ZeroOperator: A is the zero matrix
    """
    h = as_hermitian(A)
    values, vectors = eigh(h.entries)
    scale = spectral_norm(values)
    if scale == 0.0:
        raise ZeroOperator()
    values = np.where(np.abs(values) <= rtol * scale, 0.0, values)

    terms = []
    for sign in (1.0, -1.0):
        part = np.clip(sign * values, 0.0, None)
        weight = float(part.sum())
        if weight == 0.0:
            continue
        rho = (vectors * (part / weight)) @ vectors.conj().T
        terms.append(StateTerm(weight=sign * weight, state=as_hermitian(rho, rtol=1e-9)))
    return StateModel(terms=tuple(terms))


def spectral_summary(
    K: MatrixLike, grouping_tol: Optional[float] = None, rtol: float = PSD_CLIP_RTOL
) -> SpectralSummary:
    """
    Returns lambda_min, the ground degeneracy d0 and the gap to the next
    distinct eigenvalue. The grouping tolerance defaults to 1e-8·lambda_min.

    :raises DualInfeasible: K is not strictly positive definite
    """
    values, _ = eigh(as_hermitian(K).entries)
    lowest = float(values[0])
    if lowest <= rtol * spectral_norm(values):
        raise DualInfeasible(lowest)
    tol = GROUPING_RTOL * lowest if grouping_tol is None else float(grouping_tol)
    degeneracy = int(np.count_nonzero(values - lowest <= tol))
    gap = float(values[degeneracy] - lowest) if degeneracy < len(values) else 0.0
    return SpectralSummary(
        lambda_min=lowest,
        degeneracy=degeneracy,
        gap=gap,
        grouping_tol=tol,
        dim=len(values),
    )


def primal_ray_value(K: MatrixLike, scale: float) -> float:
    """
    Tr[K·(scale·vv†)] for the eigenvector v of the smallest eigenvalue of K.
    When K has a negative eigenvalue this falls without bound as ``scale``
    grows, which is why a dual point must keep K positive semidefinite.
    """
    values, vectors = eigh(as_hermitian(K).entries)
    v = vectors[:, 0]
    return trace_product(K, scale * np.outer(v, v.conj()))


def find_strictly_feasible(
    inst: SdpInstance,
    margin: float = 0.0,
    max_iters: int = PHASE1_MAX_ITERS,
) -> DualPoint:
    """
    Finds mu with lambda_min(K_mu) > ``margin`` by normalized subgradient
    ascent on mu -> lambda_min(K_mu), starting from 0. Returns 0 at once when
    H already clears the margin.

    :raises EmptyDualInterior: No such point within ``max_iters`` steps
    """
    Q = inst.constraint_stack()
    mu = np.zeros(inst.c)
    values, vectors = eigh(inst.H.entries)
    if values[0] > margin:
        return DualPoint(mu=mu)

    q_scale = max(spectral_norm(eigh(m)[0]) for m in Q)
    scale = max(1.0, abs(float(values[0]))) / (q_scale or 1.0)
    best = float(values[0])
    for k in range(max_iters):
        v = vectors[:, 0]
        subgradient = -np.einsum("a,iab,b->i", v.conj(), Q, v).real
        norm = float(np.linalg.norm(subgradient))
        if norm == 0.0:
            break
        mu = mu + (scale / np.sqrt(k + 1.0)) * subgradient / norm
        values, vectors = eigh(slack_entries(inst, mu))
        best = max(best, float(values[0]))
        if values[0] > margin:
            logger.debug(f"phase-1 found lambda_min {values[0]:.3e} after {k + 1} steps")
            return DualPoint(mu=mu)
    else:
        k = max_iters
    raise EmptyDualInterior(k, best)


def _solve_bisection(inst: SdpInstance, tol: float) -> tuple[float, DualPoint]:
    q = float(inst.q[0])
    start = float(find_strictly_feasible(inst).mu[0])
    if q == 0.0:
        return 0.0, DualPoint(mu=[start])
    direction = 1.0 if q > 0.0 else -1.0

    def feasible(value: float) -> bool:
        return lambda_min(inst, [value]) > 0.0

    step = max(1.0, abs(start))
    while feasible(start + direction * step):
        step *= 2.0
        if step > UNBOUNDED_LIMIT:
            raise DualUnbounded(q * (start + direction * step))
    inside, outside = start, start + direction * step
    for _ in range(400):
        if abs(outside - inside) * abs(q) <= tol:
            break
        middle = 0.5 * (inside + outside)
        if feasible(middle):
            inside = middle
        else:
            outside = middle
    return q * inside, DualPoint(mu=[inside])


def _barrier_terms(
    inst: SdpInstance, mu: np.ndarray, t: float
) -> tuple[float, np.ndarray, np.ndarray]:
    values, vectors = eigh(slack_entries(inst, mu))
    if values[0] <= 0.0:
        return -np.inf, np.empty(0), np.empty(0)
    scaled = np.einsum("ab,ibc,cd->iad", vectors.conj().T, inst.constraint_stack(), vectors)
    root = 1.0 / np.sqrt(values)
    B = scaled * root[None, :, None] * root[None, None, :]
    value = float(mu @ inst.q + t * np.sum(np.log(values)))
    grad = inst.q - t * np.einsum("iaa->i", B).real
    hess = -t * np.einsum("iab,jba->ij", B, B).real
    return value, grad, 0.5 * (hess + hess.T)


def _solve_barrier(inst: SdpInstance, tol: float, max_newton: int = 200) -> tuple[float, DualPoint]:
    mu = find_strictly_feasible(inst).mu.copy()
    t = 1.0
    while True:
        for _ in range(max_newton):
            value, grad, hess = _barrier_terms(inst, mu, t)
            try:
                direction = la.solve(-hess, grad, assume_a="pos", check_finite=False)
            except (la.LinAlgError, ValueError):
                direction = la.lstsq(-hess, grad, check_finite=False)[0]
            decrement = float(grad @ direction)
            if decrement <= 1e-12 * max(1.0, abs(value)):
                break
            alpha = 1.0
            for _ in range(60):
                trial, _, _ = _barrier_terms(inst, mu + alpha * direction, t)
                if trial >= value + 0.25 * alpha * decrement:
                    break
                alpha *= 0.5
            else:
                break
            mu = mu + alpha * direction
            if np.linalg.norm(mu) > UNBOUNDED_LIMIT or abs(mu @ inst.q) > UNBOUNDED_LIMIT:
                raise DualUnbounded(float(mu @ inst.q))
        if t * inst.d < tol:
            break
        t *= 0.2
    return float(mu @ inst.q), DualPoint(mu=mu)


def oracle_solve(
    inst: SdpInstance,
    tol: float = 1e-9,
    method: Literal["auto", "bisection", "barrier"] = "auto",
    slater_asserted: bool = True,
) -> tuple[float, DualPoint]:
    """
    Reference solver for the unregularized problem. Returns the optimal value E
    within ``tol`` and a dual point achieving it. One constraint is solved by
    bisection against the boundary lambda_min(H - mu Q) = 0; more constraints
    follow a log-det barrier central path.

    Example:

    .. code:: python

        E, mu = bose_core.sdp.oracle_solve(bose_core.utils.inst_a())
        print(E)  # 1.0 within 1e-9

    :raises ValueError: Slater's condition was not asserted
    :raises EmptyDualInterior: The dual has no strictly feasible point
    :raises DualUnbounded: The dual objective grows without bound
    """
    if not slater_asserted:
        raise ValueError("oracle_solve needs slater_asserted=True")
    if method == "auto":
        method = "bisection" if inst.c == 1 else "barrier"
    if method == "bisection":
        if inst.c != 1:
            raise ValueError("bisection handles a single constraint only")
        E, mu = _solve_bisection(inst, tol)
    else:
        E, mu = _solve_barrier(inst, tol)
    logger.info(f"oracle ({method}) value {E:.12g}")
    return E, mu


def dual_objective_unregularized(inst: SdpInstance, mu: DualLike) -> float:
    """mu·q, the dual objective at a feasible point"""
    return float(_mu_vector(inst, mu) @ inst.q)


def primal_objective(inst: SdpInstance, X: MatrixLike) -> float:
    """Tr[HX]"""
    return trace_product(inst.H, as_array(X))


def constraint_values(inst: SdpInstance, X: MatrixLike) -> np.ndarray:
    """Tr[Q_i X] for every constraint"""
    x = as_array(X)
    check_same_dim("constraint_values", inst.H.entries, x)
    return np.einsum("iab,ba->i", inst.constraint_stack(), x).real
