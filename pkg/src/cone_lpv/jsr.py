"""Brute-force joint-spectral-radius bounds.

For a finite set of matrices {A_i} the bounds at depth D are

    lower = max over words w of length t <= D of rho(A_w)^(1/t)
    upper = min over t <= D of (max over |w| = t of sigma_max(A_w))^(1/t)

Both bracket the true joint spectral radius.  Enumeration is exhaustive
and depth-first with incremental products; at desk scale (N = 2, depth
16 means 131070 products) no pruning is needed and exhaustiveness makes
the bounds certifiable.  A single matrix is special-cased: its joint
spectral radius is exactly its spectral radius at every depth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, ContractError, NumericalFailure
from .model import PolytopicSystem

__all__ = ["JsrBounds", "spectral_radius", "bounds", "depth_profile"]

MAX_PRODUCTS = 2**24


@dataclass(frozen=True)
class JsrBounds:
    lower: float
    upper: float
    depth: int
    witness_word: tuple[int, ...]  # 1-based vertex indices attaining the lower bound


def spectral_radius(A) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError(f"spectral radius needs a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractError("matrix entries must be finite")
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration failed: {exc}") from exc
    return float(np.max(np.abs(ev)))


def _depth_profile(vertices, max_depth):
    """Per-depth statistics from one exhaustive depth-first enumeration.

    Returns (best_rho_root, best_word, max_norm) where best_rho_root[t-1]
    is the best rho(A_w)^(1/t) among words of length exactly t, best_word
    the word attaining it, and max_norm[t-1] the largest spectral norm at
    that length.
    """
    N = len(vertices)
    best_rho = np.zeros(max_depth)
    best_word: list[tuple[int, ...]] = [()] * max_depth
    max_norm = np.zeros(max_depth)

    # iterative DFS; children visited in vertex order so ties resolve
    # deterministically to the lexicographically first word
    stack = [((), np.eye(vertices[0].shape[0]))]
    while stack:
        word, prod = stack.pop()
        for idx in range(N - 1, -1, -1):
            w = word + (idx + 1,)
            p = prod @ vertices[idx]
            t = len(w)
            rho_root = spectral_radius(p) ** (1.0 / t)
            if rho_root > best_rho[t - 1]:
                best_rho[t - 1] = rho_root
                best_word[t - 1] = w
            norm = float(np.linalg.svd(p, compute_uv=False)[0])
            if norm > max_norm[t - 1]:
                max_norm[t - 1] = norm
            if t < max_depth:
                stack.append((w, p))
    return best_rho, best_word, max_norm


def depth_profile(system: PolytopicSystem, max_depth: int) -> list[JsrBounds]:
    """Cumulative bounds for every depth 1..max_depth from one enumeration.

    Raises BudgetExceeded when N^max_depth > 2^24.
    """
    if max_depth < 1:
        raise ContractError(f"max_depth must be >= 1, got {max_depth}")
    N = len(system.vertices)
    if N**max_depth > MAX_PRODUCTS:
        raise BudgetExceeded(
            f"N^max_depth = {N}^{max_depth} exceeds the {MAX_PRODUCTS} product budget"
        )
    vertices = [np.asarray(v, dtype=float) for v in system.vertices]
    best_rho, best_word, max_norm = _depth_profile(vertices, max_depth)

    profile = []
    lower, witness = -np.inf, ()
    upper = np.inf
    for t in range(1, max_depth + 1):
        if best_rho[t - 1] > lower:
            lower = float(best_rho[t - 1])
            witness = best_word[t - 1]
        if N == 1:
            # singleton set: the joint spectral radius is exactly rho(A_1)
            upper = lower
        else:
            upper = min(upper, float(max_norm[t - 1] ** (1.0 / t)))
        profile.append(JsrBounds(lower=lower, upper=upper, depth=t, witness_word=witness))
    return profile


def bounds(system: PolytopicSystem, max_depth: int) -> JsrBounds:
    """Bracket the joint spectral radius of the vertex set.

    Raises BudgetExceeded when N^max_depth > 2^24.
    """
    return depth_profile(system, max_depth)[-1]
