"""Bundled benchmark systems and reference certificates.

Two system families ship with the package:

* ``guas_not_polyqs_system``: a strictly polytopic pair that is GUAS
  (its joint spectral radius is below one) yet admits no poly-quadratic
  Lyapunov function.  The scaled variant (default) carries the GUAS
  property; the unscaled variant drops the 1/1.19 contraction factor and
  is the system certified by the bundled reference certificate
  ``stability_reference_cone`` (direct evaluation shows the reference
  blocks satisfy the dual conditions for the unscaled pair only).

* ``unstabilizable_cascade_system``: a 4-state cascade of the scaled
  pair with a single input on the second state.  No state feedback makes
  it poly-quadratically stable; ``stabilizability_reference_cone`` is a
  certificate of that.

Reference certificate blocks are transcribed with the column-major flat
convention: flat block k corresponds to pair (i, j) = flat_to_pair(k, N).
"""

from __future__ import annotations

import numpy as np

from .linalg import SymMatrix
from .model import NonexistenceCertificate, PolytopicSystem, flat_to_pair

__all__ = [
    "guas_not_polyqs_system",
    "stability_reference_cone",
    "unstabilizable_cascade_system",
    "stabilizability_reference_cone",
    "scalar_system",
]

CONTRACTION = 1.0 / 1.19

_VERTEX_1 = np.array([[0.80, 0.65], [-0.34, 0.90]])
_VERTEX_2 = np.array([[0.43, 0.62], [-1.48, 0.14]])

_STABILITY_CONE_FLAT = (
    np.array([[0.7, 0.3], [0.3, 2.3]]),
    np.array([[1.0, 0.5], [0.5, 1.5]]),
    np.array([[1.1, -0.1], [-0.1, 1.0]]),
    np.array([[0.9, 0.2], [0.2, 1.2]]),
)

_CASCADE_CONE_FLAT = (
    np.array([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1.65, 2.23], [0, 0, 2.23, 3.04]], float),
    np.array([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0.01, -0.02], [0, 0, -0.02, 2.47]], float),
    np.array([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 3.69, 0.38], [0, 0, 0.38, 0.05]], float),
    np.array([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0.85, -0.37], [0, 0, -0.37, 0.17]], float),
)


def guas_not_polyqs_system(scaled: bool = True) -> PolytopicSystem:
    """Two-vertex planar system that is GUAS but not poly-quadratically stable."""
    factor = CONTRACTION if scaled else 1.0
    return PolytopicSystem((factor * _VERTEX_1, factor * _VERTEX_2))


def stability_reference_cone() -> NonexistenceCertificate:
    """Reference stability CoNE for ``guas_not_polyqs_system(scaled=False)``."""
    blocks = {
        flat_to_pair(k + 1, 2): SymMatrix(m) for k, m in enumerate(_STABILITY_CONE_FLAT)
    }
    return NonexistenceCertificate("stability", blocks)


def unstabilizable_cascade_system() -> PolytopicSystem:
    """4-state cascade with one input; not poly-quadratically stabilizable."""
    eye, zero = np.eye(2), np.zeros((2, 2))
    verts = tuple(
        np.block([[CONTRACTION * V, eye], [zero, CONTRACTION * V]])
        for V in (_VERTEX_1, _VERTEX_2)
    )
    B = np.array([[0.0], [1.0], [0.0], [0.0]])
    return PolytopicSystem(verts, B=B)


def stabilizability_reference_cone() -> NonexistenceCertificate:
    """Reference stabilizability CoNE for ``unstabilizable_cascade_system``."""
    blocks = {
        flat_to_pair(k + 1, 2): SymMatrix(m) for k, m in enumerate(_CASCADE_CONE_FLAT)
    }
    return NonexistenceCertificate("stabilizability", blocks)


def scalar_system(a: float, B=None, C=None) -> PolytopicSystem:
    """Single-vertex scalar system x+ = a*x (handy analytic test case)."""
    return PolytopicSystem((np.array([[float(a)]]),), B=B, C=C)
