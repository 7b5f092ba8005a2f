"""Faces and neighborliness of the convex hull of the symmetric moment curve."""

from .critical_arc import CriticalArcResult, Split, critical_length, endpoint_poly, opposite_min, phi, semicircle_check
from .deformation import RootPairing, alpha_conjecture, beta, h_poly, lambda_deform, pair_roots, sin_power, witness_poly
from .errors import SymMomentError
from .interpolation import FaceCertificate, FaceStatus, FaceVerdict, RootSpec, interpolate, is_face, positivity_margin
from .polytope import FaceCount, VertexConfig, clustered_config, count_faces, edge_check, embed, lp_face_oracle
from .trigpoly import Arc, CirclePoint, CircleRoot, RakedTrigPoly, circle_roots, lift, sup_norm

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "CirclePoint",
    "CircleRoot",
    "CriticalArcResult",
    "FaceCertificate",
    "FaceCount",
    "FaceStatus",
    "FaceVerdict",
    "RakedTrigPoly",
    "RootPairing",
    "RootSpec",
    "Split",
    "SymMomentError",
    "VertexConfig",
    "alpha_conjecture",
    "beta",
    "circle_roots",
    "clustered_config",
    "count_faces",
    "critical_length",
    "edge_check",
    "embed",
    "endpoint_poly",
    "h_poly",
    "interpolate",
    "is_face",
    "lambda_deform",
    "lift",
    "lp_face_oracle",
    "opposite_min",
    "pair_roots",
    "phi",
    "positivity_margin",
    "semicircle_check",
    "sin_power",
    "sup_norm",
    "witness_poly",
]
