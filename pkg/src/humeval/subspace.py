"""Subspace similarity: PCA bases, canonical angles via SVD, squared-cosine score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import QuoteSet
from .embedding import EmbeddingProvider, embed
from .errors import ContractError, DegenerateInputError

RANK_TOL = 1e-10
DEFAULT_MAX_Q = 5


@dataclass(frozen=True)
class SubspaceBasis:
    basis: np.ndarray          # d×q, column-orthonormal
    energy: tuple[float, ...]  # captured-variance ratio per direction

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    @property
    def q(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class CanonicalAngles:
    cosines: tuple[float, ...]  # descending, each in [0, 1]


def pca_basis(columns: np.ndarray, q: int, center: bool = False) -> SubspaceBasis:
    """Top-q left singular vectors of the d×n column matrix.

    Uncentered by default, consistent with subspace methods built on
    autocorrelation structure of unit vectors; ``center`` enables the
    mean-subtracted variant for ablation. The requested q collapses to the
    numerical rank at relative tolerance 1e-10.
    """
    if q < 1:
        raise ContractError(f"requested subspace dimension {q} < 1")
    X = np.asarray(columns, dtype=float)
    if X.ndim != 2 or X.shape[1] == 0:
        raise ContractError("expected a d×n matrix with at least one column")
    if center:
        X = X - X.mean(axis=1, keepdims=True)
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise DegenerateInputError("all-zero matrix has no principal directions")
    rank = int(np.sum(s > RANK_TOL * s[0]))
    if rank == 0:
        raise DegenerateInputError("matrix is numerically zero at tolerance 1e-10")
    q_eff = min(q, rank)
    total = float(np.sum(s ** 2))
    energy = tuple((s[:q_eff] ** 2 / total).tolist())
    return SubspaceBasis(basis=U[:, :q_eff].copy(), energy=energy)


def canonical_angles(A: SubspaceBasis, B: SubspaceBasis) -> CanonicalAngles:
    """Cosines of the canonical angles: singular values of Aᵀ·B."""
    if A.d != B.d:
        raise ContractError(f"ambient dimension mismatch: {A.d} vs {B.d}")
    s = np.linalg.svd(A.basis.T @ B.basis, compute_uv=False)
    cosines = np.clip(np.sort(s)[::-1], 0.0, 1.0)
    return CanonicalAngles(cosines=tuple(cosines.tolist()))


def subspace_score(angles: CanonicalAngles, r: int) -> float:
    """Mean of the squared cosines of the r largest canonical angles."""
    t = len(angles.cosines)
    if not 1 <= r <= t:
        raise ContractError(f"r = {r} out of range [1, {t}]")
    top = angles.cosines[:r]
    return float(sum(c * c for c in top) / r)


def score_subspace_module(model_outputs: list[QuoteSet], ground_truth: QuoteSet,
                          provider: EmbeddingProvider,
                          q: int | None = None, r: int | None = None,
                          center: bool = False) -> float:
    """Subspace similarity between pooled model predictions and ground truth.

    Every predicted quote across all instruction variations becomes a column
    of the model vector set; every ground-truth quote a column of the other.
    """
    if len(model_outputs) < 2:
        raise ContractError(
            "subspace scoring needs at least 2 instruction variations"
        )
    if not ground_truth.quotes:
        raise ContractError("subspace scoring needs non-empty ground truth")
    model_quotes = [quote for qs in model_outputs for quote in qs.quotes]
    if not model_quotes:
        raise ContractError("subspace scoring needs at least one predicted quote")

    M = np.column_stack(embed(provider, model_quotes))
    G = np.column_stack(embed(provider, list(ground_truth.quotes)))

    q_request = q if q is not None else DEFAULT_MAX_Q
    basis_m = pca_basis(M, q_request, center=center)
    basis_g = pca_basis(G, q_request, center=center)
    angles = canonical_angles(basis_m, basis_g)
    r_eff = r if r is not None else len(angles.cosines)
    return subspace_score(angles, r_eff)
