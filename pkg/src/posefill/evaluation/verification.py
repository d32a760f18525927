"""Embedding-based identity verification at an equal-error-rate threshold."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..datagen.align import align_face
from ..datagen.manifest import DatasetManifest
from ..errors import CalibrationError
from ..imgio import load_image


@dataclass(frozen=True)
class VerificationResult:
    pair_id: str
    cosine_similarity: float
    same: bool
    threshold: float


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def eer_threshold(same_scores: np.ndarray, diff_scores: np.ndarray) -> float:
    """Threshold where false-accept and false-reject rates meet.

    Candidates are the observed scores; ties break toward the lower
    false-reject rate, then the lower threshold.
    """
    same_scores = np.asarray(same_scores, dtype=np.float64)
    diff_scores = np.asarray(diff_scores, dtype=np.float64)
    if same_scores.size == 0 or diff_scores.size == 0:
        raise CalibrationError("need both same-identity and cross-identity pairs")
    candidates = np.unique(np.concatenate([same_scores, diff_scores]))
    best = None
    for t in candidates:
        far = float(np.mean(diff_scores >= t))
        frr = float(np.mean(same_scores < t))
        key = (abs(far - frr), frr, t)
        if best is None or key < best[0]:
            best = (key, t)
    return float(best[1])


def verify_identity(embedder, img_a: np.ndarray, img_b: np.ndarray,
                    threshold: float, pair_id: str = "") -> VerificationResult:
    sim = cosine_similarity(embedder.embed(img_a), embedder.embed(img_b))
    return VerificationResult(pair_id=pair_id, cosine_similarity=sim,
                              same=sim >= threshold, threshold=threshold)


def split_embeddings(embedder, manifest: DatasetManifest, split: str = "test",
                     image_size: int | None = None):
    """Embed every record of a split; returns (vectors, identity labels)."""
    idx = manifest.split_indices(split)
    size = image_size or manifest.image_size
    vectors, labels = [], []
    for i in idx:
        rec = manifest.records[i]
        img = align_face(load_image(manifest.resolve_path(i)), rec.landmarks, size)
        vectors.append(embedder.embed(img))
        labels.append(rec.identity_id)
    return np.asarray(vectors), labels


def pair_scores(vectors: np.ndarray, labels: list[str]):
    same, diff = [], []
    n = len(labels)
    for i in range(n):
        for j in range(i + 1, n):
            score = cosine_similarity(vectors[i], vectors[j])
            (same if labels[i] == labels[j] else diff).append(score)
    return np.asarray(same), np.asarray(diff)


def calibrate_threshold(embedder, manifest: DatasetManifest, split: str = "test",
                        image_size: int | None = None) -> float:
    """EER threshold of cosine similarity over all split pairs."""
    vectors, labels = split_embeddings(embedder, manifest, split, image_size)
    if len(set(labels)) < 2:
        raise CalibrationError(f"{split} split has fewer than 2 identities")
    same, diff = pair_scores(vectors, labels)
    if same.size == 0:
        raise CalibrationError(f"{split} split has no same-identity pair")
    return eer_threshold(same, diff)
