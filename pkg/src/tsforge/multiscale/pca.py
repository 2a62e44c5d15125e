"""Principal component analysis with a deterministic Jacobi eigensolver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ModelStateError, ParameterError, RankError, ShapeError

MAX_COMPONENTS = 5
_RANK_TOL = 1e-12


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Tournament schedule: n-1 rounds of disjoint index pairs covering all pairs."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= 0 and q >= 0:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(a, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Each round of a sweep applies a set of disjoint rotations at once.  A
    pivot is skipped once it is negligible against its diagonal pair; the
    iteration ends after a sweep without rotations.  Returns
    ``(eigenvalues, eigenvectors)`` sorted by descending eigenvalue,
    eigenvectors as columns.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    a = (a + a.T) / 2.0
    v = np.eye(n)
    schedule = [
        (np.array([pq[0] for pq in pairs], dtype=np.intp), np.array([pq[1] for pq in pairs], dtype=np.intp))
        for pairs in _round_robin(n) if pairs
    ]
    eps = np.finfo(float).eps
    floor = np.finfo(float).tiny / eps
    for _ in range(max_sweeps):
        rotated = False
        for p, q in schedule:
            apq = a[p, q]
            app, aqq = a[p, p], a[q, q]
            active = np.abs(apq) > np.maximum(eps * np.sqrt(np.abs(app * aqq)), floor)
            if not active.any():
                continue
            rotated = True
            p, q, apq, app, aqq = p[active], q[active], apq[active], app[active], aqq[active]
            # t = tan of the rotation angle, smaller root; written to avoid overflowing theta**2
            diff = aqq - app
            big = np.abs(diff) > np.abs(apq) * 1e150
            safe_diff = np.where(big, 1.0, diff)
            theta = safe_diff / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(big, apq / np.where(big, diff, 1.0), t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp, rq = a[p, :], a[q, :]
            a[p, :], a[q, :] = c[:, None] * rp - s[:, None] * rq, s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p], a[:, q]
            a[:, p], a[:, q] = cp * c - cq * s, cp * s + cq * c
            vp, vq = v[:, p], v[:, q]
            v[:, p], v[:, q] = vp * c - vq * s, vp * s + vq * c
        if not rotated:
            break
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def _fix_signs(loadings: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(loadings), axis=1)
    signs = np.sign(loadings[np.arange(len(loadings)), idx])
    signs[signs == 0] = 1.0
    return loadings * signs[:, None]


def _gram(z: np.ndarray) -> np.ndarray:
    # einsum without BLAS keeps the summation order fixed
    return np.einsum("ik,jk->ij", z, z, optimize=False)


@dataclass(frozen=True)
class PcaModel:
    """Fitted projection ``score = loadings @ ((v - mean) / scales)``."""

    mean: np.ndarray
    scales: np.ndarray
    loadings: np.ndarray
    normalized: bool
    eigenvalues: np.ndarray

    @property
    def dimension(self) -> int:
        return self.mean.size

    @property
    def n_components(self) -> int:
        return self.loadings.shape[0]

    def standardize(self, rows) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        if rows.shape[-1] != self.dimension:
            raise ShapeError(
                f"PCA model was fitted on dimension {self.dimension}, got {rows.shape[-1]}"
            )
        return (rows - self.mean) / self.scales

    def transform(self, rows) -> np.ndarray:
        """Scores for one vector (shape (s_d,)) or a matrix of rows (shape (n, s_d))."""
        return self.standardize(rows) @ self.loadings.T

    def reconstruct(self, scores) -> np.ndarray:
        return np.asarray(scores) @ self.loadings * self.scales + self.mean

    def to_dict(self) -> dict:
        return {
            "type": "pca",
            "mean": self.mean.tolist(),
            "scales": self.scales.tolist(),
            "loadings": self.loadings.tolist(),
            "normalized": self.normalized,
            "eigenvalues": self.eigenvalues.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PcaModel":
        if d.get("type") != "pca":
            raise ModelStateError(f"not a PCA model record: {d.get('type')!r}")
        return cls(
            mean=np.asarray(d["mean"], dtype=float),
            scales=np.asarray(d["scales"], dtype=float),
            loadings=np.asarray(d["loadings"], dtype=float).reshape(-1, len(d["mean"])),
            normalized=bool(d["normalized"]),
            eigenvalues=np.asarray(d["eigenvalues"], dtype=float),
        )


def fit_pca(rows, s_d: int, normalize: bool = False) -> PcaModel:
    """Fit the top ``s_d`` principal axes of the training rows.

    Works on the d x d covariance, or on the n x n Gram matrix when there are
    fewer rows than dimensions.  Each loading has its largest-magnitude entry
    positive.
    """
    x = np.asarray(rows, dtype=float)
    if x.ndim != 2:
        raise ShapeError(f"expected a 2-D training matrix, got shape {x.shape}")
    n, d = x.shape
    if n < 2:
        raise RankError("PCA needs at least 2 training rows")
    if np.isnan(x).any():
        raise ParameterError("PCA training data contains NaN")
    if int(s_d) != s_d or s_d < 1:
        raise ParameterError(f"number of components must be a positive integer, got {s_d}")
    s_d = int(s_d)
    if s_d > min(n - 1, d):
        raise RankError(
            f"{s_d} components requested but {n} rows of dimension {d} support at most {min(n - 1, d)}"
        )
    mean = x.mean(axis=0)
    if normalize:
        scales = np.sqrt(((x - mean) ** 2).mean(axis=0))
        scales[scales == 0] = 1.0
    else:
        scales = np.ones(d)
    z = (x - mean) / scales
    if d <= n:
        w, vecs = jacobi_eigh(_gram(z.T) / n)
        w, loadings = w[:s_d], vecs[:, :s_d].T
    else:
        w, u = jacobi_eigh(_gram(z) / n)
        w = w[:s_d]
        proj = u[:, :s_d].T @ z
        norms = np.sqrt(np.sum(proj * proj, axis=1))
        loadings = proj / np.where(norms > 0, norms, 1.0)[:, None]
    top = w[0] if w.size else 0.0
    if not top > 0 or np.any(w <= _RANK_TOL * top):
        raise RankError(f"training data rank is too low for {s_d} components (eigenvalues {w})")
    return PcaModel(mean, scales, _fix_signs(loadings), bool(normalize), w)


def pca_transform_channels(channels, model: PcaModel) -> np.ndarray:
    """Project the S-vector of channel values at every sample.

    ``channels`` is an S x K array for one record; returns 2 x K (second row
    zero when the model has a single component).
    """
    c = np.asarray(channels, dtype=float)
    if c.ndim != 2 or c.shape[0] != model.dimension:
        raise ShapeError(f"expected {model.dimension} channels, got shape {c.shape}")
    scores = model.transform(c.T).T
    out = np.zeros((2, c.shape[1]))
    out[: min(2, scores.shape[0])] = scores[:2]
    return out
