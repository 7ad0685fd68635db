"""Normalization of sampled eigenvalues into fluctuation coordinates and the
predicted limiting covariance of several jointly-normalized eigenvalues.

Index conventions (all 1-based, matching x_1 < x_2 < ... < x_n):

  bulk: indices are the k_i themselves, ascending, with gap exponents
        theta_i tied to k_{i+1} - k_i ~ n^theta_i.
  edge: indices are offsets k_i from the top, ascending, so coordinate i
        normalizes eigenvalue number n - k_i; gaps carry exponents theta_i
        and the leading offset grows like n^gamma.

For finite n the exponents are defined as theta_i = log(k_{i+1} - k_i) / log n
(the asymptotic ~ relation has no finite-n content); they may also be
declared explicitly.
"""

from dataclasses import dataclass
from math import log

import numpy as np

from .errors import DomainError, ShapeError
from .semicircle import bulk_center_scale, edge_center_scale
from .spectra import SpectrumSample


@dataclass(frozen=True)
class IndexSpec:
    """Which eigenvalues to normalize jointly, and the declared growth
    exponents that drive the predicted covariance."""

    regime: str  # "bulk" or "edge"
    indices: tuple
    thetas: tuple = ()
    gamma: float = 0.0  # edge only

    def __post_init__(self):
        if self.regime not in ("bulk", "edge"):
            raise DomainError(f"regime must be 'bulk' or 'edge', got {self.regime!r}")
        idx = tuple(int(k) for k in self.indices)
        object.__setattr__(self, "indices", idx)
        if len(idx) < 1:
            raise ShapeError("at least one eigenvalue index required")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ShapeError(f"indices must be strictly increasing, got {idx}")
        th = tuple(float(t) for t in self.thetas)
        object.__setattr__(self, "thetas", th)
        if th and len(th) != len(idx) - 1:
            raise ShapeError(
                f"{len(idx)} indices need {len(idx) - 1} gap exponents, got {len(th)}"
            )
        if self.regime == "bulk":
            if any(not 0.0 < t <= 1.0 for t in th):
                raise DomainError(f"bulk gap exponents must lie in (0, 1], got {th}")
        else:
            if not 0.0 < self.gamma < 1.0:
                raise DomainError(f"edge regime needs gamma in (0, 1), got {self.gamma}")
            if any(not 0.0 < t < self.gamma for t in th):
                raise DomainError(
                    f"edge gap exponents must lie in (0, gamma={self.gamma}), got {th}"
                )

    @property
    def m(self):
        return len(self.indices)


def thetas_from_indices(indices, n):
    """Finite-n gap exponents theta_i = log(k_{i+1} - k_i) / log n."""
    idx = tuple(indices)
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ShapeError(f"indices must be strictly increasing, got {idx}")
    if n < 2:
        raise DomainError("need n >= 2 to define gap exponents")
    return tuple(log(b - a) / log(n) for a, b in zip(idx, idx[1:]))


def bulk_index_spec(indices, n):
    """IndexSpec for bulk indices with exponents inferred from the gaps."""
    idx = tuple(indices)
    thetas = thetas_from_indices(idx, n) if len(idx) > 1 else ()
    thetas = tuple(min(t, 1.0) for t in thetas)
    return IndexSpec(regime="bulk", indices=idx, thetas=thetas)


def edge_index_spec(indices, n):
    """IndexSpec for edge offsets with gamma and exponents inferred."""
    idx = tuple(indices)
    gamma = log(idx[0]) / log(n)
    thetas = thetas_from_indices(idx, n) if len(idx) > 1 else ()
    return IndexSpec(regime="edge", indices=idx, thetas=thetas, gamma=gamma)


@dataclass(frozen=True)
class FluctuationVector:
    """Normalized coordinates of one trial."""

    x: np.ndarray
    trial: int = 0

    def __post_init__(self):
        arr = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "x", arr)
        if not np.all(np.isfinite(arr)):
            raise DomainError("fluctuation coordinates must be finite")


def normalize_bulk(spectrum, spec: IndexSpec, beta):
    """X_i = (x_{k_i} - center_i) / scale_i with the bulk center/scale of
    each requested index."""
    if spec.regime != "bulk":
        raise DomainError("normalize_bulk requires a bulk IndexSpec")
    values = spectrum.values if isinstance(spectrum, SpectrumSample) else np.asarray(spectrum)
    trial = spectrum.trial if isinstance(spectrum, SpectrumSample) else 0
    n = values.size
    out = np.empty(spec.m)
    for i, k in enumerate(spec.indices):
        if not 1 <= k <= n:
            raise ShapeError(f"eigenvalue index {k} out of range 1..{n}")
        cs = bulk_center_scale(k, n, beta)
        out[i] = (values[k - 1] - cs.center) / cs.scale
    return FluctuationVector(x=out, trial=trial)


def normalize_edge(spectrum, spec: IndexSpec, beta):
    """X_i = (x_{n-k_i} - center_i) / scale_i with the edge center/scale for
    offset k_i from the top of the spectrum."""
    if spec.regime != "edge":
        raise DomainError("normalize_edge requires an edge IndexSpec")
    values = spectrum.values if isinstance(spectrum, SpectrumSample) else np.asarray(spectrum)
    trial = spectrum.trial if isinstance(spectrum, SpectrumSample) else 0
    n = values.size
    out = np.empty(spec.m)
    for i, k in enumerate(spec.indices):
        if not 1 <= k < n:
            raise ShapeError(f"edge offset {k} out of range 1..{n - 1}")
        cs = edge_center_scale(k, n, beta)
        out[i] = (values[n - k - 1] - cs.center) / cs.scale
    return FluctuationVector(x=out, trial=trial)


def normalize(spectrum, spec: IndexSpec, beta):
    if spec.regime == "bulk":
        return normalize_bulk(spectrum, spec, beta)
    return normalize_edge(spectrum, spec, beta)


def _max_theta(thetas, i, j):
    """max over theta_k for i <= k < j, with 1-based coordinate labels."""
    return max(thetas[k] for k in range(i - 1, j - 1))


def predicted_cov_bulk(spec: IndexSpec):
    """Limit covariance in the bulk: unit diagonal and
    Lambda_ij = 1 - max{theta_k : i <= k < j} for i < j."""
    if spec.regime != "bulk":
        raise DomainError("predicted_cov_bulk requires a bulk IndexSpec")
    m = spec.m
    if m > 1 and not spec.thetas:
        raise ShapeError("gap exponents required for m > 1")
    lam = np.eye(m)
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            lam[i - 1, j - 1] = lam[j - 1, i - 1] = 1.0 - _max_theta(spec.thetas, i, j)
    return lam


def predicted_cov_edge(spec: IndexSpec):
    """Limit covariance at the edge: unit diagonal and
    Lambda_ij = 1 - max{theta_k : i <= k < j} / gamma for i < j."""
    if spec.regime != "edge":
        raise DomainError("predicted_cov_edge requires an edge IndexSpec")
    m = spec.m
    if m > 1 and not spec.thetas:
        raise ShapeError("gap exponents required for m > 1")
    lam = np.eye(m)
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            lam[i - 1, j - 1] = lam[j - 1, i - 1] = (
                1.0 - _max_theta(spec.thetas, i, j) / spec.gamma
            )
    return lam


def predicted_cov(spec: IndexSpec):
    if spec.regime == "bulk":
        return predicted_cov_bulk(spec)
    return predicted_cov_edge(spec)
