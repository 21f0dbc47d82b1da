"""
Diagonal Gaussian mixture models for synthesizing query candidates.

Fitting runs scikit-learn's EM one iteration at a time on standardized
data so the log-likelihood trace is available; the regularization added to
every variance is the variance floor in standardized units.
"""
import logging
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.mixture import GaussianMixture

from apps.core.exceptions import DimensionMismatchError, EmptyComponentError, ParameterError
from apps.core.presets import WORKLOAD_DEFAULTS
from apps.dataset.types import VectorSet

logger = logging.getLogger(__name__)

# A component holding less total responsibility than this is empty
EMPTY_MASS = 1e-3

# Rows per block when scoring Mahalanobis distances
SCORE_BLOCK = 4096


@dataclass(frozen=True, eq=False)
class GmmModel:
    """
    Mixture of diagonal Gaussians in data coordinates.

    log_likelihood holds the mean per-sample log-likelihood after each EM
    iteration (standardized coordinates).
    """
    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    log_likelihood: tuple[float, ...] = ()
    converged: bool = False
    reseeded: tuple[int, ...] = ()

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        if abs(weights.sum() - 1.0) > 1e-9:
            weights = weights / weights.sum()
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'means', np.asarray(self.means, dtype=np.float64))
        object.__setattr__(self, 'covariances', np.asarray(self.covariances, dtype=np.float64))
        if self.means.shape != self.covariances.shape or self.means.shape[0] != weights.size:
            raise ParameterError("Inconsistent mixture parameter shapes")
        if (self.covariances <= 0).any():
            raise ParameterError("Mixture variances must be positive")

    @property
    def n_components(self) -> int:
        return self.weights.size

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def mean(self) -> np.ndarray:
        """Mean of the mixture."""
        return self.weights @ self.means


def _standardize(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    sd[sd == 0] = 1.0
    return (x - mu) / sd, mu, sd


def _em_step(gm: GaussianMixture, z: np.ndarray) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', ConvergenceWarning)
        gm.fit(z)
    return float(gm.lower_bound_)


def _reseed(gm: GaussianMixture, z: np.ndarray, empty: np.ndarray) -> None:
    """Move empty components onto the points farthest from every component."""
    taken: set[int] = set()
    for j in np.flatnonzero(empty):
        score = _nearest_mahalanobis(z, gm.means_, gm.covariances_)
        if taken:
            score[list(taken)] = -np.inf
        far = int(np.argmax(score))
        taken.add(far)
        gm.means_[j] = z[far]
        gm.covariances_[j] = 1.0
        gm.weights_[j] = 1.0 / z.shape[0]
    gm.weights_ /= gm.weights_.sum()
    gm.precisions_cholesky_ = 1.0 / np.sqrt(gm.covariances_)


def gmm_fit(data: VectorSet, n_components: int = WORKLOAD_DEFAULTS['components'],
            max_iter: int = WORKLOAD_DEFAULTS['max_iter'], tol: float = WORKLOAD_DEFAULTS['tol'],
            seed: int = 0, variance_floor: float = WORKLOAD_DEFAULTS['variance_floor']) -> GmmModel:
    """
    EM fit with diagonal covariances and k-means++ initialization.

    Stops when the log-likelihood gains less than tol or after max_iter
    iterations. A component that ends up empty is moved to the farthest
    point once; if any component is still empty afterwards the fit fails.

    Raises:
        EmptyComponentError: a component stayed empty after reseeding
    """
    if not 1 <= n_components <= data.count:
        raise ParameterError(f"Need 1 <= n_components <= {data.count}, got {n_components}")
    z, mu, sd = _standardize(data.data.astype(np.float64))
    gm = GaussianMixture(
        n_components=n_components,
        covariance_type='diag',
        init_params='k-means++',
        reg_covar=variance_floor,
        max_iter=1,
        warm_start=True,
        random_state=seed,
    )

    trace: list[float] = []
    reseeded: list[int] = []
    converged = False
    for _ in range(2):
        converged = False
        while len(trace) < max_iter:
            trace.append(_em_step(gm, z))
            if len(trace) > 1 and trace[-1] - trace[-2] < tol:
                converged = True
                break
        empty = gm.weights_ * z.shape[0] < EMPTY_MASS
        if not empty.any():
            break
        if reseeded:
            raise EmptyComponentError(f"Components {np.flatnonzero(empty).tolist()} stayed empty")
        reseeded = np.flatnonzero(empty).tolist()
        logger.warning(f"Reseeding empty mixture components {reseeded}")
        _reseed(gm, z, empty)
        max_iter += max_iter

    logger.info(
        f"Fitted {n_components}-component GMM in {len(trace)} iterations "
        f"(log-likelihood {trace[-1]:.4f})"
    )
    return GmmModel(
        weights=gm.weights_.copy(),
        means=gm.means_ * sd + mu,
        covariances=np.maximum(gm.covariances_, variance_floor) * sd ** 2,
        log_likelihood=tuple(trace),
        converged=converged,
        reseeded=tuple(reseeded),
    )


def gmm_sample(model: GmmModel, n: int, seed: int = 0) -> VectorSet:
    """Component by weight, then a diagonal Gaussian draw; deterministic per seed."""
    if n < 1:
        raise ParameterError(f"Sample size must be positive, got {n}")
    rng = np.random.default_rng(seed)
    comps = rng.choice(model.n_components, size=n, p=model.weights)
    noise = rng.standard_normal((n, model.dim))
    samples = model.means[comps] + noise * np.sqrt(model.covariances[comps])
    return VectorSet(samples.astype(np.float32))


def _nearest_mahalanobis(x: np.ndarray, means: np.ndarray, covariances: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape[0])
    inv = 1.0 / covariances
    for s in range(0, x.shape[0], SCORE_BLOCK):
        block = x[s:s + SCORE_BLOCK]
        # (rows, components) squared distances under each component's diagonal metric
        d2 = (block ** 2) @ inv.T - 2.0 * block @ (means * inv).T + (means ** 2 * inv).sum(axis=1)
        out[s:s + SCORE_BLOCK] = np.sqrt(np.maximum(d2.min(axis=1), 0.0))
    return out


def _summary(values: np.ndarray) -> dict:
    p50, p90, p99 = np.percentile(values, [50, 90, 99])
    return {'mean': float(values.mean()), 'p50': float(p50), 'p90': float(p90), 'p99': float(p99)}


def mahalanobis_report(model: GmmModel, samples: VectorSet, reference: VectorSet) -> dict:
    """
    Distance of every vector to its nearest component, summarized for the
    samples and the reference set. Informational only.
    """
    for vs in (samples, reference):
        if vs.dim != model.dim:
            raise DimensionMismatchError(f"Model has dim {model.dim}, vectors have {vs.dim}")
    s = _nearest_mahalanobis(samples.data.astype(np.float64), model.means, model.covariances)
    r = _nearest_mahalanobis(reference.data.astype(np.float64), model.means, model.covariances)
    report = {'samples': _summary(s), 'reference': _summary(r)}
    report['p50_difference'] = abs(report['samples']['p50'] - report['reference']['p50'])
    return report
