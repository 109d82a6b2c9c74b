"""Seeded random instances: orthogonal bases, PSD matrices, unit directions."""

from typing import Sequence

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator per (seed, stream...) so trials can run in any order."""
    return np.random.default_rng([int(seed), *(int(s) for s in stream)])


def random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def psd_from_spectrum(q: np.ndarray, spectrum: Sequence[float]) -> np.ndarray:
    m = (q * np.asarray(spectrum, dtype=float)) @ q.T
    return 0.5 * (m + m.T)


def random_psd(rng: np.random.Generator, d: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
    """Symmetric PSD matrix with eigenvalues drawn uniformly from [low, high]."""
    spectrum = rng.uniform(low, high, size=d)
    return psd_from_spectrum(random_orthogonal(rng, d), spectrum)


def random_unit_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)
