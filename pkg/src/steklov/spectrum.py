from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Spectrum:
    """An ascending eigenvalue sequence (index k = 1, 2, ...) with metadata.

    ``kind`` names the problem (``"steklov"``, ``"dirichlet"``, ``"neumann"``,
    ``"robin"``, ...); ``meta`` holds provenance such as N, mu, asymmetry.
    """

    values: np.ndarray
    kind: str = "steklov"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("spectrum values must be one-dimensional")
        if v.size > 1 and np.any(np.diff(v) < -1e-12 * max(1.0, np.abs(v).max())):
            raise ValueError("spectrum values must be ascending")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __getitem__(self, k):
        """1-based access: ``spec[1]`` is the lowest eigenvalue."""
        if k < 1:
            raise IndexError("spectra are indexed from k = 1")
        return self.values[k - 1]

    def head(self, k_max):
        return Spectrum(self.values[:k_max], self.kind, dict(self.meta))
