from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DatasetError


@dataclass
class Dataset:
    """A (x, y, sigma) series sorted by x.

    When ``sigma`` is omitted unit weights are substituted and
    :attr:`unweighted` is set; fits then rely on the reduced chi^2 to scale
    the covariance.
    """

    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray | None = None
    meta: dict = field(default_factory=dict)
    unweighted: bool = False

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).ravel()
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.x.shape != self.y.shape:
            raise DatasetError("x and y must have the same length")
        if self.sigma is None:
            self.sigma = np.ones_like(self.y)
            self.unweighted = True
        else:
            self.sigma = np.broadcast_to(np.asarray(self.sigma, dtype=float), self.y.shape).copy()
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise DatasetError("dataset contains non-finite values")
        if np.any(~(self.sigma > 0)):
            raise DatasetError("all sigma values must be > 0")
        order = np.argsort(self.x, kind="stable")
        self.x, self.y, self.sigma = self.x[order], self.y[order], self.sigma[order]
        if np.any(np.diff(self.x) <= 0):
            raise DatasetError("x values must be distinct")

    def __len__(self) -> int:
        return len(self.x)

    @property
    def x_unit(self) -> str | None:
        return self.meta.get("x_unit")

    @property
    def y_unit(self) -> str | None:
        return self.meta.get("y_unit")
