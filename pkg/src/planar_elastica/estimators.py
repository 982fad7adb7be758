"""scikit-learn style wrappers around the curve functionals and the elastic flow.

A "sample" here is one closed curve, so ``X`` is a sequence of ``(n_i, 2)``
vertex arrays rather than a 2-D feature matrix.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .curves import (
    DiscreteCurve,
    elastic_energy,
    is_embedded,
    length,
    total_curvature,
    turning_number,
)
from .flow import FlowConfig, fit_circle, run


def check_curve(X) -> DiscreteCurve:
    """Validate one curve given as an ``(n, 2)`` array (n >= 3) or a DiscreteCurve."""
    if isinstance(X, DiscreteCurve):
        return X
    arr = check_array(X, dtype=np.float64, ensure_min_samples=3)
    if arr.shape[1] != 2:
        raise ValueError(f"a planar curve needs 2 columns, got {arr.shape[1]}")
    return DiscreteCurve(arr)


def check_curves(X) -> list:
    """Validate a batch of curves; a single ``(n, 2)`` array counts as one curve."""
    if isinstance(X, DiscreteCurve):
        return [X]
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [check_curve(X)]
    curves = [check_curve(x) for x in X]
    if not curves:
        raise ValueError("need at least one curve")
    return curves


class CurveDescriptor(TransformerMixin, BaseEstimator):
    """Map curves to rows of geometric functionals.

    Columns are given by ``features``; the default is length, elastic energy,
    their product, total curvature, turning number and an embedded flag.
    Stateless: ``fit`` only records the column names.
    """

    FEATURES = {
        "length": length,
        "energy": elastic_energy,
        "product": lambda c: elastic_energy(c) * length(c),
        "total_curvature": total_curvature,
        "turning_number": turning_number,
        "embedded": lambda c: float(is_embedded(c)),
    }

    def __init__(self, features=("length", "energy", "product", "total_curvature", "turning_number", "embedded")):
        self.features = features

    def fit(self, X, y=None):
        unknown = [f for f in self.features if f not in self.FEATURES]
        if unknown:
            raise ValueError(f"unknown features {unknown}; choose from {sorted(self.FEATURES)}")
        check_curves(X)
        self.feature_names_out_ = np.asarray(self.features, dtype=object)
        self.n_features_out_ = len(self.features)
        return self

    def transform(self, X):
        check_is_fitted(self, "feature_names_out_")
        curves = check_curves(X)
        return np.array([[self.FEATURES[f](c) for f in self.features] for c in curves], dtype=float)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_out_")
        return self.feature_names_out_


class ElasticFlow(TransformerMixin, BaseEstimator):
    """Elastic flow as a transformer: ``transform`` returns the flowed vertices.

    ``fit`` flows a single curve and keeps the run in ``state_``, with the
    final circle fit in ``center_`` and ``radius_``.  ``transform`` flows each
    curve it is given with the same settings.

    Parameters
    ----------
    mode : {"preserve", "penalized"}
    lam : float
        Length penalty for ``mode="penalized"``.
    dt, max_steps, record_every, monitor_every, redistribution, stop_tol
        Forwarded to :class:`~planar_elastica.flow.FlowConfig`.
    """

    def __init__(
        self,
        mode="preserve",
        lam=0.0,
        dt=None,
        max_steps=10_000,
        record_every=100,
        monitor_every=10,
        redistribution="every_step",
        stop_tol=None,
    ):
        self.mode = mode
        self.lam = lam
        self.dt = dt
        self.max_steps = max_steps
        self.record_every = record_every
        self.monitor_every = monitor_every
        self.redistribution = redistribution
        self.stop_tol = stop_tol

    def _config(self) -> FlowConfig:
        return FlowConfig(
            mode=self.mode,
            lam=self.lam,
            dt=self.dt,
            max_steps=self.max_steps,
            redistribution=self.redistribution,
            stop_tol=self.stop_tol,
            record_every=self.record_every,
            monitor_every=self.monitor_every,
        )

    def fit(self, X, y=None):
        c = check_curve(X)
        self.state_ = run(c, self._config())
        self.curve_ = self.state_.curve
        self.center_, self.radius_, self.circle_residual_ = fit_circle(self.curve_)
        self.history_ = [d.as_dict() for d in self.state_.history]
        return self

    def transform(self, X):
        config = self._config()
        if isinstance(X, np.ndarray) and X.ndim == 2 or isinstance(X, DiscreteCurve):
            return np.array(run(check_curve(X), config).curve.vertices)
        return [np.array(run(c, config).curve.vertices) for c in check_curves(X)]

    def fit_transform(self, X, y=None, **fit_params):
        return np.array(self.fit(X).curve_.vertices)
