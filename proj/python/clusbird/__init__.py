"""Model-based clustering of multivariate binary data.

Clusters are placed in a low-dimensional subspace through a logit link; an
L1 penalty on the variable loadings drives uninformative variables out of the
subspace. The heavy lifting lives in the compiled `_clusbird` extension; this
package just re-exports it.
"""

from ._clusbird import (
    FitReport,
    ModelParams,
    ValidationError,
    adjusted_rand_index,
    estimate_scores,
    fit,
    load_csv,
    load_model,
    save_model,
    select_lambda,
    simulate,
    support_recovery,
    write_csv,
)

__all__ = [
    "FitReport",
    "ModelParams",
    "ValidationError",
    "adjusted_rand_index",
    "estimate_scores",
    "fit",
    "load_csv",
    "load_model",
    "save_model",
    "select_lambda",
    "simulate",
    "support_recovery",
    "write_csv",
]
