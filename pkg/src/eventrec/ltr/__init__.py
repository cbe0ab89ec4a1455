"""LambdaMART learning to rank, written from scratch on numpy."""

from .lambdamart import (
    LambdaMartConfig,
    QueryGroup,
    TrainingSet,
    TreeEnsemble,
    dumps_model,
    load_model,
    loads_model,
    predict,
    save_model,
    train,
)
from .lambdas import compute_lambdas, delta_ndcg
from .tree import RegressionTree, fit_tree

__all__ = [
    "LambdaMartConfig",
    "QueryGroup",
    "RegressionTree",
    "TrainingSet",
    "TreeEnsemble",
    "compute_lambdas",
    "delta_ndcg",
    "dumps_model",
    "fit_tree",
    "load_model",
    "loads_model",
    "predict",
    "save_model",
    "train",
]
