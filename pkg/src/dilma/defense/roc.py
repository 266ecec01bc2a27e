from collections.abc import Sequence

import numpy as np
from sklearn.metrics import roc_auc_score

from dilma.errors import DilmaErrorCodes, dilma_error


def roc_auc(scores: Sequence[float] | np.ndarray, labels: Sequence[int] | np.ndarray) -> float:
    """Probability that a random positive outranks a random negative; ties count one half."""
    labels = np.asarray(labels)
    if len(np.unique(labels)) != 2:
        raise dilma_error(DilmaErrorCodes.INSUFFICIENT_DATA, "ROC AUC needs both labels present")
    return float(roc_auc_score(labels, np.asarray(scores, dtype=np.float64)))
