"""Binary Gaussian-kernel SVM trained by sequential minimal optimisation.

The dual  min 1/2 a'Qa - e'a  s.t.  0 <= a_i <= C, y'a = 0  with
Q_ij = y_i y_j exp(-gamma ||x_i - x_j||^2) is solved two coordinates at a
time. Each step picks the maximal violating pair (first-order working set
selection), updates it in closed form and stops once the KKT violation
falls below ``tol`` or after ``max_iter`` steps. Index ties resolve to the
lowest index, so training is a deterministic function of the inputs.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

TAU = 1e-12


def gaussian_kernel(X: np.ndarray, Y: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * cdist(X, Y, "sqeuclidean"))


def default_gamma(features: np.ndarray) -> float:
    var = float(np.asarray(features, dtype=np.float64).var())
    return 1.0 / (features.shape[1] * var) if var > 0 else 1.0


class KernelClassifier:
    def __init__(self, support, coef, rho, gamma, classes, iterations, converged):
        self.support = support
        self.coef = coef
        self.rho = rho
        self.gamma = gamma
        self.classes = classes
        self.iterations = iterations
        self.converged = converged

    def decision_function(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if not len(self.coef):
            return np.full(len(X), -self.rho)
        return gaussian_kernel(X, self.support, self.gamma) @ self.coef - self.rho

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        f = self.decision_function(X)
        labels = np.where(f > 0, self.classes[1], self.classes[0])
        return labels[0] if single else labels


def train_kernel_classifier(features, labels, gamma: float | None = None, C: float = 1.0,
                            tol: float = 1e-3, max_iter: int = 100_000) -> KernelClassifier:
    X = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    if X.ndim != 2 or len(X) != len(labels):
        raise ValueError("features must be (n, d) with one label per row")
    classes = np.unique(labels)
    if len(classes) != 2:
        raise ValueError(f"need exactly two classes, got {len(classes)}")
    y = np.where(labels == classes[1], 1.0, -1.0)
    if min((y > 0).sum(), (y < 0).sum()) < 2:
        raise ValueError("need at least 2 examples per class")
    if C <= 0:
        raise ValueError("C must be positive")
    gamma = default_gamma(X) if gamma is None else gamma
    if gamma <= 0:
        raise ValueError("gamma must be positive")

    K = gaussian_kernel(X, X, gamma)
    n = len(y)
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of the dual objective, Q a - e
    it = 0
    converged = False
    while it < max_iter:
        yG = -y * G
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        i = int(np.argmax(np.where(up, yG, -np.inf)))
        j = int(np.argmin(np.where(low, yG, np.inf)))
        if yG[i] - yG[j] < tol:
            converged = True
            break
        it += 1
        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(K[i, i] + K[j, j] - 2 * K[i, j], TAU)
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, diff
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, C - diff
            elif alpha[j] > C:
                alpha[j], alpha[i] = C, C + diff
        else:
            quad = max(K[i, i] + K[j, j] - 2 * K[i, j], TAU)
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, total - C
            elif alpha[j] < 0:
                alpha[j], alpha[i] = 0.0, total
            if total > C:
                if alpha[j] > C:
                    alpha[j], alpha[i] = C, total - C
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, total
        G += y * (y[i] * (alpha[i] - ai) * K[:, i] + y[j] * (alpha[j] - aj) * K[:, j])

    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yG[free].mean())
    else:
        at_upper = alpha >= C
        ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
        lb_mask = ~ub_mask
        ub = yG[ub_mask].min() if ub_mask.any() else np.inf
        lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
        rho = float((ub + lb) / 2)
    sv = alpha > 0
    return KernelClassifier(X[sv], alpha[sv] * y[sv], rho, gamma, classes, it, converged)
