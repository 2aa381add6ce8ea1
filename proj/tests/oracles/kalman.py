#!/usr/bin/env python3
"""Exact Gaussian log-likelihood of a short series under the AR(1)-plus-noise
model, computed from the full covariance matrix with scipy rather than by
recursion. Zero init: x_0 = 0 known. Stationary init: x_0 drawn from the
stationary law."""
import numpy as np
from scipy.stats import multivariate_normal

A, B, C, RHO = 0.01037, 0.03630, 0.01520, 0.64079
Y = np.array([0.012, -0.004, 0.031, 0.020, -0.015, 0.007, 0.044, 0.002,
              -0.021, 0.018, 0.009, 0.027])


def covariance(n, stationary):
    cov = np.zeros((n, n))
    for s in range(1, n + 1):
        for t in range(1, n + 1):
            lo = min(s, t)
            acc = sum(RHO ** (s - k) * RHO ** (t - k) for k in range(1, lo + 1)) * C * C
            if stationary:
                acc += RHO ** s * RHO ** t * C * C / (1 - RHO * RHO)
            cov[s - 1, t - 1] = acc
    return cov + B * B * np.eye(n)


if __name__ == "__main__":
    n = len(Y)
    for name, st in (("zero", False), ("stationary", True)):
        ll = multivariate_normal(mean=np.full(n, A), cov=covariance(n, st)).logpdf(Y)
        print(name, repr(float(ll)))
