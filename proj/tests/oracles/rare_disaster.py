#!/usr/bin/env python3
"""H* for the disaster calibration and the price-dividend ratio when resilience
mean-reverts instantly, where the system collapses to a scalar geometric sum."""
import numpy as np
from mpmath import mp, mpf, exp, sqrt

mp.dps = 30
P, BREC, GAMMA = mpf("0.0363"), mpf("0.66"), mpf(4)
DELTA, G = mpf("0.0657"), mpf("0.025")

if __name__ == "__main__":
    h_star = P * (BREC ** (1 - GAMMA) - 1)
    print("h_star", mp.nstr(h_star, 17))
    kappa = exp(-DELTA + G)
    print("kappa", mp.nstr(kappa, 17))
    print("kappa*(1+H*)", mp.nstr(kappa * (1 + h_star), 17))
