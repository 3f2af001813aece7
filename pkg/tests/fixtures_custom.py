"""Holomorphic callbacks for custom-equilibrium tests (importable as module:function)."""
import math

import numpy as np


def gaussian(z):
    z = np.asarray(z, dtype=complex)
    return np.exp(-z * z)


def two_stream(z):
    # symmetric pair of beams at +-2; its density has a dip at 0 and is Penrose-unstable
    z = np.asarray(z, dtype=complex)
    return 0.5 * (np.exp(-(z - 2) ** 2) + np.exp(-(z + 2) ** 2)) / math.sqrt(math.pi)


def two_stream_prime(z):
    z = np.asarray(z, dtype=complex)
    return -((z - 2) * np.exp(-(z - 2) ** 2) + (z + 2) * np.exp(-(z + 2) ** 2)) / math.sqrt(math.pi)
