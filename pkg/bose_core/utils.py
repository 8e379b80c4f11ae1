# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"""utils contains seeded random generators, named test instances and seed-stream derivation"""

from typing import Optional

import numpy as np
from scipy.stats import unitary_group

from .models import SdpInstance
from .sdp import make_instance


def seed_stream(seed: int, *key: int) -> np.random.Generator:
    """
    Returns a Philox generator for the stream addressed by ``key`` under the
    master ``seed``. Streams depend only on (seed, key), never on the order in
    which they are requested.

    Example:

    .. code:: python

        rng = bose_core.utils.seed_stream(0, 3, 1)  # iteration 3, component 1
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Hermitian matrix with complex Gaussian entries"""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * 0.5 * (g + g.conj().T)


def random_psd(
    d: int, rng: np.random.Generator, rank: Optional[int] = None, scale: float = 1.0
) -> np.ndarray:
    """PSD matrix G G† / d with G of shape (d, rank)"""
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    a = scale * (g @ g.conj().T) / d
    return 0.5 * (a + a.conj().T)


def random_density(d: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    a = random_psd(d, rng, rank)
    return a / np.trace(a).real


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary"""
    if d == 1:
        return np.exp(2j * np.pi * rng.uniform()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=rng)


def random_slater_instance(d: int, c: int, rng: np.random.Generator) -> SdpInstance:
    """
    Random instance with a strictly feasible primal point (so Slater holds and
    the dual optimum is attained) and H ≻ 0 (so mu = 0 is strictly dual
    feasible)
    """
    x0 = random_density(d, rng) + np.eye(d) / d
    x0 = x0 / np.trace(x0).real
    H = random_psd(d, rng) + 0.5 * np.eye(d)
    Q = [np.eye(d)] + [random_hermitian(d, rng) for _ in range(c - 1)]
    q = [float(np.trace(m @ x0).real) for m in Q]
    return make_instance(H, Q, q)


def inst_a() -> SdpInstance:
    """d=2, H=diag(1,2), Q=I, q=1. E = 1 at mu* = 1."""
    return make_instance(np.diag([1.0, 2.0]), [np.eye(2)], [1.0])


def inst_b() -> SdpInstance:
    """d=2, H=diag(1,2), Q=diag(1,0), q=1. E = 1."""
    return make_instance(np.diag([1.0, 2.0]), [np.diag([1.0, 0.0])], [1.0])
