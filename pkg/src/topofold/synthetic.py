"""Seeded synthetic scalar fields for tests and benchmarks."""

from __future__ import annotations

import numpy as np


def _unit_coords(shape):
    axes = [np.linspace(0.0, 1.0, n) for n in shape]
    return np.meshgrid(*axes, indexing="ij")


def ramp(shape, seed=None) -> np.ndarray:
    """Strictly increasing along every axis; only two critical points."""
    coords = np.indices(shape)
    weights = [(k + 1) for k in range(len(shape))]
    return sum(w * c for w, c in zip(weights, coords)).astype(np.float64)


def multi_bump(shape, seed=0, n_bumps=3, width=0.12) -> np.ndarray:
    """Sum of Gaussian bumps with random centers and heights in [0.5, 1]."""
    rng = np.random.default_rng(seed)
    coords = _unit_coords(shape)
    out = np.zeros(shape)
    for _ in range(n_bumps):
        c = rng.uniform(0.15, 0.85, size=len(shape))
        amp = rng.uniform(0.5, 1.0)
        r2 = sum((x - ci) ** 2 for x, ci in zip(coords, c))
        out += amp * np.exp(-r2 / (2 * width**2))
    return out


def uniform_noise(shape, seed=0) -> np.ndarray:
    return np.random.default_rng(seed).random(shape)


def bump_noise(shape, seed=0, n_bumps=3, noise=0.1) -> np.ndarray:
    """Multi-bump field plus uniform noise of amplitude ``noise``."""
    rng = np.random.default_rng(seed)
    base = multi_bump(shape, seed=int(rng.integers(1 << 31)), n_bumps=n_bumps)
    return base + noise * rng.random(shape)


GENERATORS = {
    "ramp": ramp,
    "multi-bump": multi_bump,
    "uniform-noise": uniform_noise,
    "bump-noise": bump_noise,
}


def generate(name: str, shape, seed=0) -> np.ndarray:
    try:
        gen = GENERATORS[name]
    except KeyError:
        raise ValueError(f"unknown synthetic dataset {name!r}; choose from {sorted(GENERATORS)}")
    return gen(tuple(shape), seed=seed)
