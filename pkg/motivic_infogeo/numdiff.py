#!/usr/bin/env python3
"""
Central finite differences with one Richardson step

Default steps: 1e-5 for first derivatives, 1e-4 for second, 1e-3 for
third. Every stencil is a product of central differences, so the same
code handles coincident indices. Functions may return scalars or arrays;
derivative indices are appended as trailing axes.
"""

import itertools
from typing import Callable, Union

import numpy as np

ArrayFn = Callable[[np.ndarray], Union[float, complex, np.ndarray]]

FIRST_STEP = 1e-5
SECOND_STEP = 1e-4
THIRD_STEP = 1e-3


def _richardson(coarse, fine):
    return (4.0 * fine - coarse) / 3.0


def scaled_step(x, base: float) -> float:
    """base * max(|x|_inf, 1)"""
    x = np.asarray(x, dtype=float)
    return base * max(float(np.max(np.abs(x))) if x.size else 0.0, 1.0)


def _gradient_once(fn: ArrayFn, x: np.ndarray, h: float) -> np.ndarray:
    basis = np.eye(x.shape[0]) * h
    cols = [(np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2.0 * h) for e in basis]
    return np.stack(cols, axis=-1)


def gradient(fn: ArrayFn, x, step: float = FIRST_STEP) -> np.ndarray:
    """First partials; shape fn(x).shape + (n,)"""
    x = np.asarray(x, dtype=float)
    return _richardson(_gradient_once(fn, x, 2.0 * step), _gradient_once(fn, x, step))


def _hessian_once(fn: ArrayFn, x: np.ndarray, h: float) -> np.ndarray:
    n = x.shape[0]
    basis = np.eye(n) * h
    entries = {}
    for i in range(n):
        for j in range(i, n):
            entries[(i, j)] = (
                np.asarray(fn(x + basis[i] + basis[j]))
                - np.asarray(fn(x + basis[i] - basis[j]))
                - np.asarray(fn(x - basis[i] + basis[j]))
                + np.asarray(fn(x - basis[i] - basis[j]))
            ) / (4.0 * h * h)
    rows = [np.stack([entries[(min(i, j), max(i, j))] for j in range(n)], axis=-1) for i in range(n)]
    return np.stack(rows, axis=-2)


def hessian(fn: ArrayFn, x, step: float = SECOND_STEP) -> np.ndarray:
    """Second partials; shape fn(x).shape + (n, n)"""
    x = np.asarray(x, dtype=float)
    return _richardson(_hessian_once(fn, x, 2.0 * step), _hessian_once(fn, x, step))


def _third_once(fn: ArrayFn, x: np.ndarray, h: float) -> np.ndarray:
    n = x.shape[0]
    basis = np.eye(n) * h
    signs = list(itertools.product((1.0, -1.0), repeat=3))
    entries = {}
    for i, j, k in itertools.combinations_with_replacement(range(n), 3):
        total = 0.0
        for s1, s2, s3 in signs:
            total = total + s1 * s2 * s3 * np.asarray(
                fn(x + s1 * basis[i] + s2 * basis[j] + s3 * basis[k])
            )
        entries[(i, j, k)] = total / (8.0 * h**3)
    sample = next(iter(entries.values()))
    out = np.zeros(np.shape(sample) + (n, n, n), dtype=np.result_type(sample, float))
    for (i, j, k), val in entries.items():
        for a, b, c in set(itertools.permutations((i, j, k))):
            out[..., a, b, c] = val
    return out


def third_derivatives(fn: ArrayFn, x, step: float = THIRD_STEP) -> np.ndarray:
    """Fully symmetric third partials; shape fn(x).shape + (n, n, n)"""
    x = np.asarray(x, dtype=float)
    return _richardson(_third_once(fn, x, 2.0 * step), _third_once(fn, x, step))


def derivative(fn: Callable[[float], float], t: float = 0.0, step: float = FIRST_STEP) -> float:
    """d/dt fn at t for a function of one real variable"""
    coarse = (fn(t + 2.0 * step) - fn(t - 2.0 * step)) / (4.0 * step)
    fine = (fn(t + step) - fn(t - step)) / (2.0 * step)
    return _richardson(coarse, fine)
