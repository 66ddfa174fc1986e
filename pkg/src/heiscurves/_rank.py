"""Singular-value rank margins shared by frame construction and classification."""

import numpy as np

DEFAULT_RANK_TOL = 1e-8


def complex_rank_margin(columns: np.ndarray) -> np.ndarray:
    """``sigma_k / max(sigma_1, 1)`` of complex ``(..., n, k)`` matrices.

    Zero when the k columns are linearly dependent over C.
    """
    columns = np.asarray(columns, dtype=complex)
    k = columns.shape[-1]
    if k > columns.shape[-2]:
        return np.zeros(columns.shape[:-2])
    sv = np.linalg.svd(columns, compute_uv=False)
    return sv[..., k - 1] / np.maximum(sv[..., 0], 1.0)


def totally_real_margin(columns: np.ndarray) -> np.ndarray:
    """``sigma_2k / max(sigma_1, 1)`` of the real matrix ``[v_1..v_k, Jv_1..Jv_k]``.

    ``columns`` holds the v_i as complex ``(..., n, k)`` arrays; J is
    multiplication by i.
    """
    columns = np.asarray(columns, dtype=complex)
    both = np.concatenate([columns, 1j * columns], axis=-1)
    real = np.concatenate([both.real, both.imag], axis=-2)
    k2 = real.shape[-1]
    if k2 > real.shape[-2]:
        return np.zeros(columns.shape[:-2])
    sv = np.linalg.svd(real, compute_uv=False)
    return sv[..., k2 - 1] / np.maximum(sv[..., 0], 1.0)
