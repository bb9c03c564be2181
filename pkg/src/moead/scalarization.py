"""Scalar aggregation functions and objective scaling.

All functions broadcast over leading axes: ``Y`` and ``W`` only need to
agree on the last (objective) axis, so the same code scores one point per
subproblem or every candidate against every subproblem.
"""

from __future__ import annotations

import numpy as np

EPS_AWT = 1e-4
DEGENERATE_RANGE = 1e-16


def update_reference_points(Y_new, z_hat=None, Y_current=None):
    """Fold newly evaluated objectives into the ideal/nadir estimates.

    ``z_hat`` is the running componentwise minimum over everything seen.
    The nadir estimate is the componentwise maximum of ``Y_current`` (the
    current incumbents plus candidates); it defaults to ``Y_new``.
    """
    Y_new = np.atleast_2d(np.asarray(Y_new, dtype=float))
    if Y_new.size == 0:
        raise ValueError("no objective vectors to update reference points from")
    if not np.all(np.isfinite(Y_new)):
        raise ValueError("non-finite objective values")
    lo = Y_new.min(axis=0)
    z_hat = lo if z_hat is None else np.minimum(z_hat, lo)
    Y_cur = Y_new if Y_current is None else np.atleast_2d(np.asarray(Y_current, dtype=float))
    z_tilde = Y_cur.max(axis=0)
    return z_hat, z_tilde


def scale_objectives(Y, z_hat, z_tilde):
    Y = np.asarray(Y, dtype=float)
    span = np.asarray(z_tilde, dtype=float) - np.asarray(z_hat, dtype=float)
    flat = span < DEGENERATE_RANGE
    out = (Y - z_hat) / np.where(flat, 1.0, span)
    return np.where(flat, 0.0, out)


def scaling_none(Y, z_hat, z_tilde):
    return Y, z_hat, z_tilde


def scaling_simple(Y, z_hat, z_tilde):
    n_f = np.shape(z_hat)[-1]
    return scale_objectives(Y, z_hat, z_tilde), np.zeros(n_f), np.ones(n_f)


def _check(Y, W):
    Y = np.asarray(Y, dtype=float)
    W = np.asarray(W, dtype=float)
    if Y.shape[-1] != W.shape[-1]:
        raise ValueError(f"objective count mismatch: Y has {Y.shape[-1]}, weights have {W.shape[-1]}")
    return Y, W


def scalarize_ws(Y, W, z):
    Y, W = _check(Y, W)
    return np.sum(W * (Y - z), axis=-1)


def scalarize_wt(Y, W, z):
    Y, W = _check(Y, W)
    return np.max(W * (Y - z), axis=-1)


def awt_weights(W, eps: float = EPS_AWT):
    """Normalized inverse of each weight row."""
    inv = 1.0 / (np.asarray(W, dtype=float) + eps)
    return inv / inv.sum(axis=-1, keepdims=True)


def scalarize_awt(Y, W, z, eps: float = EPS_AWT):
    Y, W = _check(Y, W)
    return np.max(awt_weights(W, eps) * (Y - z), axis=-1)


def _unit_rows(W):
    norm = np.linalg.norm(W, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("weight vector with zero norm")
    return W / norm


def scalarize_pbi(Y, W, z, theta: float = 5.0):
    Y, W = _check(Y, W)
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    u = _unit_rows(W)
    D = Y - z
    d1 = np.abs(np.sum(D * u, axis=-1))
    d2 = np.linalg.norm(D - d1[..., None] * u, axis=-1)
    return d1 + theta * d2


def scalarize_ipbi(Y, W, z_tilde, theta: float = 5.0):
    """Inverted PBI, written as a minimization (``theta*d2 - d1``)."""
    Y, W = _check(Y, W)
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    u = _unit_rows(W)
    D = z_tilde - Y
    d1 = np.abs(np.sum(D * u, axis=-1))
    d2 = np.linalg.norm(D - d1[..., None] * u, axis=-1)
    return theta * d2 - d1


# registry adapters: uniform (Y, W, z_hat, z_tilde, **params) signature

def _ws(Y, W, z_hat, z_tilde):
    return scalarize_ws(Y, W, z_hat)


def _wt(Y, W, z_hat, z_tilde):
    return scalarize_wt(Y, W, z_hat)


def _awt(Y, W, z_hat, z_tilde, eps=EPS_AWT):
    return scalarize_awt(Y, W, z_hat, eps)


def _pbi(Y, W, z_hat, z_tilde, theta=5.0):
    return scalarize_pbi(Y, W, z_hat, theta)


def _ipbi(Y, W, z_hat, z_tilde, theta=5.0):
    return scalarize_ipbi(Y, W, z_tilde, theta)


BUILTIN = {"ws": _ws, "wt": _wt, "awt": _awt, "pbi": _pbi, "ipbi": _ipbi}
SCALING = {"none": scaling_none, "simple": scaling_simple}
