"""Compiled inner loops for ansatz preparation and reverse-mode gradients.

Single-string exponentials dominate the optimizer runtime: every cost or
gradient evaluation sweeps the whole ansatz over the amplitude array.  The
numba versions here remove the per-operation Python dispatch; the module
falls back to equivalent numpy code when numba is unavailable, so results
never depend on which path runs.

Sign tables are int8 rows of (-1)^{popcount(c & z)} per generator; the
complex unit w = i^{popcount(x & z)} makes each encoded string exactly the
Hermitian product of its letters.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _exp_inplace(amps, x, w, sgn, alpha):
    """amps <- exp(-i alpha P) amps for one Hermitian string."""
    c = np.cos(alpha)
    s = np.sin(alpha)
    dim = amps.shape[0]
    if x == 0:
        for d in range(dim):
            amps[d] = amps[d] * (c - 1j * s * w * sgn[d])
    else:
        for a in range(dim):
            b = a ^ x
            if b > a:
                pa = amps[a]
                pb = amps[b]
                amps[a] = c * pa - 1j * s * w * sgn[b] * pb
                amps[b] = c * pb - 1j * s * w * sgn[a] * pa


@njit(cache=True)
def prepare_inplace(amps, xs, ws, sgns, coeffs, thetas):
    """Sequential exponentials, first operator applied first."""
    for k in range(thetas.shape[0]):
        _exp_inplace(amps, xs[k], ws[k], sgns[k], coeffs[k] * thetas[k])


@njit(cache=True)
def backward_gradients(psi, chi, xs, ws, sgns, coeffs, thetas, grads):
    """Reverse sweep filling grads[k] = 2 Im <chi_k|G_k|psi_k>.

    psi enters as the fully prepared state and chi as (cost operator) psi;
    both are walked back through the inverse exponentials in place.
    """
    n = thetas.shape[0]
    dim = psi.shape[0]
    for k in range(n - 1, -1, -1):
        x = xs[k]
        w = ws[k]
        sgn = sgns[k]
        acc = 0.0 + 0.0j
        for d in range(dim):
            e = d ^ x
            acc += np.conj(chi[d]) * (w * sgn[e] * psi[e])
        grads[k] = 2.0 * (coeffs[k] * acc).imag
        alpha = -coeffs[k] * thetas[k]
        _exp_inplace(psi, x, w, sgn, alpha)
        _exp_inplace(chi, x, w, sgn, alpha)


def prepare_inplace_numpy(amps, xs, ws, sgns, coeffs, thetas):
    """Numpy twin of prepare_inplace (used without numba and in tests)."""
    dim = amps.shape[0]
    idx = np.arange(dim)
    for k in range(len(thetas)):
        alpha = coeffs[k] * thetas[k]
        c, s = np.cos(alpha), np.sin(alpha)
        x = int(xs[k])
        scaled = ws[k] * sgns[k] * amps
        p_amps = scaled if x == 0 else scaled[idx ^ x]
        amps *= c
        amps -= 1j * s * p_amps


def backward_gradients_numpy(psi, chi, xs, ws, sgns, coeffs, thetas, grads):
    dim = psi.shape[0]
    idx = np.arange(dim)
    for k in range(len(thetas) - 1, -1, -1):
        x = int(xs[k])
        scaled = ws[k] * sgns[k] * psi
        op_psi = scaled if x == 0 else scaled[idx ^ x]
        grads[k] = 2.0 * (coeffs[k] * np.vdot(chi, op_psi)).imag
        minus = np.array([-thetas[k]])
        prepare_inplace_numpy(psi, xs[k : k + 1], ws[k : k + 1], sgns[k : k + 1],
                              coeffs[k : k + 1], minus)
        prepare_inplace_numpy(chi, xs[k : k + 1], ws[k : k + 1], sgns[k : k + 1],
                              coeffs[k : k + 1], minus)


if not HAVE_NUMBA:  # pragma: no cover
    prepare_inplace = prepare_inplace_numpy
    backward_gradients = backward_gradients_numpy
