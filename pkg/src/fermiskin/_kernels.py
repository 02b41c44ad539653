"""Shared numerical kernels: the transverse permittivity family and batched
Gauss-Kronrod panel evaluation.

Everything here exists in two interchangeable execution paths: vectorized
numpy, and numba-compiled scalar loops. The path is chosen at call time
(see jit_enabled) so setting FERMISKIN_NO_JIT works even after import, and
so a missing numba degrades silently to the numpy path. Results agree to
rounding either way; benchmarks/kernel_paths.py measures the difference.

Conventions used throughout:
  * q is the wavevector scaled by omega_p/v_F, Om = omega/omega_p.
  * z = Om + i*zi, where zi carries both the collision rate and the sign
    of the frequency prescription. zi = 0 is the collisionless limit and
    needs an explicit branch choice for the logarithm, supplied by
    im_sign (+1 for the exp(-i omega t) convention, -1 for its mirror).
  * The small-argument series in q/z and the closed form are switched at
    |q/z| = 0.1 with a fixed 24-term tail, which keeps the crossover
    error below 1e-13 of the leading term.
"""

from __future__ import annotations

import cmath
import math
import os

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


JIT_ENV_VAR = "FERMISKIN_NO_JIT"


def jit_enabled() -> bool:
    """True when the numba path should be used for this call."""
    if not HAVE_NUMBA:
        return False
    return os.environ.get(JIT_ENV_VAR, "") in ("", "0")


# Kernel selector for the oscillatory integrand envelope.
KERNEL_RECIPROCAL = 0  # 1/D
KERNEL_IBP_EXACT = 1  # (2 D'^2 - D'' D)/D^3, i.e. (1/D)''
KERNEL_IBP_SECOND = 2  # eps''/D^2, curvature-only approximation
KERNEL_IBP_KOHN = 3  # near-singular approximation of eps'' over D^2

SERIES_SWITCH = 0.1
N_SERIES_TERMS = 24

_M = np.arange(N_SERIES_TERMS, dtype=np.float64)
# eps_tr = 1 - (3/(Om z)) sum_m (q/z)^(2m) / ((2m+1)(2m+3)), m = 0..23
SERIES_COEF = 1.0 / ((2.0 * _M + 1.0) * (2.0 * _M + 3.0))
_M1 = _M + 1.0
# term-by-term derivatives of the same series; index j holds m = j + 1
D1_COEF = 2.0 * _M1 / ((2.0 * _M1 + 1.0) * (2.0 * _M1 + 3.0))
D2_COEF = 2.0 * _M1 * (2.0 * _M1 - 1.0) / ((2.0 * _M1 + 1.0) * (2.0 * _M1 + 3.0))

# 15-point Kronrod extension of 7-point Gauss, QUADPACK values.
_XGK_HALF = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ]
)
_WGK_HALF = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084728184803383587039425,
    ]
)
_WG_HALF = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

# Full 15-node arrays in ascending order; the embedded Gauss nodes sit at
# the odd positions 1, 3, ..., 13.
XGK15 = np.concatenate((-_XGK_HALF[:-1], _XGK_HALF[::-1]))
WGK15 = np.concatenate((_WGK_HALF[:-1], _WGK_HALF[::-1]))
WG7 = np.array(
    [
        _WG_HALF[0],
        _WG_HALF[1],
        _WG_HALF[2],
        _WG_HALF[3],
        _WG_HALF[2],
        _WG_HALF[1],
        _WG_HALF[0],
    ]
)


# ---------------------------------------------------------------------------
# scalar kernels (numba path)
# ---------------------------------------------------------------------------


@njit(cache=True, error_model="numpy")
def _eps_tr_scalar(q, Om, zi, im_sign):
    z = complex(Om, zi)
    if abs(q) < SERIES_SWITCH * abs(z):
        w = q / z
        w2 = w * w
        s = 0.0 + 0.0j
        for j in range(N_SERIES_TERMS - 1, -1, -1):
            s = s * w2 + SERIES_COEF[j]
        return 1.0 - 3.0 / (Om * z) * s
    if zi == 0.0:
        # collisionless branch of Log((z-q)/(z+q)); the imaginary part is
        # the Landau-damping step, signed by the frequency prescription
        re = math.log(abs((Om - q) / (Om + q)))
        if abs(q) > Om:
            im = math.pi * im_sign * (1.0 if q > 0.0 else -1.0)
        else:
            im = 0.0
        L = complex(re, im)
    else:
        L = cmath.log((z - q) / (z + q))
    q2 = q * q
    return 1.0 - 3.0 / (4.0 * Om * q2 * q) * (2.0 * z * q + (z * z - q2) * L)


@njit(cache=True, error_model="numpy")
def _d1_scalar(q, Om, zi, im_sign):
    z = complex(Om, zi)
    if abs(q) < SERIES_SWITCH * abs(z):
        w = q / z
        w2 = w * w
        s = 0.0 + 0.0j
        for j in range(N_SERIES_TERMS - 1, -1, -1):
            s = s * w2 + D1_COEF[j]
        return -3.0 / (Om * z) * (q / (z * z)) * s
    if zi == 0.0:
        re = math.log(abs((Om - q) / (Om + q)))
        if abs(q) > Om:
            im = math.pi * im_sign * (1.0 if q > 0.0 else -1.0)
        else:
            im = 0.0
        L = complex(re, im)
    else:
        L = cmath.log((z - q) / (z + q))
    q2 = q * q
    return 3.0 / (4.0 * Om * q2 * q2) * (6.0 * z * q + (3.0 * z * z - q2) * L)


@njit(cache=True, error_model="numpy")
def _d2_scalar(q, Om, zi, im_sign):
    z = complex(Om, zi)
    if abs(q) < SERIES_SWITCH * abs(z):
        w = q / z
        w2 = w * w
        s = 0.0 + 0.0j
        for j in range(N_SERIES_TERMS - 1, -1, -1):
            s = s * w2 + D2_COEF[j]
        return -3.0 / (Om * z * z * z) * s
    if zi == 0.0:
        re = math.log(abs((Om - q) / (Om + q)))
        if abs(q) > Om:
            im = math.pi * im_sign * (1.0 if q > 0.0 else -1.0)
        else:
            im = 0.0
        L = complex(re, im)
    else:
        L = cmath.log((z - q) / (z + q))
    q2 = q * q
    z2 = z * z
    return -3.0 / (4.0 * Om * q2 * q2 * q) * (
        18.0 * z * q
        + 2.0 * z * q * (3.0 * z2 - q2) / (z2 - q2)
        + 2.0 * (6.0 * z2 - q2) * L
    )


@njit(cache=True, error_model="numpy")
def _d2_kohn_scalar(q, Om, zi, im_sign):
    # Keeps only the pole pair of eps_tr''; im_sign is unused because the
    # pole term carries no branch cut, but the signature stays uniform.
    z = complex(Om, zi)
    return -3.0 / (4.0 * Om * q * q * q) * ((z + q) / (z - q) - (z - q) / (z + q))


@njit(cache=True, error_model="numpy")
def _envelope_scalar(s, kernel_id, Om, zi, im_sign, bcoef, kappa):
    q = kappa * s
    e = _eps_tr_scalar(q, Om, zi, im_sign)
    D = e - bcoef * s * s
    if kernel_id == 0:
        return 1.0 / D
    if kernel_id == 2:
        return kappa * kappa * _d2_scalar(q, Om, zi, im_sign) / (D * D)
    if kernel_id == 3:
        return kappa * kappa * _d2_kohn_scalar(q, Om, zi, im_sign) / (D * D)
    e1 = _d1_scalar(q, Om, zi, im_sign)
    e2 = _d2_scalar(q, Om, zi, im_sign)
    Dp = kappa * e1 - 2.0 * bcoef * s
    Dpp = kappa * kappa * e2 - 2.0 * bcoef
    return (2.0 * Dp * Dp - Dpp * D) / (D * D * D)


@njit(cache=True, error_model="numpy")
def _grid_jit(q, which, Om, zi, im_sign):
    out = np.empty(q.shape[0], np.complex128)
    for i in range(q.shape[0]):
        if which == 0:
            out[i] = _eps_tr_scalar(q[i], Om, zi, im_sign)
        elif which == 1:
            out[i] = _d1_scalar(q[i], Om, zi, im_sign)
        elif which == 2:
            out[i] = _d2_scalar(q[i], Om, zi, im_sign)
        else:
            out[i] = _d2_kohn_scalar(q[i], Om, zi, im_sign)
    return out


@njit(cache=True, error_model="numpy")
def _envelope_jit(s, kernel_id, Om, zi, im_sign, bcoef, kappa):
    out = np.empty(s.shape[0], np.complex128)
    for i in range(s.shape[0]):
        out[i] = _envelope_scalar(s[i], kernel_id, Om, zi, im_sign, bcoef, kappa)
    return out


@njit(cache=True, error_model="numpy")
def _panel_batch_jit(lo, hi, phase, kernel_id, Om, zi, im_sign, bcoef, kappa):
    n = lo.shape[0]
    vals = np.empty(n, np.complex128)
    errs = np.empty(n, np.float64)
    for p in range(n):
        c = 0.5 * (lo[p] + hi[p])
        h = 0.5 * (hi[p] - lo[p])
        kr = 0.0 + 0.0j
        ga = 0.0 + 0.0j
        for j in range(15):
            s = c + h * XGK15[j]
            f = math.cos(phase * s) * _envelope_scalar(
                s, kernel_id, Om, zi, im_sign, bcoef, kappa
            )
            kr += WGK15[j] * f
            if j % 2 == 1:
                ga += WG7[(j - 1) // 2] * f
        vals[p] = h * kr
        errs[p] = abs(h * (kr - ga))
    return vals, errs


# ---------------------------------------------------------------------------
# vectorized kernels (numpy path)
# ---------------------------------------------------------------------------


def _log_branch_np(q, Om, zi, im_sign):
    if zi == 0.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            L = np.log(np.abs((Om - q) / (Om + q))).astype(np.complex128)
        L += 1j * math.pi * im_sign * np.sign(q) * (np.abs(q) > Om)
        return L
    z = complex(Om, zi)
    return np.log((z - q) / (z + q))


def _family_np(q, which, Om, zi, im_sign):
    q = np.asarray(q, dtype=np.float64)
    z = complex(Om, zi)
    out = np.empty(q.shape, dtype=np.complex128)
    small = np.abs(q) < SERIES_SWITCH * abs(z)
    if small.any():
        qs = q[small]
        w2 = (qs / z) ** 2
        coef = (SERIES_COEF, D1_COEF, D2_COEF, None)[which]
        if which == 3:
            out[small] = -3.0 / (4.0 * Om * qs**3) * (
                (z + qs) / (z - qs) - (z - qs) / (z + qs)
            )
        else:
            s = np.zeros(w2.shape, np.complex128)
            for j in range(N_SERIES_TERMS - 1, -1, -1):
                s = s * w2 + coef[j]
            if which == 0:
                out[small] = 1.0 - 3.0 / (Om * z) * s
            elif which == 1:
                out[small] = -3.0 / (Om * z) * (qs / (z * z)) * s
            else:
                out[small] = -3.0 / (Om * z**3) * s
    big = ~small
    if big.any():
        qb = q[big]
        q2 = qb * qb
        z2 = z * z
        with np.errstate(divide="ignore", invalid="ignore"):
            if which == 3:
                out[big] = -3.0 / (4.0 * Om * q2 * qb) * (
                    (z + qb) / (z - qb) - (z - qb) / (z + qb)
                )
            else:
                L = _log_branch_np(qb, Om, zi, im_sign)
                if which == 0:
                    out[big] = 1.0 - 3.0 / (4.0 * Om * q2 * qb) * (
                        2.0 * z * qb + (z2 - q2) * L
                    )
                elif which == 1:
                    out[big] = 3.0 / (4.0 * Om * q2 * q2) * (
                        6.0 * z * qb + (3.0 * z2 - q2) * L
                    )
                else:
                    out[big] = -3.0 / (4.0 * Om * q2 * q2 * qb) * (
                        18.0 * z * qb
                        + 2.0 * z * qb * (3.0 * z2 - q2) / (z2 - q2)
                        + 2.0 * (6.0 * z2 - q2) * L
                    )
    return out


def _envelope_np(s, kernel_id, Om, zi, im_sign, bcoef, kappa):
    s = np.asarray(s, dtype=np.float64)
    q = kappa * s
    e = _family_np(q, 0, Om, zi, im_sign)
    D = e - bcoef * s * s
    if kernel_id == KERNEL_RECIPROCAL:
        return 1.0 / D
    if kernel_id == KERNEL_IBP_SECOND:
        return kappa * kappa * _family_np(q, 2, Om, zi, im_sign) / (D * D)
    if kernel_id == KERNEL_IBP_KOHN:
        return kappa * kappa * _family_np(q, 3, Om, zi, im_sign) / (D * D)
    e1 = _family_np(q, 1, Om, zi, im_sign)
    e2 = _family_np(q, 2, Om, zi, im_sign)
    Dp = kappa * e1 - 2.0 * bcoef * s
    Dpp = kappa * kappa * e2 - 2.0 * bcoef
    return (2.0 * Dp * Dp - Dpp * D) / (D * D * D)


def _panel_batch_np(lo, hi, phase, kernel_id, Om, zi, im_sign, bcoef, kappa):
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    nodes = c[:, None] + h[:, None] * XGK15[None, :]
    f = np.cos(phase * nodes) * _envelope_np(
        nodes.ravel(), kernel_id, Om, zi, im_sign, bcoef, kappa
    ).reshape(nodes.shape)
    kron = h * (f @ WGK15)
    gauss = h * (f[:, 1::2] @ WG7)
    return kron, np.abs(kron - gauss)


# ---------------------------------------------------------------------------
# dispatching wrappers
# ---------------------------------------------------------------------------

_WHICH_EPS = 0
_WHICH_D1 = 1
_WHICH_D2 = 2
_WHICH_D2_KOHN = 3


def family_grid(q, which, Om, zi, im_sign=1):
    """Evaluate one member of the permittivity family on a 1-d grid.

    which: 0 = eps_tr, 1 = d eps/dq, 2 = d2 eps/dq2, 3 = pole-pair
    approximation of d2 eps/dq2.
    """
    q = np.ascontiguousarray(q, dtype=np.float64)
    if jit_enabled():
        return _grid_jit(q, which, float(Om), float(zi), int(im_sign))
    return _family_np(q, which, float(Om), float(zi), int(im_sign))


def envelope_grid(s, kernel_id, Om, zi, im_sign, bcoef, kappa):
    """Oscillation-free factor of the field integrand on a 1-d grid."""
    s = np.ascontiguousarray(s, dtype=np.float64)
    if jit_enabled():
        return _envelope_jit(
            s, int(kernel_id), float(Om), float(zi), int(im_sign), float(bcoef), float(kappa)
        )
    return _envelope_np(s, kernel_id, float(Om), float(zi), int(im_sign), float(bcoef), float(kappa))


def panel_batch(lo, hi, phase, kernel_id, Om, zi, im_sign, bcoef, kappa):
    """Gauss-Kronrod 15(7) over a batch of panels of cos(phase*s)*K(s).

    Returns (values, error_estimates, n_evaluations). The error estimate
    per panel is the plain |K15 - G7| difference, which is conservative
    for the smooth envelopes used here.
    """
    lo = np.ascontiguousarray(lo, dtype=np.float64)
    hi = np.ascontiguousarray(hi, dtype=np.float64)
    if jit_enabled():
        vals, errs = _panel_batch_jit(
            lo, hi, float(phase), int(kernel_id), float(Om), float(zi),
            int(im_sign), float(bcoef), float(kappa),
        )
    else:
        vals, errs = _panel_batch_np(
            lo, hi, float(phase), int(kernel_id), float(Om), float(zi),
            int(im_sign), float(bcoef), float(kappa),
        )
    return vals, errs, 15 * lo.shape[0]
