"""Electric-field profile inside the metal half-space.

The normalized field E(x)/E'(0) is a half-line cosine transform of the
reciprocal dispersion denominator. Two parametrizations of the same
integral are provided (the mean-free-path "direct" axis and the
plasma-scaled "rescaled" axis), plus integrated-by-parts variants, and
the closed-form far-field oscillation with its amplitude coefficients.

Depths are in cm; the E(x)/E'(0) normalization carries a length, so
those values are in cm too, while E(x)/E(0) is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, permittivity
from ._kernels import (
    KERNEL_IBP_EXACT,
    KERNEL_IBP_KOHN,
    KERNEL_IBP_SECOND,
    KERNEL_RECIPROCAL,
)
from .constants import SPEED_OF_LIGHT
from .materials import Material, PlasmaParams, params_for
from .quadrature import QuadratureError, QuadratureResult, oscillatory_halfline


class DispersionRootError(RuntimeError):
    """The dispersion denominator vanishes on the integration contour."""


class ProfileEvaluationError(RuntimeError):
    """No point of a requested profile could be evaluated."""


_IBP_KERNELS = {
    "exact": KERNEL_IBP_EXACT,
    "second-derivative": KERNEL_IBP_SECOND,
    "kohn-pole": KERNEL_IBP_KOHN,
}

PROFILE_METHODS = ("direct", "rescaled", "ibp", "asymptotic")


def dispersion_denominator(q, Omega: float, eps: float, b: float, *, im_sign: int = 1):
    """eps_tr(q, Omega, eps) - b q^2, the transform's denominator.

    b is passed explicitly rather than through PlasmaParams so the
    denominator can be probed at fictitious stiffness values; for field
    work pass params.b.
    """
    if b <= 0:
        raise ValueError(f"b must be > 0, got {b}")
    e = permittivity.eps_tr(q, Omega, eps, im_sign=im_sign)
    return e - b * np.asarray(q, dtype=np.float64) ** 2


def check_dispersion_roots(params: PlasmaParams, *, im_sign: int = 1, n: int = 512) -> None:
    """Raise DispersionRootError if the denominator has a real-axis zero.

    Only the collisionless window 0 < q < Omega can host one: there the
    permittivity is purely real, so a sign change of the real part is a
    genuine pole of the integrand. Beyond the edge the collisionless
    damping step keeps the denominator complex, and any eps > 0 moves
    the zero off the axis entirely.
    """
    if params.eps != 0.0:
        return
    Om = params.Omega
    qs = np.linspace(Om / n, Om * (1.0 - 1.0 / n), n)
    d = dispersion_denominator(qs, Om, 0.0, params.b, im_sign=im_sign)
    re = np.real(d)
    if np.any(re[:-1] * re[1:] < 0.0) or np.any(re == 0.0):
        i = int(np.argmin(np.abs(re)))
        raise DispersionRootError(
            f"dispersion root on contour near q = {qs[i]:.6g}: the "
            f"collisionless denominator changes sign inside 0 < q < {Om:g}"
        )


@dataclass(frozen=True)
class FieldPointInfo:
    value: complex
    abs_err_est: float
    pref: float
    phase: float
    route: str
    kernel: str
    quad: QuadratureResult


def _field_point(
    x_cm: float,
    params: PlasmaParams,
    route: str,
    kernel_name: str,
    kernel_id: int,
    exponent_sign: int,
    tol_rel: float,
    tol_abs: float,
) -> FieldPointInfo:
    if x_cm < 0:
        raise ValueError(f"x must be >= 0, got {x_cm}")
    if exponent_sign not in (1, -1):
        raise ValueError("exponent_sign must be +1 or -1")
    mat = params.material
    x_scaled = mat.omega_p * x_cm / mat.v_F
    if route == "rescaled":
        kappa = 1.0
        bcoef = params.b
        phase = x_scaled
        pref = params.b * mat.v_F / (math.pi * mat.omega_p)
    elif route == "direct":
        if params.eps == 0.0:
            raise ValueError(
                "direct route needs eps > 0; use the rescaled route, the "
                "asymptotic form, or a small eps such as 1e-5"
            )
        kappa = params.eps
        bcoef = params.a
        phase = params.eps * x_scaled
        pref = params.a * params.l / math.pi
    else:
        raise ValueError(f"unknown route {route!r}")
    if kernel_id != KERNEL_RECIPROCAL:
        if x_cm == 0.0:
            raise ValueError("integrated-by-parts kernels are undefined at x = 0")
        if params.eps == 0.0:
            raise ValueError("integrated-by-parts kernels need eps > 0")
    check_dispersion_roots(params, im_sign=exponent_sign)
    # the engine works in its own integrand units; translate the absolute
    # floor so that defaults stated in field units carry over
    quad = oscillatory_halfline(
        phase,
        kernel_id,
        params.Omega,
        params.eps * exponent_sign,
        exponent_sign,
        bcoef,
        kappa,
        tol_rel=tol_rel,
        tol_abs=tol_abs / (2.0 * pref),
    )
    scale = 2.0 * pref
    if kernel_id == KERNEL_IBP_EXACT:
        scale = -2.0 * pref / phase**2
    elif kernel_id in (KERNEL_IBP_SECOND, KERNEL_IBP_KOHN):
        scale = 2.0 * pref / phase**2
    value = scale * quad.value
    abs_err = abs(scale) * (quad.error + quad.tail_bound)
    return FieldPointInfo(
        value=complex(value),
        abs_err_est=float(abs_err),
        pref=pref,
        phase=phase,
        route=route,
        kernel=kernel_name,
        quad=quad,
    )


def field_ratio_rescaled(
    x_cm: float,
    params: PlasmaParams,
    *,
    exponent_sign: int = 1,
    tol_rel: float = 1e-8,
    tol_abs: float = 1e-30,
    full_output: bool = False,
):
    """E(x)/E'(0) in cm via the plasma-scaled axis. Works at eps = 0."""
    info = _field_point(
        x_cm, params, "rescaled", "reciprocal", KERNEL_RECIPROCAL,
        exponent_sign, tol_rel, tol_abs,
    )
    return (info.value, info) if full_output else info.value


def field_ratio_direct(
    x_cm: float,
    params: PlasmaParams,
    *,
    exponent_sign: int = 1,
    tol_rel: float = 1e-8,
    tol_abs: float = 1e-30,
    full_output: bool = False,
):
    """E(x)/E'(0) in cm via the mean-free-path axis; requires eps > 0.

    Same integral as field_ratio_rescaled under a change of variable, so
    the two must agree to quadrature accuracy. Kept separate as a
    cross-check, not merged.
    """
    info = _field_point(
        x_cm, params, "direct", "reciprocal", KERNEL_RECIPROCAL,
        exponent_sign, tol_rel, tol_abs,
    )
    return (info.value, info) if full_output else info.value


def field_ratio_ibp(
    x_cm: float,
    params: PlasmaParams,
    *,
    kernel: str = "exact",
    exponent_sign: int = 1,
    tol_rel: float = 1e-8,
    tol_abs: float = 1e-30,
    full_output: bool = False,
):
    """E(x)/E'(0) after integrating the transform by parts twice.

    Needs x > 0 (the 1/x^2 prefactor) and eps > 0. kernel selects what
    stands under the transform:
      * "exact": the full second derivative of the reciprocal
        denominator; agrees with the plain routes to quadrature accuracy
        since the boundary terms vanish.
      * "second-derivative": permittivity curvature alone over the
        squared denominator, dropping the smooth remainder terms; keeps
        the oscillation but not the amplitude. For study, not for
        agreement checks.
      * "kohn-pole": same with only the pole pair of the curvature.
    """
    try:
        kid = _IBP_KERNELS[kernel]
    except KeyError:
        raise ValueError(
            f"unknown ibp kernel {kernel!r}; choose from {sorted(_IBP_KERNELS)}"
        ) from None
    info = _field_point(
        x_cm, params, "rescaled", kernel, kid, exponent_sign, tol_rel, tol_abs
    )
    return (info.value, info) if full_output else info.value


@dataclass(frozen=True)
class FieldProfile:
    """Field ratio sampled on a strictly increasing depth grid.

    values is complex E(x)/E'(0) in cm (or E(x)/E(0), dimensionless;
    see normalization); abs_err the per-point error estimate;
    diagnostics the per-point quadrature records (None where closed
    form or failed); errors the (index, message) list of failed points,
    which keep NaN in values rather than being dropped.
    """

    xs: np.ndarray
    values: np.ndarray
    abs_err: np.ndarray
    params: PlasmaParams
    method: str
    normalization: str
    diagnostics: list
    errors: list

    @property
    def ok(self) -> np.ndarray:
        return np.isfinite(self.values)


def profile(
    xs,
    params,
    method: str = "rescaled",
    *,
    kernel: str = "exact",
    normalization: str = "per_Eprime0",
    exponent_sign: int = 1,
    tol_rel: float = 1e-8,
    tol_abs: float = 1e-30,
) -> FieldProfile:
    """Evaluate the field ratio on an array of depths.

    params is a PlasmaParams or a bare (Omega, material) pair, which
    means the collisionless state. method is one of direct / rescaled /
    ibp / asymptotic; kernel only matters for ibp. Depths must be
    strictly increasing (and positive for asymptotic). Per-point
    quadrature failures are collected in .errors with NaN left in
    .values; only a profile with no successful point at all raises
    ProfileEvaluationError.
    """
    if not isinstance(params, PlasmaParams):
        Om, mat = params
        params = params_for(mat, float(Om))
    x = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    if x.size == 0:
        raise ValueError("empty depth grid")
    if x.size > 1 and np.any(np.diff(x) <= 0):
        raise ValueError("depths must be strictly increasing")
    if method not in PROFILE_METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {PROFILE_METHODS}")
    if normalization not in ("per_Eprime0", "per_E0"):
        raise ValueError(f"unknown normalization {normalization!r}")

    if method == "asymptotic":
        vals = asymptotic_field(
            x, params.Omega, params.material, normalization=normalization
        ).astype(np.complex128)
        return FieldProfile(
            xs=x,
            values=vals,
            abs_err=np.zeros(x.shape),
            params=params,
            method=method,
            normalization=normalization,
            diagnostics=[None] * x.size,
            errors=[],
        )

    if normalization != "per_Eprime0":
        raise ValueError("numeric methods produce the per_Eprime0 normalization")
    vals = np.full(x.shape, np.nan + 0j, dtype=np.complex128)
    errs = np.full(x.shape, np.nan)
    diags: list = [None] * x.size
    failures: list = []
    for i, xi in enumerate(x):
        try:
            if method == "direct":
                _, info = field_ratio_direct(
                    float(xi), params, exponent_sign=exponent_sign,
                    tol_rel=tol_rel, tol_abs=tol_abs, full_output=True,
                )
            elif method == "rescaled":
                _, info = field_ratio_rescaled(
                    float(xi), params, exponent_sign=exponent_sign,
                    tol_rel=tol_rel, tol_abs=tol_abs, full_output=True,
                )
            else:
                _, info = field_ratio_ibp(
                    float(xi), params, kernel=kernel,
                    exponent_sign=exponent_sign,
                    tol_rel=tol_rel, tol_abs=tol_abs, full_output=True,
                )
        except QuadratureError as exc:
            failures.append((i, f"{type(exc).__name__}: {exc}"))
            continue
        vals[i] = info.value
        errs[i] = info.abs_err_est
        diags[i] = info.quad
    if failures and len(failures) == x.size:
        raise ProfileEvaluationError(
            f"all {x.size} profile points failed; first: {failures[0][1]}"
        )
    return FieldProfile(
        xs=x,
        values=vals,
        abs_err=errs,
        params=params,
        method=method,
        normalization="per_Eprime0",
        diagnostics=diags,
        errors=failures,
    )


# ---------------------------------------------------------------------------
# far-field asymptotics
# ---------------------------------------------------------------------------


def _bracket(material: Material, Omega: float, *, relativistic: bool = True) -> float:
    r = 1.5 + (SPEED_OF_LIGHT * Omega / material.v_F) ** 2
    if relativistic:
        r -= Omega**2
    return r


def f_of_Omega(Omega: float, material: Material) -> float:
    """Dimensionless oscillation-strength factor 2 Omega^2 / bracket^2.

    Cross-checked on every call against the dimensional form written in
    laboratory frequency, to guard the display against drift.
    """
    if Omega <= 0:
        raise ValueError("Omega must be > 0")
    f = 2.0 * Omega**2 / _bracket(material, Omega) ** 2
    f_dim = f_of_Omega_dimensional(Omega * material.omega_p, material)
    if abs(f - f_dim) > 1e-12 * f:
        raise RuntimeError("dimensionless and dimensional forms disagree")
    return f


def f_of_Omega_dimensional(omega: float, material: Material) -> float:
    """Same factor from the laboratory frequency omega (rad/s)."""
    if omega <= 0:
        raise ValueError("omega must be > 0")
    c, v, wp = SPEED_OF_LIGHT, material.v_F, material.omega_p
    denom = 1.5 * wp**2 + omega**2 * ((c / v) ** 2 - 1.0)
    return 2.0 * omega**2 * wp**2 / denom**2


_A_MODES = ("exact8", "nonrel9", "low", "high")


def amplitude_A(Omega: float, material: Material, mode: str = "exact8") -> float:
    """Far-field envelope coefficient A (cm^3): E/E'(0) ~ -(A/x^2) sin.

    Modes: "exact8" keeps the full quadratic bracket, "nonrel9" drops
    its relativistic -Omega^2 correction, "low" and "high" are the
    frequency-limit forms the first two reduce to.
    """
    if Omega <= 0:
        raise ValueError("Omega must be > 0")
    c, v, wp = SPEED_OF_LIGHT, material.v_F, material.omega_p
    if mode == "exact8":
        return 3.0 * c**2 * v / (wp**3 * _bracket(material, Omega) ** 2)
    if mode == "nonrel9":
        return 3.0 * c**2 * v / (wp**3 * _bracket(material, Omega, relativistic=False) ** 2)
    if mode == "low":
        return 4.0 * c**2 * v / (3.0 * wp**3)
    if mode == "high":
        return 3.0 * v**5 / (c**2 * wp**3 * Omega**4)
    raise ValueError(f"unknown mode {mode!r}; choose from {_A_MODES}")


def amplitude_B(Omega: float, material: Material, E0: float = 1.0) -> float:
    """Envelope coefficient B (cm^2) for the E(x)/E(0) normalization.

    B = (omega_p/c) A E0; E0 is an overall surface-field scale used
    mostly to probe the crossover logic.
    """
    if E0 <= 0:
        raise ValueError("E0 must be > 0")
    return material.omega_p / SPEED_OF_LIGHT * amplitude_A(Omega, material) * E0


@dataclass(frozen=True)
class AsymptoticCoefficients:
    A: float
    B: float
    f_Omega: float
    wavenumber: float


def asymptotic_coefficients(
    Omega: float, material: Material, E0: float = 1.0
) -> AsymptoticCoefficients:
    """Closed-form far-field quantities for one material and frequency.

    wavenumber = Omega omega_p / v_F (cm^-1); successive zeros of the
    oscillation sit pi/wavenumber apart.
    """
    return AsymptoticCoefficients(
        A=amplitude_A(Omega, material),
        B=amplitude_B(Omega, material, E0),
        f_Omega=f_of_Omega(Omega, material),
        wavenumber=Omega * material.omega_p / material.v_F,
    )


def asymptotic_field(
    x_cm,
    Omega: float,
    material: Material,
    *,
    normalization: str = "per_Eprime0",
    E0: float = 1.0,
):
    """Leading far-field oscillation, an inverse-square-damped sine.

    per_Eprime0 gives E/E'(0) = -(A/x^2) sin(Omega omega_p x / v_F) in
    cm; per_E0 gives the dimensionless E/E(0) = +(B/x^2) sin(...). The
    signs differ because E(0)/E'(0) = -c/omega_p near the surface.
    """
    x = np.asarray(x_cm, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("asymptotic form needs x > 0")
    u = Omega * material.omega_p * x / material.v_F
    if normalization == "per_Eprime0":
        return -amplitude_A(Omega, material) / x**2 * np.sin(u)
    if normalization == "per_E0":
        return amplitude_B(Omega, material, E0) / x**2 * np.sin(u)
    raise ValueError(f"unknown normalization {normalization!r}")
