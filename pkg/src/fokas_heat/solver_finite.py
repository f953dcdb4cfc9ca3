"""Closed-form solution evaluators for the finite geometries.

Handles the two-layer slab (-a, 0) | (0, b) with Dirichlet end temperatures
and the three-layer slab (-a, 0) | (0, b) | (b, c) with insulated ends, plus
the denominator functions whose real zeros are the classical eigenvalues and
the piecewise-linear steady states.

Two evaluation paths exist for the two-layer slab:

* ``transcribed`` -- the final solution formulas term by term;
* ``linear_solve`` -- at every quadrature node, solve the 4x4 system formed
  by the two global relations at +-k (matched frequency, Dirichlet data
  substituted, evolution-transform terms dropped since their integrals
  vanish) for the interface and end spectral functions, then evaluate the
  deformed-inversion representation directly.

The second path is an independent derivation executed numerically; it is the
in-repo detector for transcription slips in the first, and the two must
agree to quadrature tolerance (test_two_finite.py checks them kernel by
kernel and value by value).

TRANSCRIPTION_CORRECTIONS below records every place where the transcribed
path deviates from its published source; each entry was located by the
dual-path comparison and confirmed by the per-channel kernel extraction
test, the classical-series oracle, or both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._field import ExpSum, KernelTerm, LayerPlan, Numerics, SolutionField
from .core import Geometry, ProblemConfig, SolutionSample, validate
from .errors import FokasHeatError, SingularNode
from .transforms import transform_of

TWO_PI = 2.0 * math.pi

# Formula-to-code map of deliberate deviations in the transcribed path.
# Keys name the solution formula and term; values say what was printed and
# what the dual-path/series checks confirm it must be.
TRANSCRIPTION_CORRECTIONS = {
    "two_finite.left.real_inversion": "printed without the 1/(2 pi) Fourier prefactor; restored",
    "two_finite.right.real_inversion": "printed without the 1/(2 pi) Fourier prefactor; restored",
    "two_finite.left.upper.f_right": "printed spurious factor (1 + sigma_L sigma_R); must be 1 "
    "(identical to its lower-contour twin)",
    "two_finite.right.lower.f_right": "printed without (sigma_L + sigma_R) on the second "
    "exponential; restored",
    "two_finite.right.upper.f_right": "printed sigma_R where sigma_R^2 belongs in the first "
    "exponential; restored",
    "two_finite.right.u0_right_plus": "the two u0-right(+k) kernels are swapped between the "
    "contours as printed (the printed placement even grows along its contour); un-swapped",
    "two_finite.boundary_lift": "the end-value kernels decay only like 1/k, making their "
    "contour integrals direction-sensitive at the slab ends (the formulas hold on the open "
    "interval); both paths therefore split off the piecewise-linear steady profile of the "
    "end-value limits (the standard steady-plus-transient superposition) and evolve the "
    "homogenized problem, whose kernels are all Gaussian-decaying",
    "three_finite.formulas": "the printed three-layer insulated-slab kernels and their "
    "denominator are inconsistent with the problem they solve: at equal sigmas the printed "
    "denominator vanishes at k = n pi/(a+c-2b) instead of the single-slab eigenvalues "
    "n pi/(a+c), and the evaluated field breaks interface continuity and disagrees with the "
    "finite-difference and cosine-series oracles by O(1) in every layer (beyond the two "
    "locally fixable slips flagged up front).  The solver therefore derives the solution "
    "per node from the six matched-frequency global relations (the same elimination that "
    "produces the printed formulas), with the denominator rebuilt from the eigencondition; "
    "conservation, continuity, the equal-sigma cosine series, reflection symmetry, and the "
    "finite-difference oracle all confirm the derived evaluation",
    "three_infinite.middle_full.real_inversion": "printed prefactor 1/2; must be 1/(2 pi)",
}


# ---------------------------------------------------------------------------
# denominator functions


@dataclass(frozen=True)
class DeltaFn:
    """Denominator function: a finite exponential sum in k.

    All zeros lie on the real axis for the finite geometries (asserted by
    the node guard: |Delta| on the deformed contours must stay bounded away
    from zero), so the deformed contours never meet them.
    """

    which: str
    expsum: ExpSum

    def eval_scaled(self, k, half):
        return self.expsum.eval_scaled(k, half)

    def __call__(self, k):
        return self.expsum(k)

    @property
    def max_abs_q(self) -> float:
        return self.expsum.max_abs_q

    def scaled(self, ratio: float) -> "DeltaFn":
        return DeltaFn(f"{self.which}*{ratio:g}", self.expsum.scaled(ratio))


def delta_eval(d: DeltaFn, k):
    """Value of the expanded (pole-free) form of a denominator function."""
    return d(k)


def delta_two_finite_left(sL, sR, a, b) -> DeltaFn:
    """Expanded form of the two-layer denominator, 4 exponentials, zero at 0."""
    bp = b * sL / sR
    return DeltaFn(
        "two_finite_left",
        ExpSum(
            (
                (math.pi * (sL + sR), 2 * a + 2 * bp),
                (math.pi * (sL - sR), 2 * bp),
                (-math.pi * (sL - sR), 2 * a),
                (-math.pi * (sL + sR), 0.0),
            )
        ),
    )


def delta_two_finite_right(sL, sR, a, b) -> DeltaFn:
    """Right-variable denominator: the left one at argument k sigma_R/sigma_L."""
    return delta_two_finite_left(sL, sR, a, b).scaled(sR / sL)


def delta_two_finite_product_form(sL, sR, a, b):
    """Factored form i pi (e^{2iak}+1)(e^{2ibk sL/sR}+1)(sL tan(bk sL/sR) + sR tan(ak)).

    Equals the expanded form away from the tangent poles; used only in
    verification tests.
    """
    bp = b * sL / sR

    def f(k):
        k = np.asarray(k, dtype=complex)
        return (
            1j
            * math.pi
            * (np.exp(2j * a * k) + 1)
            * (np.exp(2j * bp * k) + 1)
            * (sL * np.tan(bp * k) + sR * np.tan(a * k))
        )

    return f


def delta_two_finite_real_form(sL, sR, a, b):
    """Real oscillatory factor G with Delta = 4 i pi e^{ik(a+b sL/sR)} G(k).

    G(k) = sL cos(ak) sin(b' k) + sR sin(ak) cos(b' k), b' = b sL/sR; its
    positive zeros are the eigenvalues of the composite slab.  Dominant
    frequency a + b', so brackets of width pi/(2(a+b')) isolate the roots.
    """
    bp = b * sL / sR

    def g(k):
        k = np.asarray(k, dtype=float)
        return sL * np.cos(a * k) * np.sin(bp * k) + sR * np.sin(a * k) * np.cos(bp * k)

    return g


def delta_three_finite(sL, sM, sR, a, b, c, which: str) -> DeltaFn:
    """Three-layer denominators (8 exponentials each, zero at the origin).

    Derived from the insulated-slab eigencondition rather than transcribed
    (see TRANSCRIPTION_CORRECTIONS["three_finite.formulas"]): with
    alpha = ka, beta = k b sigma_L/sigma_M, rho = k (c-b) sigma_L/sigma_R,

        E(k) = sM^2 cos(al) sin(be) cos(rh) + sL sM sin(al) cos(be) cos(rh)
             + sM sR cos(al) cos(be) sin(rh) - sL sR sin(al) sin(be) sin(rh)

    whose positive zeros are the composite eigenvalues (at equal sigmas E
    reduces to sigma^2 sin(k(a+c)), the single-slab condition), and the
    exponential-sum form below equals (8i/sM) e^{i(al+be+rh)} E times pi.
    ``which`` picks the wavenumber variable: "left" uses k as above,
    "middle"/"right" rescale to their layers' wavenumbers.
    """
    pi = math.pi
    B = b * sL / sM
    P = (c - b) * sL / sR
    terms = (
        ((sM - sL) * (sM - sR), 2 * B),
        ((sL - sM) * (sM - sR), 2 * (a + P)),
        ((sL + sM) * (sM - sR), 2 * (a + B)),
        ((sL + sM) * (sR - sM), 2 * P),
        ((sL - sM) * (sM + sR), 2 * a),
        ((sM - sL) * (sM + sR), 2 * (B + P)),
        ((sL + sM) * (sM + sR), 2 * (a + B + P)),
        (-(sL + sM) * (sM + sR), 0.0),
    )
    left = DeltaFn("three_finite_left", ExpSum(tuple((pi * cc, q) for cc, q in terms)))
    if which == "left":
        return left
    if which == "right":
        return DeltaFn("three_finite_right", left.expsum.scaled(sR / sL))
    if which == "middle":
        return DeltaFn("three_finite_middle", left.expsum.scaled(sM / sL))
    raise ValueError(f"unknown which={which!r}")


def delta_three_finite_real_form(sL, sM, sR, a, b, c):
    """Real oscillatory eigencondition E(k) of the insulated three-layer slab."""

    def g(k):
        k = np.asarray(k, dtype=float)
        al, be, rh = a * k, b * sL / sM * k, (c - b) * sL / sR * k
        return (
            sM**2 * np.cos(al) * np.sin(be) * np.cos(rh)
            + sL * sM * np.sin(al) * np.cos(be) * np.cos(rh)
            + sM * sR * np.cos(al) * np.cos(be) * np.sin(rh)
            - sL * sR * np.sin(al) * np.sin(be) * np.sin(rh)
        )

    return g


# ---------------------------------------------------------------------------
# steady states


@dataclass(frozen=True)
class SteadyState:
    """Piecewise-linear long-time limit: one (slope, intercept) per layer."""

    breaks: tuple[float, ...]
    slopes: tuple[float, ...]
    intercepts: tuple[float, ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        idx = np.clip(np.searchsorted(self.breaks[1:-1], x, side="right"), 0, len(self.slopes) - 1)
        for i in range(len(self.slopes)):
            sel = idx == i
            out[sel] = self.slopes[i] * x[sel] + self.intercepts[i]
        return out if out.shape else float(out)


def steady_state(config: ProblemConfig) -> SteadyState:
    """Long-time limit of the two-layer Dirichlet slab.

    With end temperatures gamma_L at -a and gamma_R at b:

        slope_left  = sR^2 (gR - gL) / (b sL^2 + a sR^2)
        slope_right = sL^2 (gR - gL) / (b sL^2 + a sR^2)
        intercept   = (b gL sL^2 + a gR sR^2) / (b sL^2 + a sR^2)  (shared)

    Continuity at 0 is immediate; flux continuity holds because
    sL^2 slope_left = sR^2 slope_right identically.
    """
    validate(config)
    if config.geometry != Geometry.TWO_FINITE:
        raise FokasHeatError("steady_state requires the two_finite geometry")
    sL, sR = config.sigmas
    a = -config.layers[0].x_lo
    b = config.layers[1].x_hi
    gL = config.end_left.data.limit_at_infinity() / config.end_left.alpha_u
    gR = config.end_right.data.limit_at_infinity() / config.end_right.alpha_u
    den = b * sL**2 + a * sR**2
    intercept = (b * gL * sL**2 + a * gR * sR**2) / den
    return SteadyState(
        breaks=(-a, 0.0, b),
        slopes=(sR**2 * (gR - gL) / den, sL**2 * (gR - gL) / den),
        intercepts=(intercept, intercept),
    )


# ---------------------------------------------------------------------------
# two finite layers, Dirichlet ends


@dataclass(frozen=True)
class InterfaceUnknowns:
    """Spectral unknowns at one batch of matched-frequency nodes.

    All entries carry the damping factor e^{-omega t} so they stay bounded
    on the contours: ``g0``/``g1`` are the interface value/derivative
    transforms, ``h1_left``/``h1_right`` the unknown end-derivative
    transforms, and ``h0_left``/``h0_right`` the known Dirichlet end-value
    transforms they were solved against.
    """

    g0: np.ndarray
    g1: np.ndarray
    h1_left: np.ndarray
    h1_right: np.ndarray
    h0_left: np.ndarray
    h0_right: np.ndarray


def _two_finite_nodal_solve(cfgdata, k, kR, half, t, overrides=None):
    """Solve the matched-frequency 4x4 global-relation system at each node.

    ``k`` and ``kR = k sigma_L/sigma_R`` are the left/right wavenumbers with
    (sL k)^2 == (sR kR)^2.  Rows are rescaled by their dominant exponential
    per half-plane so every matrix entry stays bounded; the unknowns are
    bounded anyway (they are e^{-omega t}-damped time transforms).

    ``overrides`` (testing hook) replaces the damped data-channel values
    {ULp, ULm, URp, URm: e^{-wt} u-hat values; H0L, H0R: damped end-value
    transforms} so individual kernels can be extracted by injecting basis
    vectors.
    """
    sL, sR, a, b, TL, TR, bdL, bdR, a1, a3, dL = cfgdata
    om = (sL * k) ** 2
    damp = np.exp(-om * t)

    if overrides is None:
        h0L = bdL.scaled_time_transform(om, t) / a1
        h0R = bdR.scaled_time_transform(om, t) / a3
    else:
        h0L = overrides.get("H0L", np.zeros_like(k))
        h0R = overrides.get("H0R", np.zeros_like(k))

    if half == "lower":
        Ea = np.exp(-1j * k * a)  # |.| < 1 here
        Eb = np.exp(-1j * kR * b)
        if overrides is None:
            E1 = damp * TL.eval_scaled(k)[0]  # e^{-ika} u^L-hat(k)
            E2 = damp * TL.eval_scaled(-k)[0]  # u^L-hat(-k)
            E3 = damp * TR.eval_scaled(kR)[0]  # u^R-hat(kR)
            E4 = damp * TR.eval_scaled(-kR)[0]  # e^{-ikRb} u^R-hat(-kR)
        else:
            E1 = Ea * overrides.get("ULp", np.zeros_like(k))
            E2 = overrides.get("ULm", np.zeros_like(k))
            E3 = overrides.get("URp", np.zeros_like(k))
            E4 = Eb * overrides.get("URm", np.zeros_like(k))
        rows = [
            [1j * k * sL**2 * Ea, sL**2 * Ea, -(sL**2) * np.ones_like(k), np.zeros_like(k)],
            [-1j * k * sL**2, sL**2 * np.ones_like(k), -(sL**2) * Ea, np.zeros_like(k)],
            [-1j * kR * sR**2, -(sL**2) * np.ones_like(k), np.zeros_like(k), sR**2 * Eb],
            [1j * kR * sR**2 * Eb, -(sL**2) * Eb, np.zeros_like(k), sR**2 * np.ones_like(k)],
        ]
        rhs = [
            1j * k * sL**2 * h0L - E1,
            -Ea * 1j * k * sL**2 * h0L - E2,
            -Eb * 1j * kR * sR**2 * h0R - E3,
            1j * kR * sR**2 * h0R - E4,
        ]
    else:
        Ea = np.exp(1j * k * a)  # |.| < 1 on the upper half
        Eb = np.exp(1j * kR * b)
        if overrides is None:
            E1 = damp * TL.eval_scaled(k)[0]  # u^L-hat(k)
            E2 = damp * TL.eval_scaled(-k)[0]  # e^{ika} u^L-hat(-k)
            E3 = damp * TR.eval_scaled(kR)[0]  # e^{ikRb} u^R-hat(kR)
            E4 = damp * TR.eval_scaled(-kR)[0]  # u^R-hat(-kR)
        else:
            E1 = overrides.get("ULp", np.zeros_like(k))
            E2 = Ea * overrides.get("ULm", np.zeros_like(k))
            E3 = Eb * overrides.get("URp", np.zeros_like(k))
            E4 = overrides.get("URm", np.zeros_like(k))
        rows = [
            [1j * k * sL**2, sL**2 * np.ones_like(k), -(sL**2) * Ea, np.zeros_like(k)],
            [-1j * k * sL**2 * Ea, sL**2 * Ea, -(sL**2) * np.ones_like(k), np.zeros_like(k)],
            [-1j * kR * sR**2 * Eb, -(sL**2) * Eb, np.zeros_like(k), sR**2 * np.ones_like(k)],
            [1j * kR * sR**2, -(sL**2) * np.ones_like(k), np.zeros_like(k), sR**2 * Eb],
        ]
        rhs = [
            Ea * 1j * k * sL**2 * h0L - E1,
            -1j * k * sL**2 * h0L - E2,
            -1j * kR * sR**2 * h0R - E3,
            Eb * 1j * kR * sR**2 * h0R - E4,
        ]

    # Delta_R(kappa) = Delta_L(k), so checking the left form at k covers both
    dv, _ = dL.eval_scaled(k, half)
    amax = float(np.max(np.abs(dv))) if dv.size else 0.0
    if amax == 0.0 or float(np.min(np.abs(dv))) < 1e-12 * amax:
        raise SingularNode("two-finite system singular at a contour node")

    A = np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)
    bvec = np.stack(rhs, axis=-1)
    sol = np.linalg.solve(A, bvec[..., None])[..., 0]
    return InterfaceUnknowns(
        g0=sol[..., 0], g1=sol[..., 1], h1_left=sol[..., 2], h1_right=sol[..., 3],
        h0_left=h0L, h0_right=h0R,
    ), Ea, Eb


def _exp_sum_min_gap(*expsums) -> float:
    """Smallest positive difference between exponent offsets.

    Controls how fast the 1/k tails of boundary-data kernels pair-cancel
    between the two rays of a contour; the contour must reach past
    ln(1e14)/(sin theta * gap) for those kernels to integrate accurately.
    """
    offsets = sorted({q for es in expsums for _, q in es.terms})
    gaps = [b - a for a, b in zip(offsets[:-1], offsets[1:]) if b - a > 1e-12]
    return min(gaps) if gaps else 1.0


def _two_finite_setup(config):
    """Shared pieces of both two-finite paths: the steady lift from the
    end-value limits, homogenized initial-data transforms, and residual
    (decaying) boundary data."""
    from .transforms import SampledInterval

    sL, sR = config.sigmas
    a = -config.layers[0].x_lo
    b = config.layers[1].x_hi
    lift = steady_state(config)
    bdL = config.end_left.data.residual()
    bdR = config.end_right.data.residual()

    def shifted(src, lo, hi):
        if src is None:
            return SampledInterval(lambda x: -np.asarray(lift(x), dtype=float), lo, hi)
        return SampledInterval(
            lambda x, _s=src: np.real(np.asarray(_s(x), dtype=complex)) - lift(x), lo, hi
        )

    TL = transform_of(shifted(config.initial_data[0], -a, 0.0), (-a, 0.0))
    TR = transform_of(shifted(config.initial_data[1], 0.0, b), (0.0, b))
    dL = delta_two_finite_left(sL, sR, a, b)
    return sL, sR, a, b, TL, TR, bdL, bdR, lift, dL


def _two_finite_cfgdata(config):
    sL, sR, a, b, TL, TR, bdL, bdR, lift, dL = _two_finite_setup(config)
    return (
        sL,
        sR,
        a,
        b,
        TL,
        TR,
        bdL,
        bdR,
        config.end_left.alpha_u,
        config.end_right.alpha_u,
        dL,
    )


def _two_finite_transcribed_plans(config) -> list[LayerPlan]:
    """Kernel term lists of the final two-layer solution formulas.

    Applied to the steady-lifted problem: initial transforms carry u0 minus
    the steady profile, end-value kernels carry the decaying residual data
    only, and the steady profile returns through the closed form.  Shifts
    and brackets follow the printed formulas except where
    TRANSCRIPTION_CORRECTIONS applies.  b' = b sL/sR and a' = a sR/sL are
    the opposite-layer widths as seen from each side's wavenumber.
    """
    sL, sR, a, b, TL, TR, bdL, bdR, lift, dL = _two_finite_setup(config)
    bp = b * sL / sR
    ap = a * sR / sL
    a1, a3 = config.end_left.alpha_u, config.end_right.alpha_u
    dR = delta_two_finite_right(sL, sR, a, b)

    # left layer, wavenumber k, ohm = (sL k)^2
    f_right_L = dict(
        const=-2j * sL**2 * sR / a3, shift=2 * a + bp, k_power=1, kind="boundary", bdata=bdR, delta=dL
    )
    f_left_L = dict(
        const=1j * sL**2 / a1,
        shift=a,
        coef=ExpSum((((sL + sR), 0.0), (-(sL - sR), 2 * bp))),
        k_power=1,
        kind="boundary",
        bdata=bdL,
        delta=dL,
    )
    left_bd = [] if bdL.is_zero and bdR.is_zero else [
        KernelTerm("lower", **f_right_L),
        KernelTerm("lower", **f_left_L),
        KernelTerm("upper", **f_left_L),
        # corrected: printed twin carried a spurious (1 + sL sR)
        KernelTerm("upper", **f_right_L),
    ]
    left_terms = left_bd + [
        KernelTerm("real", 1.0 / TWO_PI, transform=TL, arg_scale=1.0),
        KernelTerm(
            "lower",
            0.5,
            coef=ExpSum(((-(sL + sR), 0.0), ((sL - sR), 2 * bp))),
            transform=TL,
            arg_scale=1.0,
            delta=dL,
        ),
        KernelTerm(
            "lower",
            0.5,
            shift=2 * a,
            coef=ExpSum((((sL + sR), 0.0), ((sR - sL), 2 * bp))),
            transform=TL,
            arg_scale=-1.0,
            delta=dL,
        ),
        KernelTerm("lower", -sL, shift=2 * a + 2 * bp, transform=TR, arg_scale=sL / sR, delta=dL),
        KernelTerm("lower", sL, shift=2 * a, transform=TR, arg_scale=-sL / sR, delta=dL),
        KernelTerm(
            "upper",
            0.5,
            shift=2 * a,
            coef=ExpSum(((-(sR - sL), 0.0), (-(sL + sR), 2 * bp))),
            transform=TL,
            arg_scale=1.0,
            delta=dL,
        ),
        KernelTerm(
            "upper",
            0.5,
            shift=2 * a,
            coef=ExpSum((((sL + sR), 0.0), ((sR - sL), 2 * bp))),
            transform=TL,
            arg_scale=-1.0,
            delta=dL,
        ),
        KernelTerm("upper", -sL, shift=2 * a + 2 * bp, transform=TR, arg_scale=sL / sR, delta=dL),
        KernelTerm("upper", sL, shift=2 * a, transform=TR, arg_scale=-sL / sR, delta=dL),
    ]

    # right layer, wavenumber kappa, ohm = (sR kappa)^2
    f_left_R = dict(
        const=2j * sL * sR**2 / a1, shift=ap, k_power=1, kind="boundary", bdata=bdL, delta=dR
    )
    # corrected: (sL + sR) restored on the second exponential / sigma_R^2 on the first
    f_right_R = dict(
        const=-1j * sR**2 / a3,
        shift=b,
        coef=ExpSum((((sL - sR), 0.0), ((sL + sR), 2 * ap))),
        k_power=1,
        kind="boundary",
        bdata=bdR,
        delta=dR,
    )
    right_bd = [] if bdL.is_zero and bdR.is_zero else [
        KernelTerm("lower", **f_left_R),
        KernelTerm("lower", **f_right_R),
        KernelTerm("upper", **f_left_R),
        KernelTerm("upper", **f_right_R),
    ]
    right_terms = right_bd + [
        KernelTerm("real", 1.0 / TWO_PI, transform=TR, arg_scale=1.0),
        KernelTerm("lower", -sR, shift=0.0, transform=TL, arg_scale=sR / sL, delta=dR),
        KernelTerm("lower", sR, shift=2 * ap, transform=TL, arg_scale=-sR / sL, delta=dR),
        # corrected: the printed u0-right(+k) kernels sit on the wrong contours
        KernelTerm(
            "lower",
            0.5,
            coef=ExpSum(((-(sL + sR), 0.0), ((sR - sL), 2 * ap))),
            transform=TR,
            arg_scale=1.0,
            delta=dR,
        ),
        KernelTerm(
            "lower",
            0.5,
            coef=ExpSum((((sL - sR), 0.0), ((sL + sR), 2 * ap))),
            transform=TR,
            arg_scale=-1.0,
            delta=dR,
        ),
        KernelTerm("upper", -sR, shift=0.0, transform=TL, arg_scale=sR / sL, delta=dR),
        KernelTerm("upper", sR, shift=2 * ap, transform=TL, arg_scale=-sR / sL, delta=dR),
        KernelTerm(
            "upper",
            0.5,
            shift=2 * b,
            coef=ExpSum(((-(sL - sR), 0.0), (-(sL + sR), 2 * ap))),
            transform=TR,
            arg_scale=1.0,
            delta=dR,
        ),
        KernelTerm(
            "upper",
            0.5,
            coef=ExpSum((((sL - sR), 0.0), ((sL + sR), 2 * ap))),
            transform=TR,
            arg_scale=-1.0,
            delta=dR,
        ),
    ]
    has_bdata = not (bdL.is_zero and bdR.is_zero)
    gap_L = _exp_sum_min_gap(dL.expsum) if has_bdata else None
    gap_R = _exp_sum_min_gap(dR.expsum) if has_bdata else None

    def lift_fn(x, t):
        return np.asarray(lift(x), dtype=float)

    return [
        LayerPlan(sL, terms=left_terms, needs_arc=True, tail_gap=gap_L, closed_form=lift_fn),
        LayerPlan(sR, terms=right_terms, needs_arc=True, tail_gap=gap_R, closed_form=lift_fn),
    ]


def _two_finite_linear_plans(config) -> list[LayerPlan]:
    cfgdata = _two_finite_cfgdata(config)
    sL, sR, a, b, TL, TR = cfgdata[:6]
    lift = steady_state(config)

    def solve_left(k, half, t):
        kR = k * sL / sR
        unk, Ea, Eb = _two_finite_nodal_solve(cfgdata, k, kR, half, t)
        if half == "lower":
            return -(sL**2) * (unk.g1 + 1j * k * unk.g0) / TWO_PI
        # e^{ik(a+x)} sL^2 (h1L + ik h0L); Ea = e^{ika} is the bounded factor here
        return -(sL**2) * Ea * (unk.h1_left + 1j * k * unk.h0_left) / TWO_PI

    def solve_right(kappa, half, t):
        k = kappa * sR / sL
        unk, Ea, Eb = _two_finite_nodal_solve(cfgdata, k, kappa, half, t)
        if half == "lower":
            # e^{i kappa (x-b)} sR^2 (h1R + i kappa h0R); Eb = e^{-i kappa b}
            return -(sR**2) * Eb * (unk.h1_right + 1j * kappa * unk.h0_right) / TWO_PI
        return -(1j * kappa * sR**2 * unk.g0 + sL**2 * unk.g1) / TWO_PI

    bdL, bdR, dL = cfgdata[6], cfgdata[7], cfgdata[-1]
    has_bdata = not (bdL.is_zero and bdR.is_zero)
    gap_L = _exp_sum_min_gap(dL.expsum) if has_bdata else None
    gap_R = _exp_sum_min_gap(dL.expsum.scaled(sR / sL)) if has_bdata else None

    def lift_fn(x, t):
        return np.asarray(lift(x), dtype=float)

    left = LayerPlan(
        sL,
        terms=[KernelTerm("real", 1.0 / TWO_PI, transform=TL, arg_scale=1.0)],
        solve_fn=solve_left,
        solve_halves=("lower", "upper"),
        needs_arc=True,
        osc_pad=2 * a + 2 * b * sL / sR,
        tail_gap=gap_L,
        closed_form=lift_fn,
    )
    right = LayerPlan(
        sR,
        terms=[KernelTerm("real", 1.0 / TWO_PI, transform=TR, arg_scale=1.0)],
        solve_fn=solve_right,
        solve_halves=("lower", "upper"),
        needs_arc=True,
        osc_pad=2 * b + 2 * a * sR / sL,
        tail_gap=gap_R,
        closed_form=lift_fn,
    )
    return [left, right]


def solve_two_finite_dirichlet(
    config: ProblemConfig,
    numerics: Numerics | None = None,
    path: str = "transcribed",
) -> SolutionField:
    """Build the evaluator for the two-finite-layer Dirichlet problem."""
    validate(config)
    if config.geometry != Geometry.TWO_FINITE:
        raise FokasHeatError("solve_two_finite_dirichlet requires two_finite geometry")
    if path == "transcribed":
        plans = _two_finite_transcribed_plans(config)
    elif path == "linear_solve":
        plans = _two_finite_linear_plans(config)
    else:
        raise ValueError(f"unknown path {path!r}")
    return SolutionField(config, plans, numerics, label=f"two_finite/{path}")


def eval_two_finite_dirichlet(sol: SolutionField, x: float, t: float) -> SolutionSample:
    if sol.config.geometry != Geometry.TWO_FINITE:
        raise FokasHeatError("evaluator was not built for two_finite")
    return sol.sample(x, t)


# ---------------------------------------------------------------------------
# three finite layers, insulated ends


def _three_finite_nodal_solve(setup, k, half, t):
    """Solve the matched-frequency 6x6 global-relation system at each node.

    Unknowns (all damped by e^{-omega t}, hence bounded): end-value
    transforms Va at -a and Vc at c, interface value/derivative transforms
    (V0, D0) at 0 and (Vb, Db) at b, where D0 transforms u^L_x(0, .) and
    Db transforms u^M_x(b, .); the flux conditions fix the other one-sided
    derivatives.  Insulated ends make the end-derivative transforms zero.
    Rows are rescaled by their dominant exponential per half-plane so every
    entry stays bounded; the limit system at large |Im k| is block
    triangular and uniformly well conditioned.
    """
    sL, sM, sR, a, b, c, TL, TM, TR, dL = setup
    kM = k * sL / sM
    kR = k * sL / sR
    om = (sL * k) ** 2
    damp = np.exp(-om * t)
    z = np.zeros_like(k)
    one = np.ones_like(k)

    # bounded transform values: T-tilde with its dominant-endpoint offset
    TLp = damp * TL.eval_scaled(k)[0]
    TLm = damp * TL.eval_scaled(-k)[0]
    TMp = damp * TM.eval_scaled(kM)[0]
    TMm = damp * TM.eval_scaled(-kM)[0]
    TRp = damp * TR.eval_scaled(kR)[0]
    TRm = damp * TR.eval_scaled(-kR)[0]

    sgn = -1.0 if half == "lower" else 1.0
    Ea = np.exp(sgn * 1j * k * a)  # all three are small on their half
    Eb = np.exp(sgn * 1j * kM * b)
    EcR = np.exp(sgn * 1j * kR * (c - b))
    # columns: [Va, V0, D0, Vb, Db, Vc]; each row rescaled by its dominant
    # exponential so entries stay bounded and the large-|Im k| limit is
    # block triangular (left pair -> (Va | V0,D0), etc.)
    if half == "lower":
        rows = [
            [-1j * k * sL**2 * one, 1j * k * sL**2 * Ea, sL**2 * Ea, z, z, z],
            [1j * k * sL**2 * Ea, -1j * k * sL**2 * one, sL**2 * one, z, z, z],
            [z, -1j * kM * sM**2 * one, -(sL**2) * one, 1j * kM * sM**2 * Eb, sM**2 * Eb, z],
            [z, 1j * kM * sM**2 * Eb, -(sL**2) * Eb, -1j * kM * sM**2 * one, sM**2 * one, z],
            [z, z, z, -1j * kR * sR**2 * one, -(sM**2) * one, 1j * kR * sR**2 * EcR],
            [z, z, z, 1j * kR * sR**2 * EcR, -(sM**2) * EcR, -1j * kR * sR**2 * one],
        ]
    else:
        rows = [
            [-1j * k * sL**2 * Ea, 1j * k * sL**2 * one, sL**2 * one, z, z, z],
            [1j * k * sL**2 * one, -1j * k * sL**2 * Ea, sL**2 * Ea, z, z, z],
            [z, -1j * kM * sM**2 * Eb, -(sL**2) * Eb, 1j * kM * sM**2 * one, sM**2 * one, z],
            [z, 1j * kM * sM**2 * one, -(sL**2) * one, -1j * kM * sM**2 * Eb, sM**2 * Eb, z],
            [z, z, z, -1j * kR * sR**2 * EcR, -(sM**2) * EcR, 1j * kR * sR**2 * one],
            [z, z, z, 1j * kR * sR**2 * one, -(sM**2) * one, -1j * kR * sR**2 * EcR],
        ]
    rhs = [-TLp, -TLm, -TMp, -TMm, -TRp, -TRm]

    dv, _ = dL.eval_scaled(k, half)
    amax = float(np.max(np.abs(dv))) if dv.size else 0.0
    if amax == 0.0 or float(np.min(np.abs(dv))) < 1e-12 * amax:
        raise SingularNode("three-finite system singular at a contour node")

    A = np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)
    bvec = np.stack(rhs, axis=-1)
    sol = np.linalg.solve(A, bvec[..., None])[..., 0]
    return {
        "Va": sol[..., 0],
        "V0": sol[..., 1],
        "D0": sol[..., 2],
        "Vb": sol[..., 3],
        "Db": sol[..., 4],
        "Vc": sol[..., 5],
    }


def _three_finite_plans(config) -> list[LayerPlan]:
    """Layer plans evaluating the derived global-relation solution.

    Each layer integrates its two interface/end combinations over the
    deformed contours in its own wavenumber (kappa), with the matched left
    wavenumber k = kappa sigma_layer / sigma_L feeding the nodal solve:

        u_L = inv(u0_L) - (1/2pi) [ int_lower e^{ikx} sL^2 (D0 + ik V0)
                                  + int_upper e^{ik(x+a)} ik sL^2 Va ]
        u_M = inv(u0_M) - (1/2pi) [ int_lower e^{ikM(x-b)} sM^2 (Db + ikM Vb)
                                  + int_upper e^{ikM x} (sL^2 D0 + ikM sM^2 V0) ]
        u_R = inv(u0_R) - (1/2pi) [ int_lower e^{ikR(x-c)} ikR sR^2 Vc
                                  + int_upper e^{ikR(x-b)} (sM^2 Db + ikR sR^2 Vb) ]
    """
    sL, sM, sR = config.sigmas
    a = -config.layers[0].x_lo
    b = config.layers[1].x_hi
    c = config.layers[2].x_hi
    TL = transform_of(config.initial_data[0], (-a, 0.0))
    TM = transform_of(config.initial_data[1], (0.0, b))
    TR = transform_of(config.initial_data[2], (b, c))
    dL = delta_three_finite(sL, sM, sR, a, b, c, "left")
    setup = (sL, sM, sR, a, b, c, TL, TM, TR, dL)

    def solve_L(k, half, t):
        unk = _three_finite_nodal_solve(setup, k, half, t)
        if half == "lower":
            return -(sL**2) * (unk["D0"] + 1j * k * unk["V0"]) / TWO_PI
        Ea = np.exp(1j * k * a)
        return -1j * k * sL**2 * Ea * unk["Va"] / TWO_PI

    def solve_M(kappa, half, t):
        unk = _three_finite_nodal_solve(setup, kappa * sM / sL, half, t)
        if half == "lower":
            Eb = np.exp(-1j * kappa * b)
            return -(sM**2) * Eb * (unk["Db"] + 1j * kappa * unk["Vb"]) / TWO_PI
        return -(sL**2 * unk["D0"] + 1j * kappa * sM**2 * unk["V0"]) / TWO_PI

    def solve_R(kappa, half, t):
        unk = _three_finite_nodal_solve(setup, kappa * sR / sL, half, t)
        if half == "lower":
            Ec = np.exp(-1j * kappa * c)
            return -1j * kappa * sR**2 * Ec * unk["Vc"] / TWO_PI
        # e^{i kappa (x-b)} phase carried separately: exp(-i kappa b) grows here
        vals = -(sM**2 * unk["Db"] + 1j * kappa * sR**2 * unk["Vb"]) / TWO_PI
        return [(vals, -b)]

    pads = (
        2 * (a + b * sL / sM + (c - b) * sL / sR),
        2 * (a * sM / sL + b + (c - b) * sM / sR),
        2 * (a * sR / sL + b * sR / sM + (c - b)),
    )
    plans = []
    for i, (sig, solve, T) in enumerate(
        ((sL, solve_L, TL), (sM, solve_M, TM), (sR, solve_R, TR))
    ):
        plans.append(
            LayerPlan(
                sig,
                terms=[KernelTerm("real", 1.0 / TWO_PI, transform=T, arg_scale=1.0)],
                solve_fn=solve,
                solve_halves=("lower", "upper"),
                needs_arc=True,
                osc_pad=pads[i],
            )
        )
    return plans


def solve_three_finite(
    config: ProblemConfig,
    variant: str = "full",
    numerics: Numerics | None = None,
) -> SolutionField:
    """Build the evaluator for the three-finite-layer insulated problem.

    Both variants run the same derived global-relation evaluation (see
    TRANSCRIPTION_CORRECTIONS["three_finite.formulas"]); ``restricted``
    additionally requires the middle and right initial data to be zero, as
    the shorter published formulas do.
    """
    validate(config)
    if config.geometry != Geometry.THREE_FINITE:
        raise FokasHeatError("solve_three_finite requires three_finite geometry")
    if variant not in ("restricted", "full"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "restricted":
        for i in (1, 2):
            if config.initial_data[i] is not None:
                raise FokasHeatError("restricted variant requires zero middle and right data")
    return SolutionField(config, _three_finite_plans(config), numerics, label=f"three_finite/{variant}")


def eval_three_finite(sol: SolutionField, x: float, t: float) -> SolutionSample:
    if sol.config.geometry != Geometry.THREE_FINITE:
        raise FokasHeatError("evaluator was not built for three_finite")
    return sol.sample(x, t)
