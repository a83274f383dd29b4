"""Discrete spectrum: exact quartics, state classification, norms, Puiseux expansions.

The four discrete states are the roots of the lam-plane quartic

    f(lam) = -lam^4 - eps_d lam^3 - g^2 lam^2 + eps_d lam + 1,

equivalent to the energy quartic p(E) = (E - eps_d)^2 (E^2 - 4) - g^4 under
E = -lam - 1/lam.  Roots are found from the companion matrix and polished by
Newton iteration in extended precision (mpmath), since the three roots that
cluster at lam = 1 for small g at threshold lose about two thirds of their
digits in double precision.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace
from enum import Enum

import mpmath as mp
import numpy as np

from .errors import (
    BranchCutError,
    DegenerateNormalizationError,
    DomainError,
    LabelMatchingError,
    NumericalError,
)
from .model import CUT_TOL, ModelParams, energy_from_lambda

QUARTIC_RESIDUAL_TOL = 1e-12
# a root counts as real when |Im lam| < REAL_TOL * (1 + |lam|)
REAL_TOL = 1e-9

_POLISH_DPS = 40

CBRT2 = 2.0 ** (1.0 / 3.0)


class StateClass(Enum):
    BOUND_LOWER = "bound_lower"
    BOUND_UPPER = "bound_upper"
    VIRTUAL = "virtual"
    RESONANCE = "resonance"
    ANTI_RESONANCE = "anti_resonance"


class ExpansionKind(Enum):
    ENERGY_BOUND = "energy_bound"
    ENERGY_RES_ANTI = "energy_res_anti"
    LAMBDA_BOUND = "lambda_bound"
    LAMBDA_RES_ANTI = "lambda_res_anti"
    NORM_D_BOUND = "norm_d_bound"
    NORM_D_RES_ANTI = "norm_d_res_anti"


@dataclass(frozen=True)
class DiscreteState:
    """One root of the quartic with its classification and squared components."""

    lam: complex
    energy: complex
    state_class: StateClass | None = None
    psi0_sq: complex | None = None
    psid_sq: complex | None = None


def lambda_quartic_coeffs(eps_d: complex, g: float) -> np.ndarray:
    """Coefficients of f(lam), highest power first."""
    return np.array([-1.0, -eps_d, -(g**2), eps_d, 1.0], dtype=complex)


def energy_quartic_coeffs(eps_d: complex, g: float) -> np.ndarray:
    """Coefficients of p(E) = (E - eps_d)^2 (E^2 - 4) - g^4, highest first."""
    e = eps_d
    return np.array(
        [1.0, -2.0 * e, e * e - 4.0, 8.0 * e, -4.0 * e * e - g**4], dtype=complex
    )


def _polish_roots_mp(coeffs, roots, tol):
    """Newton-polish roots of a polynomial in extended precision."""
    co = [mp.mpc(c) for c in coeffs]
    dco = [c * (len(co) - 1 - i) for i, c in enumerate(co[:-1])]
    scale = max(abs(c) for c in co)
    out = []
    with mp.workdps(_POLISH_DPS):
        for r in roots:
            z = mp.mpc(r)
            for _ in range(60):
                fz = mp.polyval(co, z)
                if abs(fz) < mp.mpf("1e-35") * scale:
                    break
                dfz = mp.polyval(dco, z)
                if dfz == 0:
                    break
                step = fz / dfz
                z = z - step
                if abs(step) < mp.mpf("1e-35") * (1 + abs(z)):
                    break
            res = abs(mp.polyval(co, z))
            out.append((complex(z), float(res)))
    worst = max(r for _, r in out)
    if worst > tol * float(scale):
        raise NumericalError(
            f"root polish did not converge; worst residual {worst:.3e}",
            residual=worst,
        )
    return np.array([z for z, _ in out], dtype=complex)


def _polish_roots_fast(coeffs, roots, iterations=3):
    """Vectorized double-precision Newton polish (bulk scan paths)."""
    dco = np.polyder(coeffs)
    z = roots.astype(complex)
    for _ in range(iterations):
        dfz = np.polyval(dco, z)
        dfz = np.where(dfz == 0, 1.0, dfz)
        z = z - np.polyval(coeffs, z) / dfz
    return z


def solve_quartic_lambda_raw(eps_d: complex, g: float, polish: str = "mp") -> np.ndarray:
    """All four roots of f(lam) for a possibly complex eps_d.

    polish: "mp" for extended-precision Newton (default), "fast" for
    double-precision Newton (grid sweeps).
    """
    co = lambda_quartic_coeffs(eps_d, g)
    seeds = np.roots(co)
    if polish == "mp":
        return _polish_roots_mp(co, seeds, QUARTIC_RESIDUAL_TOL)
    roots = _polish_roots_fast(co, seeds)
    res = np.abs(np.polyval(co, roots))
    scale = np.max(np.abs(co))
    if np.max(res) > 1e-9 * scale:
        # fall back to the slow path before giving up
        return _polish_roots_mp(co, seeds, QUARTIC_RESIDUAL_TOL)
    return roots


def solve_lambda_quartic(params: ModelParams, polish: str = "mp") -> list[DiscreteState]:
    """Four unnormalized discrete states (lam and E only), unordered."""
    roots = solve_quartic_lambda_raw(params.epsilon_d, params.g, polish=polish)
    return [DiscreteState(lam=z, energy=energy_from_lambda(z)) for z in roots]


def solve_energy_quartic(params: ModelParams, polish: str = "mp") -> np.ndarray:
    """Four roots of the energy quartic p(E), solved independently of f(lam)."""
    co = energy_quartic_coeffs(params.epsilon_d, params.g)
    seeds = np.roots(co)
    if polish == "mp":
        return _polish_roots_mp(co, seeds, QUARTIC_RESIDUAL_TOL)
    return _polish_roots_fast(co, seeds)


def is_real_root(lam: complex) -> bool:
    return abs(lam.imag) < REAL_TOL * (1.0 + abs(lam))


def classify_state(lam: complex, energy: complex) -> StateClass:
    """Classify a quartic root by sheet (|lam| vs 1) and reality.

    |lam| < 1, lam real > 0  -> bound state below the band (first sheet)
    |lam| < 1, lam real < 0  -> bound state above the band
    |lam| > 1, lam real      -> virtual (anti-bound) state
    |lam| > 1, Im E < 0      -> resonance
    |lam| > 1, Im E > 0      -> anti-resonance
    """
    mod = abs(lam)
    if abs(mod - 1.0) < CUT_TOL:
        raise BranchCutError(f"lam = {lam} on the unit circle", roots=(lam, 1 / lam))
    if mod < 1.0:
        if not is_real_root(lam):
            raise DomainError(f"non-real first-sheet root {lam} is unphysical")
        return StateClass.BOUND_LOWER if lam.real > 0 else StateClass.BOUND_UPPER
    if is_real_root(lam):
        return StateClass.VIRTUAL
    return StateClass.RESONANCE if energy.imag < 0 else StateClass.ANTI_RESONANCE


def normalize_state(params: ModelParams, lam: complex) -> tuple[complex, complex]:
    """Squared eigenvector components (psi0_sq, psid_sq).

    psi0_sq = g^2 lam^2 / D and psid_sq = (1 - lam^2)^2 / D with
    D = g^2 lam^2 (1 + lam^2) + (1 - lam^2)^3, so that the bi-orthogonal
    normalization (1 + lam^2) psi0_sq + (1 - lam^2) psid_sq = 1 holds
    identically.  Squared quantities are first-class here: no square-root
    branch is ever chosen.
    """
    lam = complex(lam)
    g2 = params.g**2
    one_m = 1.0 - lam * lam
    D = g2 * lam * lam * (1.0 + lam * lam) + one_m**3
    if abs(D) < 1e-300:
        raise DegenerateNormalizationError(
            f"normalization denominator vanished at lam = {lam}"
        )
    return g2 * lam * lam / D, one_m * one_m / D


def classify_and_normalize(params: ModelParams, states) -> list[DiscreteState]:
    out = []
    for s in states:
        cls = classify_state(s.lam, s.energy)
        p0, pd = normalize_state(params, s.lam)
        out.append(replace(s, state_class=cls, psi0_sq=p0, psid_sq=pd))
    return out


def discrete_spectrum(params: ModelParams, polish: str = "mp") -> list[DiscreteState]:
    """All four discrete states, classified and normalized."""
    return classify_and_normalize(params, solve_lambda_quartic(params, polish=polish))


def near_edge_triplet(params: ModelParams, polish: str = "mp") -> list[DiscreteState]:
    """The three states near the lower band edge (the fourth, the bound state
    above the upper edge, is dropped)."""
    states = discrete_spectrum(params, polish=polish)
    tri = [s for s in states if s.state_class is not StateClass.BOUND_UPPER]
    if len(tri) != 3:
        raise LabelMatchingError(
            f"expected exactly one upper bound state, got classes "
            f"{[s.state_class for s in states]}"
        )
    return tri


# Phase index alpha for the threshold triplet: 0 bound, -1 resonance,
# +1 anti-resonance.  Near lam = 1 the roots sit at arg(lam - 1) close to
# pi, +pi/3, -pi/3 respectively, which stays well conditioned however small
# |lam - 1| is.
_ALPHA_ARG = {0: np.pi, -1: np.pi / 3.0, 1: -np.pi / 3.0}


def threshold_labels(states) -> dict[int, DiscreteState]:
    """Assign alpha in {0, -1, +1} to the near-edge triplet by arg(lam - 1)."""
    if len(states) != 3:
        raise LabelMatchingError("need exactly three states to label")
    out: dict[int, DiscreteState] = {}
    for s in states:
        th = cmath.phase(s.lam - 1.0)
        alpha = min(_ALPHA_ARG, key=lambda a: abs(_wrap(th - _ALPHA_ARG[a])))
        if alpha in out:
            raise LabelMatchingError(
                f"two states map to alpha = {alpha}; g too large for labeling"
            )
        out[alpha] = s
    return out


def _wrap(x: float) -> float:
    return (x + np.pi) % (2.0 * np.pi) - np.pi


def eigenstate_profile(state: DiscreteState, x: int) -> complex:
    """Wave-function component <x|psi> = lam^|x| <0|psi> (x = 0 gives <0|psi>).

    The signed <0|psi> is the principal square root of psi0_sq; this global
    convention is the only place a square-root branch is taken.
    """
    if state.psi0_sq is None:
        raise DomainError("state must be normalized first")
    psi0 = cmath.sqrt(state.psi0_sq)
    return psi0 * state.lam ** abs(int(x))


# ---------------------------------------------------------------------------
# Puiseux expansions at threshold (eps_d = -2) in powers of g^(2/3)
# ---------------------------------------------------------------------------

_KIND_ALPHAS = {
    ExpansionKind.ENERGY_BOUND: (0,),
    ExpansionKind.LAMBDA_BOUND: (0,),
    ExpansionKind.NORM_D_BOUND: (0,),
    ExpansionKind.ENERGY_RES_ANTI: (-1, 1),
    ExpansionKind.LAMBDA_RES_ANTI: (-1, 1),
    ExpansionKind.NORM_D_RES_ANTI: (-1, 1),
}


@dataclass(frozen=True)
class PuiseuxExpansion:
    """Truncated expansion in x = g^(2/3); terms[k] multiplies x^(min_power+k)."""

    kind: ExpansionKind
    alpha: int
    beta: float  # (g^2/2)^(1/3)
    min_power: int
    terms: tuple[complex, ...]

    def value(self, g: float) -> complex:
        x = g ** (2.0 / 3.0)
        return sum(
            c * x ** (self.min_power + k) for k, c in enumerate(self.terms)
        )


def _ph(sign: int) -> complex:
    return cmath.exp(1j * sign * np.pi / 3.0)


def _expansion_terms(kind: ExpansionKind, alpha: int) -> tuple[int, tuple[complex, ...]]:
    """(min_power, coefficients) for the requested branch.

    The resonance (alpha = -1) energy branch carries e^{-i pi/3} on its
    leading g^{4/3} term while its lam branch carries e^{+i pi/3}; the
    anti-resonance (alpha = +1) is the complex conjugate throughout.
    """
    if kind is ExpansionKind.ENERGY_BOUND:
        return 0, (-2.0, 0.0, -1.0 / 2.0 ** (2.0 / 3.0), 0.0, 1.0 / (24.0 * CBRT2))
    if kind is ExpansionKind.ENERGY_RES_ANTI:
        # the g^{8/3} phase is -e^{-i pi alpha/3} = e^{2 pi i alpha/3} e^{i pi},
        # fixed against 60-digit roots: only this sign keeps the truncation
        # error at O(g^4)
        return 0, (
            -2.0,
            0.0,
            _ph(alpha) / 2.0 ** (2.0 / 3.0),
            0.0,
            -_ph(-alpha) / (24.0 * CBRT2),
        )
    if kind is ExpansionKind.LAMBDA_BOUND:
        return 0, (
            1.0,
            -1.0 / CBRT2,
            1.0 / 2.0 ** (5.0 / 3.0),
            -1.0 / 24.0,
            -1.0 / (48.0 * CBRT2),
        )
    if kind is ExpansionKind.LAMBDA_RES_ANTI:
        return 0, (
            1.0,
            _ph(-alpha) / CBRT2,
            -_ph(alpha) / 2.0 ** (5.0 / 3.0),
            -1.0 / 24.0,
            _ph(-alpha) / (48.0 * CBRT2),
        )
    if kind is ExpansionKind.NORM_D_BOUND:
        return -1, (CBRT2 / 3.0, 1.0 / 3.0, 1.0 / (9.0 * CBRT2))
    if kind is ExpansionKind.NORM_D_RES_ANTI:
        return -1, (-_ph(alpha) * CBRT2 / 3.0, 1.0 / 3.0, -_ph(-alpha) / (9.0 * CBRT2))
    raise DomainError(f"unknown expansion kind {kind}")


def puiseux_expansion(kind: ExpansionKind, alpha: int = 0, g: float = 0.0) -> PuiseuxExpansion:
    if alpha not in _KIND_ALPHAS[kind]:
        raise DomainError(f"alpha = {alpha} incompatible with {kind}")
    min_power, terms = _expansion_terms(kind, alpha)
    beta = (g**2 / 2.0) ** (1.0 / 3.0)
    return PuiseuxExpansion(kind=kind, alpha=alpha, beta=beta,
                            min_power=min_power, terms=terms)


def _truncate(exp: PuiseuxExpansion, n_terms: int) -> PuiseuxExpansion:
    nz = [i for i, c in enumerate(exp.terms) if c != 0]
    keep = nz[:n_terms]
    if not keep:
        return replace(exp, terms=(0.0,))
    last = keep[-1]
    return replace(exp, terms=exp.terms[: last + 1])


def puiseux_energy(g: float, kind: ExpansionKind, n_terms: int = 3, alpha: int = 0) -> complex:
    """Threshold energy expansion through g^(8/3) (n_terms nonzero terms)."""
    if kind not in (ExpansionKind.ENERGY_BOUND, ExpansionKind.ENERGY_RES_ANTI):
        raise DomainError("kind must be an energy expansion")
    if n_terms > 3:
        raise DomainError("energy expansion known through g^(8/3) (3 terms)")
    return _truncate(puiseux_expansion(kind, alpha, g), n_terms).value(g)


def puiseux_lambda(g: float, kind: ExpansionKind, n_terms: int = 5, alpha: int = 0) -> complex:
    """Threshold lam expansion through g^(8/3) (up to 5 terms)."""
    if kind not in (ExpansionKind.LAMBDA_BOUND, ExpansionKind.LAMBDA_RES_ANTI):
        raise DomainError("kind must be a lambda expansion")
    if n_terms > 5:
        raise DomainError("lambda expansion known through g^(8/3) (5 terms)")
    return _truncate(puiseux_expansion(kind, alpha, g), n_terms).value(g)


def puiseux_norm_d(g: float, kind: ExpansionKind, n_terms: int = 3, alpha: int = 0) -> complex:
    """Threshold expansion of <d|psi>^2; diverges as g^(-2/3)."""
    if kind not in (ExpansionKind.NORM_D_BOUND, ExpansionKind.NORM_D_RES_ANTI):
        raise DomainError("kind must be a norm expansion")
    if g == 0:
        raise DomainError("<d|psi>^2 diverges at g = 0 (leading term g^(-2/3))")
    if n_terms > 3:
        raise DomainError("norm expansion known through g^(2/3) (3 terms)")
    return _truncate(puiseux_expansion(kind, alpha, g), n_terms).value(g)


# ---------------------------------------------------------------------------
# Parameter scans
# ---------------------------------------------------------------------------

_CLASS_ORDER = {
    StateClass.BOUND_LOWER: 0,
    StateClass.VIRTUAL: 1,
    StateClass.RESONANCE: 2,
    StateClass.ANTI_RESONANCE: 3,
    StateClass.BOUND_UPPER: 4,
}


@dataclass(frozen=True)
class ScanRow:
    eps_d: float
    state: DiscreteState


def spectrum_scan(g: float, eps_start: float, eps_stop: float, step: float) -> list[ScanRow]:
    """Classified near-edge triplet for each eps_d on a uniform grid.

    Output ordering is deterministic: ascending eps_d, then class order
    (bound, virtual, resonance, anti-resonance).
    """
    if step <= 0:
        raise DomainError("step must be positive")
    n = int(np.floor((eps_stop - eps_start) / step + 1e-9))
    rows: list[ScanRow] = []
    for i in range(n + 1):
        eps = eps_start + i * step
        params = ModelParams(epsilon_d=eps, g=g)
        tri = near_edge_triplet(params, polish="fast")
        tri.sort(key=lambda s: (_CLASS_ORDER[s.state_class], s.energy.imag))
        for s in tri:
            rows.append(ScanRow(eps_d=eps, state=s))
    return rows
