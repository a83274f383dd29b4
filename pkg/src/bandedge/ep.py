"""Exceptional points of the detuned emitter: closed forms, certification, sheets.

Away from threshold the three near-edge states exhibit three ordinary EP2s:
one at real eps_d (where the two virtual states merge into the resonance /
anti-resonance pair) and a complex-conjugate pair visible only for complex
eps_d.  The coalesced energies are the negative roots of the double cubic

    (E^2 - 4)^3 = g^4 E^2.

No EP is ever trusted from the closed form alone: each candidate is certified
by the double-root residuals of the energy quartic plus coincidence of the
lam roots (guarding against the squaring step that produced the quartic).
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError
from .spectrum import energy_quartic_coeffs, solve_quartic_lambda_raw

DOUBLE_ROOT_TOL = 1e-8
EP_GAP_TOL = 1e-6


@dataclass(frozen=True)
class EPLocation:
    """A certified second-order exceptional point."""

    n: int                 # branch index -1, 0, +1
    energy: complex        # coalesced eigenvalue
    eps_d: complex         # parameter value where the coalescence happens
    g: float


def ep_condition_residual(E: complex, g: float) -> complex:
    """(E^2 - 4)^3 - g^4 E^2; zero exactly at a coalesced eigenvalue."""
    E = complex(E)
    return (E * E - 4.0) ** 3 - g**4 * E * E


def ep_energy_closed_form(g: float, n: int) -> complex:
    """Coalesced eigenvalue E_bar_n near the lower band edge, n in {-1, 0, 1}.

    Cardano solution of the cubic in y = E^2 - 4:

        E_bar_n = -sqrt(4 + w u + w^2 v),   w = exp(2 pi i n / 3),

    with u, v the real cube roots of g^4 (2 +/- sqrt(36 - g^4/3)/3).  Both
    radicands are positive for 0 < g^4 < 108, so the principal real cube
    roots already satisfy Cardano's constraint u v = g^4 / 3; the result is
    certified against the defining condition rather than assumed.
    """
    if n not in (-1, 0, 1):
        raise DomainError(f"branch index must be -1, 0 or 1, got {n}")
    if not (0.0 < g and g**4 < 108.0):
        raise DomainError(f"g = {g} outside the safe range 0 < g^4 < 108")
    s = np.sqrt(36.0 - g**4 / 3.0) / 3.0
    u = g ** (4.0 / 3.0) * np.cbrt(2.0 + s)
    v = g ** (4.0 / 3.0) * np.cbrt(2.0 - s)
    w1 = cmath.exp(2j * np.pi * n / 3.0)
    w2 = cmath.exp(4j * np.pi * n / 3.0)
    E = -cmath.sqrt(4.0 + w1 * u + w2 * v)
    res = abs(ep_condition_residual(E, g))
    if res > 1e-10 * max(1.0, g**4):
        raise ConsistencyError(f"closed-form EP energy failed its own condition: {res:.3e}")
    if n == 0:
        E = complex(E.real, 0.0)
    return E


def verify_ep_by_discriminant(g: float, eps_d: complex) -> tuple[float, float]:
    """(min energy gap, lam gap of that pair) over the four discrete roots.

    A genuine EP needs both gaps small: an energy near-degeneracy with
    distinct lam roots is a first/second sheet accident, not a coalescence.
    """
    lams = solve_quartic_lambda_raw(eps_d, g, polish="mp")
    Es = -lams - 1.0 / lams
    best = None
    for i in range(4):
        for j in range(i + 1, 4):
            gap = abs(Es[i] - Es[j])
            if best is None or gap < best[0]:
                best = (gap, abs(lams[i] - lams[j]))
    return best


def ep_parameter(g: float, n: int) -> EPLocation:
    """Locate the EP2 on branch n: the eps_d making E_bar_n a double root.

    eps_d = E_bar - Sigma(E_bar) with the square-root branch chosen so that
    the energy quartic genuinely has a double root there (certified through
    |p| and |p'|, never assumed).  For n = 0 the result is real.
    """
    E = ep_energy_closed_form(g, n)
    sq = cmath.sqrt(E * E - 4.0)
    for sign in (+1.0, -1.0):
        eps = E - sign * g**2 / sq
        co = energy_quartic_coeffs(eps, g)
        dco = np.polyder(co)
        p_res = abs(np.polyval(co, E))
        dp_res = abs(np.polyval(dco, E))
        if p_res < DOUBLE_ROOT_TOL and dp_res < DOUBLE_ROOT_TOL:
            gap, lam_gap = verify_ep_by_discriminant(g, eps)
            if gap < EP_GAP_TOL and lam_gap < 1e-3:
                if n == 0:
                    eps = complex(eps.real, 0.0)
                return EPLocation(n=n, energy=E, eps_d=eps, g=g)
    raise ConsistencyError(
        f"no self-energy branch yields a certified double root for n = {n}"
    )


def all_ep_locations(g: float) -> list[EPLocation]:
    return [ep_parameter(g, n) for n in (-1, 0, 1)]


# ---------------------------------------------------------------------------
# Complex-parameter sheet data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SheetCell:
    eps_d: complex
    energies: tuple[complex, complex, complex]  # continuity-tracked branches


def _near_edge_energies(eps_d: complex, g: float):
    """Three near-lower-edge eigenvalues for a possibly complex eps_d."""
    lams = solve_quartic_lambda_raw(eps_d, g, polish="fast")
    Es = -lams - 1.0 / lams
    # drop the continuation of the upper-edge bound state
    keep = np.argsort(Es.real)[:3]
    return Es[np.sort(keep)], lams[np.sort(keep)]


def _match_to(
    prev: np.ndarray, prev_lams: np.ndarray, Es: np.ndarray, lams: np.ndarray
) -> np.ndarray:
    """Order Es to minimize total distance to prev; ties broken on lam."""
    best, best_cost = None, None
    for perm in itertools.permutations(range(3)):
        cost_e = sum(abs(Es[p] - prev[i]) for i, p in enumerate(perm))
        cost_l = sum(abs(lams[p] - prev_lams[i]) for i, p in enumerate(perm))
        cost = (round(cost_e / 1e-12), cost_l)
        if best_cost is None or cost < best_cost:
            best, best_cost = perm, cost
    return np.array(best)


def complex_parameter_sheet(
    g: float,
    re_grid: np.ndarray,
    im_grid: np.ndarray,
) -> list[SheetCell]:
    """Three near-edge eigenvalue sheets over a complex eps_d grid.

    Branches are continuity-tracked: within each constant-Im scan line the
    eigenvalues are matched to the previous cell by nearest energy, and the
    first cell of each line is matched to the line below, so the branch_id
    of the output is continuous wherever the sheets do not intersect.
    """
    re_grid = np.asarray(re_grid, dtype=float)
    im_grid = np.asarray(im_grid, dtype=float)
    cells: list[SheetCell] = []
    prev_line_first = None
    for im in im_grid:
        prev = prev_line_first
        line_first = None
        for re in re_grid:
            eps = complex(re, im)
            Es, lams = _near_edge_energies(eps, g)
            if prev is not None:
                order = _match_to(prev[0], prev[1], Es, lams)
                Es, lams = Es[order], lams[order]
            cells.append(SheetCell(eps_d=eps, energies=tuple(Es)))
            prev = (Es, lams)
            if line_first is None:
                line_first = (Es, lams)
        prev_line_first = line_first
    return cells


def scan_consistency_rows(cells: list[SheetCell]) -> list[tuple]:
    """Flatten sheet cells to (re_eps, im_eps, branch_id, re_E, im_E) rows."""
    rows = []
    for c in cells:
        for b, E in enumerate(c.energies):
            rows.append((c.eps_d.real, c.eps_d.imag, b, E.real, E.imag))
    return rows
