"""Closed-form single-particle results on the ring lattice.

A single particle on an N-site ring has plane-wave eigenstates labeled by
an integer winding number n: the phase advances by phi(n) = 2*pi*n/N per
bond and by a full 2*pi*n around the ring.  Their energies and currents
in the co-rotating frame are

    E(n) = -2 * (t*cos(phi) + omega*K*sin(phi))
    J(n) = +2*t*sin(phi) - 2*omega*K*cos(phi)

with the current sign fixed so the lab-rest state n = 0 lags a positive
drive (J < 0) and the quarter-phase state phi = pi/2 carries the
drive-independent maximum +2t.  J equals -d<H(theta)>/d(theta) under the
uniform bond twist convention of :mod:`ringlat.hamiltonian`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ContinuumSpec, DomainError, RingSpec

#: Treat |tan| below this as an exactly level pair of states (no crossing).
_CROSSING_EPS = 1e-9


@dataclass(frozen=True)
class WindingState:
    """Plane wave with integer winding n and per-bond phase 2*pi*n/N."""

    n: int
    phase: float


def winding_state(ring: RingSpec, n: int) -> WindingState:
    if not isinstance(n, int) or not 0 <= n < ring.n_sites:
        raise DomainError(f"n: winding must be an integer in [0, {ring.n_sites}), "
                          f"got {n!r}")
    return WindingState(n=n, phase=2.0 * math.pi * n / ring.n_sites)


def _check_state(state: WindingState, ring: RingSpec) -> None:
    expected = 2.0 * math.pi * state.n / ring.n_sites
    if not 0 <= state.n < ring.n_sites or state.phase != expected:
        raise DomainError(f"n: winding state {state!r} does not belong to a "
                          f"{ring.n_sites}-site ring")


def energy(state: WindingState, ring: RingSpec) -> float:
    """Rotating-frame energy of a winding state; linear in omega."""
    _check_state(state, ring)
    return -2.0 * (ring.t * math.cos(state.phase)
                   + ring.omega * ring.k_factor * math.sin(state.phase))


def current(state: WindingState, ring: RingSpec) -> float:
    """Integrated ring current of a winding state (units of t)."""
    _check_state(state, ring)
    return (2.0 * ring.t * math.sin(state.phase)
            - 2.0 * ring.omega * ring.k_factor * math.cos(state.phase))


def energy_slope(state: WindingState, ring: RingSpec) -> float:
    """dE/d(omega), used to resolve occupation order at level crossings."""
    _check_state(state, ring)
    return -2.0 * ring.k_factor * math.sin(state.phase)


def ground_winding(ring: RingSpec) -> WindingState:
    """Winding state minimizing E(n); exact ties resolve to the smaller n."""
    states = [winding_state(ring, n) for n in range(ring.n_sites)]
    return min(states, key=lambda s: (energy(s, ring), s.n))


def max_winding_number(ring: RingSpec) -> int:
    """Ground-state winding in the strong-drive limit omega*K >> t."""
    return ring.n_sites // 4


def crossing_frequency(n1: int, n2: int, ring: RingSpec) -> float | None:
    """Positive omega at which E(n1) = E(n2), or None if there is none.

    Equating the two linear-in-omega energies gives
    omega*K = t * tan((phi(n1) + phi(n2)) / 2); pairs whose midpoint angle
    has non-positive tangent never cross at positive drive, and pairs with
    equal sin(phi) (omega-independent splitting) never cross at all.
    """
    if n1 == n2:
        raise DomainError(f"n2: need two distinct windings, got {n1} twice")
    s1 = winding_state(ring, n1)
    s2 = winding_state(ring, n2)
    midpoint = 0.5 * (s1.phase + s2.phase)
    if abs(math.cos(midpoint)) < _CROSSING_EPS:
        return None
    tangent = math.tan(midpoint)
    if tangent <= _CROSSING_EPS:
        return None
    return ring.t * tangent / ring.k_factor


def fast_mode_threshold(ring: RingSpec) -> float:
    """Drive frequency above which the ground state has maximal winding.

    Solves E(n_m - 1) = E(n_m) in closed form:
    omega_c * K * (1 - cos(2*pi/N)) = t * sin(2*pi/N), i.e.
    omega_c = (t/K) / tan(pi/N).  The derivation assumes the maximal
    winding sits exactly at phase pi/2, so N must be divisible by 4; for
    other N use :func:`crossing_frequency` directly.
    """
    if ring.n_sites % 4 != 0:
        raise DomainError(f"n_sites: closed-form threshold needs n_sites "
                          f"divisible by 4, got {ring.n_sites}")
    alpha = 2.0 * math.pi / ring.n_sites
    return ring.t * math.sin(alpha) / (ring.k_factor * (1.0 - math.cos(alpha)))


def _sorted_windings(ring: RingSpec) -> list[WindingState]:
    states = [winding_state(ring, n) for n in range(ring.n_sites)]
    states.sort(key=lambda s: (energy(s, ring), s.n))
    return states


def polarized_current(n_particles: int, ring: RingSpec) -> float:
    """Total current of n identical fermions filling the lowest levels.

    With no interaction between identical fermions the ground state is the
    Fermi sea of the n lowest winding states; exact ties at the Fermi
    level resolve to the smaller winding.
    """
    if not 1 <= n_particles <= ring.n_sites:
        raise DomainError(f"n_particles: need 1 <= n <= {ring.n_sites}, "
                          f"got {n_particles!r}")
    occupied = _sorted_windings(ring)[:n_particles]
    return sum(current(s, ring) for s in occupied)


def polarized_occupation_limits(
    n_particles: int, ring: RingSpec, tol: float = 1e-9,
) -> tuple[tuple[WindingState, ...], tuple[WindingState, ...], bool]:
    """Occupied winding sets of the polarized Fermi sea at each side of a
    Fermi-level crossing.

    Returns ``(left, right, degenerate)``.  Away from a crossing both sets
    coincide.  At a crossing the sets differ just below and just above the
    current drive; the tied states are ordered by the slope dE/d(omega)
    (descending for the approach from below, ascending from above).
    """
    if not 1 <= n_particles <= ring.n_sites:
        raise DomainError(f"n_particles: need 1 <= n <= {ring.n_sites}, "
                          f"got {n_particles!r}")
    states = _sorted_windings(ring)
    scale = max(1.0, abs(energy(states[0], ring)))
    if n_particles == ring.n_sites:
        full = tuple(states)
        return full, full, False
    e_fermi = energy(states[n_particles - 1], ring)
    e_next = energy(states[n_particles], ring)
    if abs(e_next - e_fermi) > tol * scale:
        occupied = tuple(states[:n_particles])
        return occupied, occupied, False
    # Fermi level sits inside a degenerate cluster: split it by slope.
    below = [s for s in states if energy(s, ring) < e_fermi - tol * scale]
    cluster = [s for s in states if abs(energy(s, ring) - e_fermi) <= tol * scale]
    need = n_particles - len(below)
    by_slope = sorted(cluster, key=lambda s: (energy_slope(s, ring), s.n))
    left_pick = by_slope[::-1][:need]    # steepest slope was lowest before
    right_pick = by_slope[:need]         # shallowest slope is lowest after
    left = tuple(below) + tuple(left_pick)
    right = tuple(below) + tuple(right_pick)
    degenerate = {s.n for s in left_pick} != {s.n for s in right_pick}
    return left, right, degenerate


def polarized_current_limits(
    n_particles: int, ring: RingSpec, tol: float = 1e-9,
) -> tuple[float, float, bool]:
    """Left and right current limits of the polarized Fermi sea.

    Both limits coincide away from a Fermi-level crossing; exactly at one
    they bracket the jump and the degeneracy flag is set.
    """
    left, right, degenerate = polarized_occupation_limits(n_particles, ring, tol)
    left_sum = sum(current(s, ring) for s in left)
    right_sum = sum(current(s, ring) for s in right)
    return left_sum, right_sum, degenerate


def meanfield_energy_per_particle(
    state: WindingState, ring: RingSpec, density: float, u: float,
) -> float:
    """Condensate energy per particle when every boson shares one orbital.

    On a homogeneous ring the shared orbital is a plane wave at any
    interaction, so the interaction adds the winding-independent Hartree
    shift u*density and the minimizing winding is the noninteracting one.
    """
    if not (math.isfinite(density) and density >= 0):
        raise DomainError(f"density: must be >= 0, got {density!r}")
    return energy(state, ring) + u * density


def continuum_spectrum(n: int, spec: ContinuumSpec) -> float:
    """Energy of angular-momentum state n on the stirred continuum ring.

    E_n = (n - m*omega*R^2)^2 / (2*m*R^2) - m*omega^2*R^2 / 2; when
    m*omega*R^2 is a half integer k + 1/2 every level pairs up,
    E_{k+l+1} = E_{k-l}.
    """
    m_omega_r2 = spec.mass * spec.omega * spec.radius**2
    kinetic = (n - m_omega_r2) ** 2 / (2.0 * spec.mass * spec.radius**2)
    return kinetic - spec.mass * spec.omega**2 * spec.radius**2 / 2.0
