"""Unitary circuit elements acting on hybrid photon/probe states.

The element set is a beam splitter (on system modes or on probe modes), a
phase shifter, and the Kerr cross-phase coupling that rotates a probe's
coherent amplitude conditioned on the photon occupying one of the coupled
system modes.  All appliers are pure functions returning new, merged states;
passing ``dagger=True`` applies the conjugate-transpose element, which is
how bra states evolve backward.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

from .states import Branch, HybridState, MERGE_TOL, merge_branches

SYS = "sys"
PROBE = "probe"


def _check_target(target: str) -> None:
    if target not in (SYS, PROBE):
        raise ValueError(f"target must be {SYS!r} or {PROBE!r}, got {target!r}")


@dataclass(frozen=True)
class BeamSplitter:
    """Two-port mixer with unitary [[-i r, t], [t, -i r]], t = sqrt(1 - r^2).

    ``target`` selects whether the ports are system modes (the photon
    amplitude splits into two branches) or probe modes (the coherent
    amplitudes mix linearly inside every branch, with the same matrix).
    """

    target: str
    mode_a: int
    mode_b: int
    reflectivity: float

    def __post_init__(self) -> None:
        _check_target(self.target)
        if self.mode_a == self.mode_b:
            raise ValueError("beam splitter ports must differ")
        if not 0.0 <= self.reflectivity <= 1.0:
            raise ValueError(f"reflectivity {self.reflectivity} outside [0, 1]")

    @property
    def transmissivity(self) -> float:
        r = self.reflectivity
        return math.sqrt(max(0.0, 1.0 - r * r))

    def unitary(self) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
        r = self.reflectivity
        t = self.transmissivity
        return ((-1j * r, t + 0j), (t + 0j, -1j * r))


@dataclass(frozen=True)
class KerrCoupling:
    """Cross-phase medium threading ``system_modes`` and one probe mode.

    A branch whose photon sits in one of ``system_modes`` has its coherent
    amplitude at ``probe_mode`` rotated by exp(-i eps_tau).  The photon-photon
    term of strength ``eta_tau`` couples the occupations of the two threaded
    system modes; with a single photon that product of occupations is
    identically zero, so it contributes no phase.  ``inner_branch_phase``
    optionally multiplies threaded branches by exp(-i inner_branch_phase)
    for conventions that carry such a prefactor explicitly.
    """

    system_modes: frozenset[int]
    probe_mode: int
    eps_tau: float
    eta_tau: float = 0.0
    inner_branch_phase: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "system_modes", frozenset(int(m) for m in self.system_modes))
        for name in ("eps_tau", "eta_tau", "inner_branch_phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class PhaseShift:
    """Phase exp(i phi) on one system mode's amplitude or one probe amplitude."""

    target: str
    index: int
    phi: float

    def __post_init__(self) -> None:
        _check_target(self.target)
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")


@dataclass(frozen=True)
class Snapshot:
    """Marker recording the state under ``label``; acts as the identity."""

    label: str


Element = Union[BeamSplitter, KerrCoupling, PhaseShift, Snapshot]


def _replace_probe(probes: tuple[complex, ...], idx: int, value: complex) -> tuple[complex, ...]:
    return probes[:idx] + (value,) + probes[idx + 1 :]


def apply_beam_splitter(
    state: HybridState, bs: BeamSplitter, dagger: bool = False, tol: float = MERGE_TOL
) -> HybridState:
    (u00, u01), (u10, u11) = bs.unitary()
    if dagger:
        u00, u01, u10, u11 = (
            u00.conjugate(),
            u10.conjugate(),
            u01.conjugate(),
            u11.conjugate(),
        )
    a, b = bs.mode_a, bs.mode_b
    if bs.target == SYS:
        if not (0 <= a < state.m_modes and 0 <= b < state.m_modes):
            raise IndexError(f"system modes ({a}, {b}) outside [0, {state.m_modes})")
        out: list[Branch] = []
        for br in state.branches:
            if br.mode == a:
                out.append(Branch(a, u00 * br.amp, br.probes))
                out.append(Branch(b, u10 * br.amp, br.probes))
            elif br.mode == b:
                out.append(Branch(a, u01 * br.amp, br.probes))
                out.append(Branch(b, u11 * br.amp, br.probes))
            else:
                out.append(br)
    else:
        if not (0 <= a < state.k_probes and 0 <= b < state.k_probes):
            raise IndexError(f"probe modes ({a}, {b}) outside [0, {state.k_probes})")
        out = []
        for br in state.branches:
            pa, pb = br.probes[a], br.probes[b]
            probes = _replace_probe(br.probes, a, u00 * pa + u01 * pb)
            probes = _replace_probe(probes, b, u10 * pa + u11 * pb)
            out.append(Branch(br.mode, br.amp, probes))
    return merge_branches(type(state)(state.m_modes, state.k_probes, tuple(out)), tol)


def apply_kerr(
    state: HybridState, coupling: KerrCoupling, dagger: bool = False, tol: float = MERGE_TOL
) -> HybridState:
    if not 0 <= coupling.probe_mode < state.k_probes:
        raise IndexError(f"probe mode {coupling.probe_mode} outside [0, {state.k_probes})")
    for m in coupling.system_modes:
        if not 0 <= m < state.m_modes:
            raise IndexError(f"system mode {m} outside [0, {state.m_modes})")
    sign = 1.0 if dagger else -1.0
    rot = cmath.exp(sign * 1j * coupling.eps_tau)
    branch_ph = cmath.exp(sign * 1j * coupling.inner_branch_phase)
    out = []
    for br in state.branches:
        if br.mode in coupling.system_modes:
            # The photon-photon term applies exp(-i eta_tau n_i n_j) over the
            # threaded mode pair; one photon occupies a single mode, so the
            # occupation product is 0 and the factor is exactly 1.
            probes = _replace_probe(
                br.probes, coupling.probe_mode, rot * br.probes[coupling.probe_mode]
            )
            out.append(Branch(br.mode, branch_ph * br.amp, probes))
        else:
            out.append(br)
    return merge_branches(type(state)(state.m_modes, state.k_probes, tuple(out)), tol)


def apply_phase(
    state: HybridState, shift: PhaseShift, dagger: bool = False, tol: float = MERGE_TOL
) -> HybridState:
    factor = cmath.exp((-1j if dagger else 1j) * shift.phi)
    out = []
    if shift.target == SYS:
        if not 0 <= shift.index < state.m_modes:
            raise IndexError(f"system mode {shift.index} outside [0, {state.m_modes})")
        for br in state.branches:
            if br.mode == shift.index:
                out.append(Branch(br.mode, factor * br.amp, br.probes))
            else:
                out.append(br)
    else:
        if not 0 <= shift.index < state.k_probes:
            raise IndexError(f"probe mode {shift.index} outside [0, {state.k_probes})")
        for br in state.branches:
            probes = _replace_probe(br.probes, shift.index, factor * br.probes[shift.index])
            out.append(Branch(br.mode, br.amp, probes))
    return merge_branches(type(state)(state.m_modes, state.k_probes, tuple(out)), tol)


def apply_element(
    state: HybridState, element: Element, dagger: bool = False, tol: float = MERGE_TOL
) -> HybridState:
    """Apply one element (or its conjugate transpose) to a state."""
    if isinstance(element, BeamSplitter):
        return apply_beam_splitter(state, element, dagger, tol)
    if isinstance(element, KerrCoupling):
        return apply_kerr(state, element, dagger, tol)
    if isinstance(element, PhaseShift):
        return apply_phase(state, element, dagger, tol)
    if isinstance(element, Snapshot):
        return state
    raise TypeError(f"unknown element {element!r}")
