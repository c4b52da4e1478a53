"""Branch-sparse joint states of one photon and K coherent probe fields.

A state is a finite superposition of branches.  Each branch pins the photon
to a single system mode and carries a complex amplitude plus one coherent
amplitude per probe mode.  Every circuit element used here maps coherent
states to coherent states, so tracking amplitudes is exact; inner products
pick up the analytic coherent-state overlap and need no Fock truncation.

Branches in the same mode merge only when their probe content matches, so
the representation stays sparse exactly when interfering paths share probe
histories (as in the interferometers built here).  A system beam splitter
can at worst double the branch count, so deep circuits that keep marking
branches distinctly grow it exponentially.

Bra (dual) vectors are stored un-conjugated, with conjugation applied inside
:func:`inner_product`; backward evolution can therefore reuse the element
code with conjugate-transposed matrices.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

#: Default absolute tolerance for merging duplicate branches and dropping
#: empty ones.  Well above double-precision noise, far below any physical
#: amplitude in the circuits simulated here.
MERGE_TOL = 1e-12


class DimensionMismatchError(ValueError):
    """Two states disagree on the number of system modes or probe modes."""


def _check_finite(z: complex, what: str) -> None:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite {what}: {z!r}")


@dataclass(frozen=True)
class Branch:
    """One superposition term: photon in ``mode``, probes in coherent states.

    ``mode`` is always a single index; a branch never holds the photon in a
    superposition of modes (that is what multiple branches are for).
    """

    mode: int
    amp: complex
    probes: tuple[complex, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", int(self.mode))
        object.__setattr__(self, "amp", complex(self.amp))
        object.__setattr__(self, "probes", tuple(complex(p) for p in self.probes))
        _check_finite(self.amp, "branch amplitude")
        for p in self.probes:
            _check_finite(p, "probe amplitude")


@dataclass(frozen=True)
class HybridState:
    """Superposition of :class:`Branch` terms over M system and K probe modes."""

    m_modes: int
    k_probes: int
    branches: tuple[Branch, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "branches", tuple(self.branches))
        for br in self.branches:
            if not 0 <= br.mode < self.m_modes:
                raise IndexError(
                    f"branch mode {br.mode} outside [0, {self.m_modes})"
                )
            if len(br.probes) != self.k_probes:
                raise DimensionMismatchError(
                    f"branch has {len(br.probes)} probe amplitudes, "
                    f"expected {self.k_probes}"
                )

    @classmethod
    def single_photon(
        cls,
        m_modes: int,
        mode: int,
        probes: tuple[complex, ...],
        amp: complex = 1.0,
    ) -> "HybridState":
        """State with one photon in ``mode`` and the given probe amplitudes."""
        probes = tuple(complex(p) for p in probes)
        return cls(m_modes, len(probes), (Branch(mode, amp, probes),))

    def norm_sq(self) -> float:
        """Squared norm including coherent cross terms between branches."""
        return inner_product(self, self).real

    def project_mode(self, mode: int) -> "HybridState":
        """Unnormalized restriction to branches with the photon in ``mode``."""
        if not 0 <= mode < self.m_modes:
            raise IndexError(f"mode {mode} outside [0, {self.m_modes})")
        kept = tuple(br for br in self.branches if br.mode == mode)
        return type(self)(self.m_modes, self.k_probes, kept)

    def scaled(self, factor: complex) -> "HybridState":
        return type(self)(
            self.m_modes,
            self.k_probes,
            tuple(Branch(b.mode, factor * b.amp, b.probes) for b in self.branches),
        )

    def normalized(self) -> "HybridState":
        n = self.norm_sq()
        if n <= 0.0:
            raise ValueError("cannot normalize a null state")
        return self.scaled(1.0 / math.sqrt(n))

    def as_bra(self) -> "BraState":
        """Reinterpret as a bra; the stored amplitudes are left untouched."""
        return BraState(self.m_modes, self.k_probes, self.branches)

    def as_ket(self) -> "HybridState":
        return HybridState(self.m_modes, self.k_probes, self.branches)


class BraState(HybridState):
    """Dual vector with the same storage layout as :class:`HybridState`.

    Conjugation happens inside :func:`inner_product`; evolving a bra
    backward through a circuit applies each element's conjugate transpose
    to this un-conjugated representation.
    """


def coherent_overlap(a: complex, b: complex) -> complex:
    """Overlap <a|b> of two coherent states.

    exp(-|a|^2/2 - |b|^2/2 + conj(a) b); equals 1 when a == b and has
    magnitude exp(-|a-b|^2/2) <= 1 in general.
    """
    a = complex(a)
    b = complex(b)
    return cmath.exp(
        -0.5 * (a.real * a.real + a.imag * a.imag)
        - 0.5 * (b.real * b.real + b.imag * b.imag)
        + a.conjugate() * b
    )


def inner_product(bra: HybridState, ket: HybridState) -> complex:
    """<bra|ket> with the first argument treated as the bra side.

    Branch pairs with different photon modes are orthogonal and drop out;
    matching pairs contribute conj(amp_bra) * amp_ket times the product of
    coherent overlaps of their probe amplitudes.
    """
    if bra.m_modes != ket.m_modes or bra.k_probes != ket.k_probes:
        raise DimensionMismatchError(
            f"shape ({bra.m_modes}, {bra.k_probes}) vs "
            f"({ket.m_modes}, {ket.k_probes})"
        )
    total = 0j
    for u in bra.branches:
        for v in ket.branches:
            if u.mode != v.mode:
                continue
            term = u.amp.conjugate() * v.amp
            for pu, pv in zip(u.probes, v.probes):
                term *= coherent_overlap(pu, pv)
            total += term
    return total


def _probes_close(p: tuple[complex, ...], q: tuple[complex, ...], tol: float) -> bool:
    return all(abs(a - b) <= tol for a, b in zip(p, q))


def merge_branches(state: HybridState, tol: float = MERGE_TOL) -> HybridState:
    """Combine duplicate branches, drop empty ones, sort canonically.

    Branches with equal mode and probe amplitudes within ``tol`` (absolute,
    per component) are summed; branches with ``|amp| < tol`` are removed.
    The result is sorted by mode, then lexicographically by probe
    amplitudes, so equal states compare equal branch-for-branch.
    """
    if tol < 0:
        raise ValueError("merge tolerance must be nonnegative")
    groups: list[Branch] = []
    for br in state.branches:
        for i, g in enumerate(groups):
            if g.mode == br.mode and _probes_close(g.probes, br.probes, tol):
                groups[i] = Branch(g.mode, g.amp + br.amp, g.probes)
                break
        else:
            groups.append(br)
    kept = [g for g in groups if abs(g.amp) >= tol]
    kept.sort(key=lambda b: (b.mode, tuple((p.real, p.imag) for p in b.probes)))
    return type(state)(state.m_modes, state.k_probes, tuple(kept))
