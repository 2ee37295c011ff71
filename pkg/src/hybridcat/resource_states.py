"""Factories for the input states of the scheme.

Single-mode resources: coherent states, superpositions of coherent states
(SCS), and squeezed single photons. Two-photon resources: the polarization
Bell pair, its vacuum-mixed variant, and parametric pair sources with
vacuum plus higher-order components.

Every factory returns a normalized state; truncation deficits can be probed
through the raw amplitude functions (`coherent_amplitudes`,
`squeezed_amplitudes`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import n_phi
from .errors import CutoffError, ValidationError
from .fock_core import (
    Ensemble,
    ModeSpec,
    PureState,
    Register,
    basis_state,
)

__all__ = [
    "ScsSpec",
    "SqueezedPhotonSpec",
    "PairSourceSpec",
    "coherent_amplitudes",
    "coherent_cutoff_for",
    "coherent",
    "scs",
    "squeezed_amplitudes",
    "squeezed_single_photon",
    "bell_chi",
    "phi_state",
    "pair_source",
]

COHERENT_TAIL_BOUND = 1e-10


# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class ScsSpec:
    """Superposition of coherent states N (|alpha> + e^{i phi} |-alpha>)."""

    alpha: float
    phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ValidationError(f"alpha must be finite and >= 0, got {self.alpha}")
        if abs(math.cos(self.phi) + 1.0) < 1e-9 and self.alpha <= 1e-6:
            raise ValidationError(
                "odd superposition normalization diverges for alpha <= 1e-6"
            )

    @property
    def normalization(self) -> float:
        return n_phi(self.alpha, self.phi)


@dataclass(frozen=True)
class SqueezedPhotonSpec:
    """Squeezed single photon with squeezing s, summation cutoff n_cut.

    The state populates odd occupations 1, 3, ..., 2 n_cut + 1.
    """

    s: float
    n_cut: int = 7

    def __post_init__(self) -> None:
        if not (math.isfinite(self.s) and self.s >= 0.0):
            raise ValidationError(f"squeezing must be finite and >= 0, got {self.s}")
        if self.n_cut < 1:
            raise ValidationError(f"n_cut must be >= 1, got {self.n_cut}")

    @property
    def fock_cutoff(self) -> int:
        return 2 * self.n_cut + 1


@dataclass(frozen=True)
class PairSourceSpec:
    """Photon-pair source: ideal Bell pair, vacuum-mixed, or parametric."""

    variant: str
    z: float = 1.0
    lam: float = 0.0
    order_max: int = 2
    weighting: str = "paper"

    def __post_init__(self) -> None:
        if self.variant not in ("chi", "vacuum_mixed", "spdc"):
            raise ValidationError(f"unknown pair-source variant {self.variant!r}")
        if self.variant == "vacuum_mixed" and not 0.0 < self.z <= 1.0:
            raise ValidationError(f"pair weight z={self.z} outside (0, 1]")
        if self.variant == "spdc":
            if not 0.0 <= self.lam < 1.0:
                raise ValidationError(
                    f"interaction strength lambda={self.lam} outside [0, 1)"
                )
            if self.order_max < 1:
                raise ValidationError(f"order_max must be >= 1, got {self.order_max}")
            if self.weighting not in ("paper", "exact"):
                raise ValidationError(
                    f"weighting must be 'paper' or 'exact', got {self.weighting!r}"
                )

    @classmethod
    def chi(cls) -> "PairSourceSpec":
        return cls("chi")

    @classmethod
    def vacuum_mixed(cls, z: float) -> "PairSourceSpec":
        return cls("vacuum_mixed", z=z)

    @classmethod
    def spdc(cls, lam: float, order_max: int = 2,
             weighting: str = "paper") -> "PairSourceSpec":
        return cls("spdc", lam=lam, order_max=order_max, weighting=weighting)


# ---------------------------------------------------------------------------
# single-mode resources


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Truncated coherent-state amplitudes c_n = e^{-|a|^2/2} a^n / sqrt(n!)."""
    if cutoff < 0:
        raise ValidationError(f"cutoff must be >= 0, got {cutoff}")
    n = np.arange(cutoff + 1)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, cutoff + 1)))))
    magnitude = np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * log_fact) \
        if alpha != 0 else np.where(n == 0, 1.0, 0.0)
    if alpha == 0:
        return magnitude.astype(np.complex128)
    phase = np.exp(1j * np.angle(complex(alpha)) * n)
    return magnitude * phase


def coherent_cutoff_for(alpha: complex, tail: float = COHERENT_TAIL_BOUND) -> int:
    """Smallest cutoff whose truncated coherent tail mass is below `tail`."""
    x = abs(alpha) ** 2
    if x == 0.0:
        return 0
    # scan the Poisson tail
    term = math.exp(-x)
    total = term
    n = 0
    while 1.0 - total > tail:
        n += 1
        term *= x / n
        total += term
        if n > 10_000:
            raise ValidationError(f"amplitude {alpha} too large to truncate")
    return n


def coherent(alpha: complex, cutoff: int, label: str = "mode") -> PureState:
    """Coherent state on a fresh single-mode register.

    The cutoff must leave a tail mass below 1e-10; the error message names
    the smallest acceptable cutoff.
    """
    amps = coherent_amplitudes(alpha, cutoff)
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if tail > COHERENT_TAIL_BOUND:
        raise CutoffError(
            f"coherent tail mass {tail:.3e} above {COHERENT_TAIL_BOUND:.0e}; "
            f"need cutoff >= {coherent_cutoff_for(alpha)}"
        )
    register = Register([ModeSpec(label, cutoff)])
    state = PureState(register, amps)
    return state.normalized()


def scs(spec: ScsSpec, cutoff: int, label: str = "mode") -> PureState:
    """Superposition of coherent states N (|alpha> + e^{i phi} |-alpha>)."""
    plus = coherent_amplitudes(spec.alpha, cutoff)
    minus = coherent_amplitudes(-spec.alpha, cutoff)
    amps = spec.normalization * (plus + np.exp(1j * spec.phi) * minus)
    weight = float(np.sum(np.abs(amps) ** 2))
    if 1.0 - weight > 1e-9:
        raise CutoffError(
            f"superposition tail mass {1.0 - weight:.3e} too large; "
            f"need cutoff >= {coherent_cutoff_for(spec.alpha)}"
        )
    register = Register([ModeSpec(label, cutoff)])
    return PureState(register, amps).normalized()


def squeezed_amplitudes(spec: SqueezedPhotonSpec, cutoff: int) -> np.ndarray:
    """Raw truncated amplitudes of the squeezed single photon.

    Occupation 2n+1 carries (tanh s)^n (cosh s)^{-3/2} sqrt((2n+1)!)/(2^n n!)
    for n = 0 .. n_cut; the vector is not renormalized.
    """
    if cutoff < spec.fock_cutoff:
        raise CutoffError(
            f"squeezed single photon with n_cut={spec.n_cut} needs mode "
            f"cutoff >= {spec.fock_cutoff}, got {cutoff}"
        )
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    tanh_s = math.tanh(spec.s)
    cosh_s = math.cosh(spec.s)
    for n in range(spec.n_cut + 1):
        weight = (
            tanh_s**n
            / cosh_s**1.5
            * math.sqrt(math.factorial(2 * n + 1))
            / (2**n * math.factorial(n))
        )
        amps[2 * n + 1] = weight
    return amps


def squeezed_single_photon(spec: SqueezedPhotonSpec, cutoff: int | None = None,
                           label: str = "mode") -> PureState:
    """Squeezed single photon, renormalized after the summation cutoff."""
    if cutoff is None:
        cutoff = spec.fock_cutoff
    amps = squeezed_amplitudes(spec, cutoff)
    register = Register([ModeSpec(label, cutoff)])
    return PureState(register, amps).normalized()


# ---------------------------------------------------------------------------
# photon-pair resources


def bell_chi(register: Register,
             labels: tuple = ("1H", "1V", "2H", "2V")) -> PureState:
    """Polarization Bell pair (|1001> + |0110>)/sqrt(2) on the four labeled
    modes of `register` (any other modes stay in vacuum)."""
    h1, v1, h2, v2 = labels
    for label in labels:
        if register.mode(label).cutoff < 1:
            raise CutoffError(f"mode {label!r} needs cutoff >= 1 for the pair")
    hv = basis_state(register, {h1: 1, v2: 1})
    vh = basis_state(register, {v1: 1, h2: 1})
    return (hv + vh) * (1.0 / math.sqrt(2.0))


def phi_state(n: int, register: Register,
              labels: tuple = ("1H", "1V", "2H", "2V")) -> PureState:
    """n-pair component of the parametric source.

    (n+1)^{-1/2} sum_m |m>_{1H} |n-m>_{1V} |n-m>_{2H} |m>_{2V}; the n = 0
    term is the vacuum and n = 1 is the Bell pair.
    """
    if n < 0:
        raise ValidationError(f"pair order must be >= 0, got {n}")
    h1, v1, h2, v2 = labels
    for label in labels:
        if register.mode(label).cutoff < n:
            raise CutoffError(
                f"mode {label!r} needs cutoff >= {n} for the {n}-pair component"
            )
    state = None
    for m in range(n + 1):
        term = basis_state(
            register, {h1: m, v1: n - m, h2: n - m, v2: m}
        )
        state = term if state is None else state + term
    return state * (1.0 / math.sqrt(n + 1.0))


def pair_source(spec: PairSourceSpec, register: Register,
                labels: tuple = ("1H", "1V", "2H", "2V")) -> Ensemble:
    """Photon-pair input as a weighted ensemble of pure states.

    chi: one unit-weight Bell pair. vacuum_mixed: branches (z, Bell pair)
    and (1-z, vacuum). spdc: a single pure branch sum_n c_n |Phi_n>
    truncated at order_max and renormalized, with c_n proportional to
    lambda^n ('paper' weighting) or lambda^n sqrt(n+1) ('exact' weighting,
    the product of two independent two-mode squeezers regrouped by total
    pair number).
    """
    if spec.variant == "chi":
        return Ensemble.pure(bell_chi(register, labels))
    if spec.variant == "vacuum_mixed":
        vacuum = basis_state(register, {})
        return Ensemble(
            register,
            [(spec.z, bell_chi(register, labels)), (1.0 - spec.z, vacuum)],
        )
    # parametric source
    state = None
    for n in range(spec.order_max + 1):
        weight = spec.lam**n
        if spec.weighting == "exact":
            weight *= math.sqrt(n + 1.0)
        term = phi_state(n, register, labels) * weight
        state = term if state is None else state + term
    return Ensemble.pure(state.normalized())
