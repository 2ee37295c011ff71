"""State-quality metrics: target overlap fidelity and entanglement negativity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .fock_core import DensityOperator, PureState, Register
from .resource_states import coherent_amplitudes

# Dense eigensolves above this joint dimension get slow and memory hungry;
# refuse instead of silently grinding.
MAX_NEGATIVITY_DIM = 4096


def target_hybrid(
    alpha_f: float,
    phi: float,
    register: Register,
    labels: Tuple[str, str, str] = ("A_H", "A_V", "B"),
) -> PureState:
    """Hybrid entangled target: one photon in the first polarization mode
    next to |alpha_f> on the field mode, plus e^(i phi) times the flipped
    polarization next to |-alpha_f>, normalized after truncation.

    The polarization branches are orthogonal, so the ideal norm is exactly
    one; truncating the coherent tails changes it by less than 1e-10 when
    the field cutoff is adequate.
    """
    label_h, label_v, label_b = labels
    for label in labels:
        register.axis(label)
    if set(register.labels) != set(labels):
        raise ValidationError(
            f"target register must have exactly the modes {labels}, "
            f"got {register.labels}"
        )
    if register.mode(label_h).cutoff < 1 or register.mode(label_v).cutoff < 1:
        raise ValidationError("polarization modes need cutoff >= 1")

    ordered = register.subset(labels)
    dims = ordered.dims
    amps = np.zeros(dims, dtype=np.complex128)
    plus = coherent_amplitudes(alpha_f, register.mode(label_b).cutoff)
    minus = coherent_amplitudes(-alpha_f, register.mode(label_b).cutoff)
    amps[1, 0, :] = plus / np.sqrt(2.0)
    amps[0, 1, :] = np.exp(1j * phi) * minus / np.sqrt(2.0)
    state = PureState(ordered, amps, copy=False).normalized()
    return state.reordered(register.labels)


def fidelity(rho: DensityOperator, target: PureState) -> float:
    """Overlap <target| rho |target>, assuming a normalized target."""
    if rho.register != target.register:
        if set(rho.register.labels) == set(target.register.labels):
            target = target.reordered(rho.register.labels)
            if rho.register != target.register:
                raise ValidationError(
                    "fidelity operands have matching labels but different "
                    "cutoffs"
                )
        else:
            raise ValidationError(
                f"fidelity operands live on different registers: "
                f"{rho.register!r} vs {target.register!r}"
            )
    return float(rho.expectation(target))


@dataclass(frozen=True)
class Bipartition:
    """Split of a register's modes into two disjoint groups."""

    part_a: Tuple[str, ...]
    part_b: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "part_a", tuple(self.part_a))
        object.__setattr__(self, "part_b", tuple(self.part_b))
        overlap = set(self.part_a) & set(self.part_b)
        if overlap:
            raise ValidationError(f"bipartition parts overlap on {sorted(overlap)}")
        if not self.part_a or not self.part_b:
            raise ValidationError("both bipartition parts must be nonempty")

    def validate_against(self, register: Register) -> None:
        combined = set(self.part_a) | set(self.part_b)
        if combined != set(register.labels):
            raise ValidationError(
                f"bipartition {self.part_a} | {self.part_b} does not cover "
                f"register {register.labels}"
            )


def partial_transpose(rho: DensityOperator, part_a: Sequence[str]) -> DensityOperator:
    """Transpose the part_a indices of rho, leaving the rest alone.

    The result lives on the register reordered with part_a first. Applying
    the map twice gives back the (reordered) input.
    """
    part_a = tuple(part_a)
    rest = tuple(label for label in rho.register.labels if label not in set(part_a))
    for label in part_a:
        rho.register.axis(label)
    ordered = rho.reordered(part_a + rest)
    reg = ordered.register
    dim_a = int(np.prod([reg.mode(label).dim for label in part_a]))
    dim_b = reg.size // dim_a
    block = ordered.matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    swapped = np.ascontiguousarray(block.transpose(2, 1, 0, 3))
    return DensityOperator(
        reg, swapped.reshape(reg.size, reg.size), check=False, copy=False
    )


def negativity(rho: DensityOperator, partition: Bipartition) -> float:
    """Entanglement negativity: -2 times the sum of negative eigenvalues of
    the partial transpose. Zero for separable states; the target hybrid
    state gives sqrt(1 - e^(-4 alpha_f^2))."""
    partition.validate_against(rho.register)
    if rho.register.size > MAX_NEGATIVITY_DIM:
        raise ValidationError(
            f"register dimension {rho.register.size} exceeds the "
            f"{MAX_NEGATIVITY_DIM} limit for dense negativity"
        )
    pt = partial_transpose(rho, partition.part_a)
    eigenvalues = np.linalg.eigvalsh(pt.matrix)
    negative_part = eigenvalues[eigenvalues < 0.0].sum()
    return float(max(-2.0 * negative_part, 0.0))
