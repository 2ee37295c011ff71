"""End-to-end simulation of the heralded hybrid-entanglement scheme.

The layout has four stages: a polarized superposition beam is tapped by a
transmissivity-t splitter, its reflected part interferes on a balanced
splitter with the displaced idler of a photon-pair source, the four
polarization-resolved detector channels are measured, and a joint click
pattern heralds the surviving polarization-qubit x field-mode state.

Mode labels: A_H/A_V hold the pair source's signal polarization, 2H/2V its
idler, 4H/4V the reflected tap of the beam, and B_H/B_V the transmitted
beam. After the balanced splitter the detector channels are relabeled
5H/5V (the idler side) and 6H/6V (the tap side); the kept field mode ends
up as B.

Internally `run_scheme` keeps the transmitted beam in the frame where it
occupies a single polarization channel, which leaves the orthogonal channel
exactly empty and lets it be dropped before the expensive interference
step. `build_prestate` instead returns the full eight-mode state in the lab
frame, right before detection.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import analytic
from .detection import build_scheme_herald, herald
from .errors import (
    HeraldImpossibleError,
    SimulationError,
    TruncationError,
    ValidationError,
)
from .fock_core import (
    DensityOperator,
    Ensemble,
    PureState,
    basis_state,
    build_register,
    project_vacuum,
    tensor,
)
from .metrics import Bipartition, fidelity, negativity, target_hybrid
from .optics import (
    BsParams,
    DisplacementSpec,
    apply_beam_splitter,
    apply_displacement,
    pbs_route,
    polarization_rotation,
    required_displacement_cutoff,
)
from .resource_states import (
    PairSourceSpec,
    ScsSpec,
    SqueezedPhotonSpec,
    bell_chi,
    coherent_cutoff_for,
    pair_source,
    phi_state,
    scs,
    squeezed_single_photon,
)

SCS_SOURCES = ("ideal", "squeezed")
PAIR_SOURCES = ("chi", "vacuum_mixed", "spdc")
DETECTORS = ("pnr", "onoff")
DISPLACEMENT_CONVENTIONS = ("diagonal", "parallel_h")
SWEEP_AXES = ("alpha_f", "eta", "lambda", "s", "t", "z")

# The dropped beam channel is empty by construction; anything above this is
# a programming error, not truncation.
BEAM_PROJECTION_TOL = 1e-10

_PAIR_LABELS = ("A_H", "A_V", "2H", "2V")
_DETECTOR_RELABEL = {"2H": "5H", "2V": "5V", "4H": "6H", "4V": "6V"}


@dataclass(frozen=True)
class SchemeConfig:
    """Full parameter set for one simulation run.

    Exactly one of alpha_i (source amplitude) and alpha_f (target amplitude,
    alpha_i = alpha_f / sqrt(t)) must be given. Cutoffs left at None are
    chosen automatically from the amplitudes involved; explicit values are
    honored as-is and may trigger truncation failures.
    """

    t: float
    eta: float
    phi: float = math.pi
    alpha_i: Optional[float] = None
    alpha_f: Optional[float] = None
    scs_source: str = "ideal"
    s: Optional[float] = None
    n_cut: int = 7
    pair_source: str = "chi"
    z: Optional[float] = None
    lam: Optional[float] = None
    spdc_order: int = 2
    spdc_weighting: str = "paper"
    detector: str = "pnr"
    displacement_convention: str = "diagonal"
    cutoff_a: Optional[int] = None
    cutoff_detector: Optional[int] = None
    cutoff_b: Optional[int] = None
    tail_tol: float = 1e-8

    def __post_init__(self):
        if not (0.0 < self.t <= 1.0):
            raise ValidationError(f"transmissivity t must be in (0, 1], got {self.t}")
        if not (0.0 <= self.eta <= 1.0):
            raise ValidationError(f"efficiency eta must be in [0, 1], got {self.eta}")
        if not math.isfinite(self.phi):
            raise ValidationError("phase phi must be finite")
        if (self.alpha_i is None) == (self.alpha_f is None):
            raise ValidationError("give exactly one of alpha_i and alpha_f")
        amplitude = self.alpha_i if self.alpha_i is not None else self.alpha_f
        if not (math.isfinite(amplitude) and amplitude >= 0.0):
            raise ValidationError(f"amplitude must be finite and >= 0, got {amplitude}")
        if self.scs_source not in SCS_SOURCES:
            raise ValidationError(f"scs_source must be one of {SCS_SOURCES}")
        if self.scs_source == "squeezed":
            if self.s is None:
                raise ValidationError("squeezed source needs the squeezing s")
            if not (math.isfinite(self.s) and self.s >= 0.0):
                raise ValidationError(f"squeezing s must be >= 0, got {self.s}")
            if self.n_cut < 1:
                raise ValidationError("n_cut must be >= 1")
        elif self.s is not None:
            raise ValidationError("s only applies to the squeezed source")
        if self.pair_source not in PAIR_SOURCES:
            raise ValidationError(f"pair_source must be one of {PAIR_SOURCES}")
        if self.pair_source == "vacuum_mixed":
            if self.z is None:
                raise ValidationError("vacuum_mixed pair source needs z")
            if not (0.0 < self.z <= 1.0):
                raise ValidationError(f"z must be in (0, 1], got {self.z}")
        elif self.z is not None:
            raise ValidationError("z only applies to the vacuum_mixed pair source")
        if self.pair_source == "spdc":
            if self.lam is None:
                raise ValidationError("spdc pair source needs lambda")
            if not (0.0 <= self.lam < 1.0):
                raise ValidationError(f"lambda must be in [0, 1), got {self.lam}")
            if self.spdc_order < 1:
                raise ValidationError("spdc_order must be >= 1")
            if self.spdc_weighting not in ("paper", "exact"):
                raise ValidationError("spdc_weighting must be 'paper' or 'exact'")
        elif self.lam is not None:
            raise ValidationError("lambda only applies to the spdc pair source")
        if self.detector not in DETECTORS:
            raise ValidationError(f"detector must be one of {DETECTORS}")
        if self.displacement_convention not in DISPLACEMENT_CONVENTIONS:
            raise ValidationError(
                f"displacement_convention must be one of {DISPLACEMENT_CONVENTIONS}"
            )
        for name in ("cutoff_a", "cutoff_detector", "cutoff_b"):
            value = getattr(self, name)
            if value is not None and (not isinstance(value, int) or value < 1):
                raise ValidationError(f"{name} must be a positive integer")
        if not (0.0 < self.tail_tol < 1.0):
            raise ValidationError("tail_tol must be in (0, 1)")

    @property
    def resolved_alpha_i(self) -> float:
        if self.alpha_i is not None:
            return float(self.alpha_i)
        return float(self.alpha_f) / math.sqrt(self.t)

    @property
    def resolved_alpha_f(self) -> float:
        if self.alpha_f is not None:
            return float(self.alpha_f)
        return float(self.alpha_i) * math.sqrt(self.t)


@dataclass(frozen=True)
class ResolvedCutoffs:
    a: int
    detector: int
    b: int


def resolve_cutoffs(config: SchemeConfig) -> ResolvedCutoffs:
    """Fock cutoffs for the three register groups.

    The pair-source polarization modes hold at most spdc_order photons. The
    detector channels see the tapped source field and the displacement,
    each of amplitude sqrt(r) alpha_i, so their cutoff covers the coherent
    sum of the two with the displacement operator's safety margin. The kept
    field mode holds the source beam, so it follows the coherent-tail bound
    (and the odd-photon expansion length for the squeezed source).
    """
    alpha_i = config.resolved_alpha_i
    x = math.sqrt(max(0.0, 1.0 - config.t)) * alpha_i

    if config.cutoff_a is not None:
        a = config.cutoff_a
    elif config.pair_source == "spdc":
        a = max(2, config.spdc_order)
    else:
        a = 2

    if config.cutoff_detector is not None:
        det = config.cutoff_detector
    else:
        det = max(4, required_displacement_cutoff(math.sqrt(2.0) * x))

    if config.cutoff_b is not None:
        b = config.cutoff_b
    else:
        b = max(14, coherent_cutoff_for(alpha_i, tail=1e-12))
        if config.scs_source == "squeezed":
            b = max(b, 2 * config.n_cut + 1)

    return ResolvedCutoffs(a=int(a), detector=int(det), b=int(b))


def _source_vector(config: SchemeConfig, cutoff: int) -> np.ndarray:
    if config.scs_source == "ideal":
        state = scs(ScsSpec(config.resolved_alpha_i, config.phi), cutoff, label="B_H")
    else:
        state = squeezed_single_photon(
            SqueezedPhotonSpec(config.s, config.n_cut), cutoff, label="B_H"
        )
    return state.amps


def _beam_state_full(config: SchemeConfig, cuts: ResolvedCutoffs) -> PureState:
    """Beam after the tap splitter, on (4H, 4V, B_H, B_V) in the lab frame."""
    register = build_register(
        [
            ("4H", cuts.detector),
            ("4V", cuts.detector),
            ("B_H", cuts.b),
            ("B_V", cuts.b),
        ]
    )
    amps = np.zeros(register.dims, dtype=np.complex128)
    amps[0, 0, :, 0] = _source_vector(config, cuts.b)
    state = PureState(register, amps, copy=False)
    if config.displacement_convention == "diagonal":
        state = polarization_rotation(state, "B_H", "B_V", -math.pi / 4.0)
    tap = BsParams.from_transmissivity(config.t)
    state = apply_beam_splitter(state, "4H", "B_H", tap, tail_tol=config.tail_tol)
    state = apply_beam_splitter(state, "4V", "B_V", tap, tail_tol=config.tail_tol)
    return state


def _beam_state(config: SchemeConfig, cuts: ResolvedCutoffs):
    """Beam reduced to (4H, 4V, B_H) with the empty channel dropped."""
    state = _beam_state_full(config, cuts)
    if config.displacement_convention == "diagonal":
        state = polarization_rotation(state, "B_H", "B_V", math.pi / 4.0)
    state, removed = project_vacuum(state, "B_V")
    if removed > BEAM_PROJECTION_TOL:
        raise TruncationError(
            f"dropped beam channel holds probability {removed:.3e}; "
            "it should be empty by construction"
        )
    return state, float(removed)


def _pair_spec(config: SchemeConfig) -> PairSourceSpec:
    if config.pair_source == "chi":
        return PairSourceSpec.chi()
    if config.pair_source == "vacuum_mixed":
        return PairSourceSpec.vacuum_mixed(config.z)
    return PairSourceSpec.spdc(config.lam, config.spdc_order, config.spdc_weighting)


def _displace_idler(
    ensemble: Ensemble, config: SchemeConfig, cuts: ResolvedCutoffs
) -> Ensemble:
    x = math.sqrt(max(0.0, 1.0 - config.t)) * config.resolved_alpha_i
    if config.displacement_convention == "diagonal":
        specs = [
            DisplacementSpec(x / math.sqrt(2.0), "2H"),
            DisplacementSpec(x / math.sqrt(2.0), "2V"),
        ]
    else:
        specs = [DisplacementSpec(x, "2H")]
    branches = []
    for weight, state in ensemble:
        for spec in specs:
            state = apply_displacement(state, spec, tail_tol=config.tail_tol)
        branches.append((weight, state))
    return Ensemble(ensemble.register, tuple(branches))


def _pair_register(cuts: ResolvedCutoffs):
    return build_register(
        [
            ("A_H", cuts.a),
            ("A_V", cuts.a),
            ("2H", cuts.detector),
            ("2V", cuts.detector),
        ]
    )


def _pair_ensemble(config: SchemeConfig, cuts: ResolvedCutoffs) -> Ensemble:
    register = _pair_register(cuts)
    ensemble = pair_source(_pair_spec(config), register, labels=_PAIR_LABELS)
    return _displace_idler(ensemble, config, cuts)


def _pure_pair_component(
    n: int, config: SchemeConfig, cuts: ResolvedCutoffs
) -> Ensemble:
    """Displaced pure n-pair component of the downconversion expansion."""
    register = _pair_register(cuts)
    if n == 0:
        state = basis_state(register, (0, 0, 0, 0))
    elif n == 1:
        state = bell_chi(register, labels=_PAIR_LABELS)
    else:
        state = phi_state(n, register, labels=_PAIR_LABELS)
    return _displace_idler(Ensemble.pure(state), config, cuts)


def _interfere(pair_branch: PureState, beam: PureState, config: SchemeConfig):
    joint = tensor(pair_branch, beam)
    half = BsParams.from_transmissivity(0.5)
    joint = apply_beam_splitter(joint, "4H", "2H", half, tail_tol=config.tail_tol)
    joint = apply_beam_splitter(joint, "4V", "2V", half, tail_tol=config.tail_tol)
    return joint


def _route(state: PureState) -> PureState:
    relabeled = state.relabeled(_DETECTOR_RELABEL)
    register = pbs_route(pbs_route(relabeled.register, "5"), "6")
    return PureState(register, relabeled.amps, copy=False)


@dataclass(frozen=True)
class SchemeResult:
    """One heralded run: success probability summed over both click
    patterns, the combined conditional state on (A_H, A_V, B), its overlap
    with the target, and the polarization/field negativity."""

    probability_total: float
    fidelity: float
    negativity: float
    post_state: DensityOperator
    diagnostics: Dict[str, object]


def _analytic_scale(config: SchemeConfig) -> Optional[float]:
    """Weight of the closed-form total probability this run should track,
    or None when no closed form applies."""
    if config.scs_source != "ideal":
        return None
    if config.detector != "pnr":
        return None
    if config.displacement_convention != "diagonal":
        return None
    if config.pair_source == "spdc":
        return None
    return config.z if config.pair_source == "vacuum_mixed" else 1.0


def _heralded_bundle(
    config: SchemeConfig, pair_component: Optional[int] = None
) -> SchemeResult:
    cuts = resolve_cutoffs(config)
    beam, beam_loss = _beam_state(config, cuts)
    if pair_component is None:
        ensemble = _pair_ensemble(config, cuts)
    else:
        ensemble = _pure_pair_component(pair_component, config, cuts)

    branches = []
    tails = []
    for weight, state in ensemble:
        joint = _interfere(state, beam, config)
        deficit = max(0.0, 1.0 - float(joint.norm()) ** 2)
        tails.append(deficit)
        branches.append((weight, _route(joint)))
    register = branches[0][1].register
    routed = Ensemble(register, tuple(branches))

    worst_tail = max(tails)
    if worst_tail > config.tail_tol:
        raise TruncationError(
            f"truncation lost probability {worst_tail:.3e}, above the "
            f"tolerance {config.tail_tol:.0e}; raise the cutoffs"
        )

    results = []
    for flipped in (False, True):
        spec = build_scheme_herald(register, config.detector, config.eta, flipped)
        try:
            results.append(herald(routed, spec))
        except HeraldImpossibleError:
            results.append(None)
    if results[0] is None and results[1] is None:
        raise HeraldImpossibleError(
            "neither herald pattern has nonzero probability"
        )

    p_plain = results[0].probability if results[0] else 0.0
    p_flip = results[1].probability if results[1] else 0.0
    total = p_plain + p_flip

    pieces = []
    if results[0] is not None:
        pieces.append((p_plain, results[0].post))
    if results[1] is not None:
        corrected = (
            results[1]
            .post.relabeled({"A_H": "A_V", "A_V": "A_H"})
            .reordered(("A_H", "A_V", "B_H"))
        )
        pieces.append((p_flip, corrected))
    matrix = sum(p * piece.matrix for p, piece in pieces) / total
    post = DensityOperator(pieces[0][1].register, matrix, check=False, copy=False)
    post = post.relabeled({"B_H": "B"})

    target = target_hybrid(config.resolved_alpha_f, config.phi, post.register)
    fid = fidelity(post, target)
    neg = negativity(post, Bipartition(("A_H", "A_V"), ("B",)))

    diagnostics: Dict[str, object] = {
        "pattern_probabilities": (p_plain, p_flip),
        "branch_pattern_probabilities": (
            results[0].branch_probabilities if results[0] else None,
            results[1].branch_probabilities if results[1] else None,
        ),
        "worst_tail_mass": worst_tail,
        "beam_projection_loss": beam_loss,
        "cutoffs": dataclasses.asdict(cuts),
    }
    scale = _analytic_scale(config) if pair_component is None else None
    if scale is not None:
        reference = analytic.p_tot_eta(
            config.resolved_alpha_f, config.t, config.eta, config.phi
        )
        if reference > 0.0:
            diagnostics["analytic_p_tot"] = scale * reference
            diagnostics["numeric_analytic_ratio"] = total / (scale * reference)

    return SchemeResult(
        probability_total=float(total),
        fidelity=fid,
        negativity=neg,
        post_state=post,
        diagnostics=diagnostics,
    )


def run_scheme(config: SchemeConfig) -> SchemeResult:
    """Simulate one heralded run of the scheme.

    Both click patterns contribute; the flipped pattern's state enters after
    the deterministic polarization bit flip that maps it onto the plain
    one. The reported fidelity is against the hybrid target at the
    configured alpha_f and phi.
    """
    result = _heralded_bundle(config)
    if config.pair_source == "spdc":
        (p_vac, p_chi, p_phi2), _ = _spdc_components(_component_key(config))
        result.diagnostics["p_vac"] = p_vac
        result.diagnostics["p_chi"] = p_chi
        result.diagnostics["p_phi2"] = p_phi2
    return result


def build_prestate(config: SchemeConfig) -> Ensemble:
    """Joint state of all eight modes right before detection, in the lab
    polarization frame, ordered (A_H, A_V, 5H, 5V, 6H, 6V, B_H, B_V).

    This is the reference representation; `run_scheme` works in a reduced
    one that drops the structurally empty beam channel early. The two agree
    after rotating the B channels into the beam frame and projecting the
    empty channel out.
    """
    cuts = resolve_cutoffs(config)
    beam = _beam_state_full(config, cuts)
    ensemble = _pair_ensemble(config, cuts)
    branches = []
    for weight, state in ensemble:
        joint = _interfere(state, beam, config)
        branches.append((weight, _route(joint)))
    return Ensemble(branches[0][1].register, tuple(branches))


def _component_key(config: SchemeConfig) -> SchemeConfig:
    return dataclasses.replace(config, lam=0.0)


@lru_cache(maxsize=32)
def _spdc_components(key: SchemeConfig):
    probs = []
    fids = []
    for n in (0, 1, 2):
        try:
            bundle = _heralded_bundle(key, pair_component=n)
            probs.append(bundle.probability_total)
            fids.append(bundle.fidelity)
        except HeraldImpossibleError:
            probs.append(0.0)
            fids.append(0.0)
    return tuple(probs), tuple(fids)


def spdc_decomposition(config: SchemeConfig) -> Dict[str, float]:
    """Pair-number decomposition of a downconversion-driven run.

    Runs the vacuum, one-pair, and two-pair components separately (they do
    not interfere once the herald pattern is fixed, since the detector
    weights are photon-number diagonal and the components occupy different
    total-number sectors of the signal modes) and recombines them with the
    configured lambda weighting. Returns p_vac, p_chi, p_phi2 (herald
    probabilities of the components), f_chi (one-pair fidelity), f_eff
    (probability-weighted fidelity), and p_tot (weighted total
    probability).
    """
    if config.pair_source != "spdc":
        raise ValidationError("decomposition applies to the spdc pair source")
    if config.spdc_order < 2:
        raise ValidationError("decomposition needs spdc_order >= 2")
    (p_vac, p_chi, p_phi2), (f_vac, f_chi, f_phi2) = _spdc_components(
        _component_key(config)
    )
    lam = float(config.lam)
    lam2 = lam * lam
    if config.spdc_weighting == "paper":
        p_tot = (1.0 - lam2) * (p_vac + lam2 * p_chi + lam2 * lam2 * p_phi2)
        f_eff = analytic.f_eff(p_vac, p_chi, p_phi2, lam, f_chi)
    else:
        # each n-pair component carries an extra factor n + 1 in weight and
        # the normalization squares
        norm = (1.0 - lam2) ** 2
        p_tot = norm * (p_vac + 2.0 * lam2 * p_chi + 3.0 * lam2 * lam2 * p_phi2)
        denominator = p_vac + 2.0 * lam2 * p_chi + 3.0 * lam2 * lam2 * p_phi2
        if denominator <= 0.0:
            raise ValidationError("all decomposition components have zero weight")
        f_eff = 2.0 * lam2 * p_chi * f_chi / denominator
    return {
        "p_vac": float(p_vac),
        "p_chi": float(p_chi),
        "p_phi2": float(p_phi2),
        "f_chi": float(f_chi),
        "f_eff": float(f_eff),
        "p_tot": float(p_tot),
    }


@dataclass(frozen=True)
class SweepRow:
    params: Tuple[Tuple[str, float], ...]
    fidelity: Optional[float]
    probability_total: Optional[float]
    negativity: Optional[float]
    p_vac: Optional[float]
    p_chi: Optional[float]
    p_phi2: Optional[float]
    tail_mass: Optional[float]
    status: str


@dataclass(frozen=True)
class SweepTable:
    axes: Tuple[str, ...]
    rows: Tuple[SweepRow, ...]


def _apply_point(
    config: SchemeConfig, axes: Sequence[str], point: Sequence[float]
) -> SchemeConfig:
    updates: Dict[str, object] = {}
    for axis, value in zip(axes, point):
        if axis == "lambda":
            updates["lam"] = value
        elif axis == "alpha_f":
            updates["alpha_f"] = value
            updates["alpha_i"] = None
        else:
            updates[axis] = value
    return dataclasses.replace(config, **updates)


def _evaluate_point(
    config: SchemeConfig, axes: Tuple[str, ...], point: Tuple[float, ...]
) -> SweepRow:
    params = tuple(zip(axes, point))
    try:
        cfg = _apply_point(config, axes, point)
        if cfg.pair_source == "spdc":
            dec = spdc_decomposition(cfg)
            return SweepRow(
                params=params,
                fidelity=dec["f_eff"],
                probability_total=dec["p_tot"],
                negativity=None,
                p_vac=dec["p_vac"],
                p_chi=dec["p_chi"],
                p_phi2=dec["p_phi2"],
                tail_mass=None,
                status="ok",
            )
        result = run_scheme(cfg)
        return SweepRow(
            params=params,
            fidelity=result.fidelity,
            probability_total=result.probability_total,
            negativity=result.negativity,
            p_vac=None,
            p_chi=None,
            p_phi2=None,
            tail_mass=float(result.diagnostics["worst_tail_mass"]),
            status="ok",
        )
    except SimulationError as exc:
        return SweepRow(
            params=params,
            fidelity=None,
            probability_total=None,
            negativity=None,
            p_vac=None,
            p_chi=None,
            p_phi2=None,
            tail_mass=None,
            status=f"error:{type(exc).__name__}",
        )


def sweep(
    config: SchemeConfig,
    grid: Mapping[str, Sequence[float]],
    threads: int = 1,
) -> SweepTable:
    """Evaluate the scheme over a cartesian parameter grid.

    Axes are sorted by name and each axis's values ascending, so the row
    order is deterministic regardless of input ordering. Rows that fail
    validation or hit numerical limits are reported with an error status
    instead of aborting the sweep. Downconversion configs report the
    decomposition quantities (f_eff as the fidelity column); all others
    report the plain heralded run.
    """
    if not grid:
        raise ValidationError("sweep grid must name at least one axis")
    axes = tuple(sorted(grid))
    values = []
    for axis in axes:
        if axis not in SWEEP_AXES:
            raise ValidationError(
                f"unknown sweep axis {axis!r}; valid axes: {SWEEP_AXES}"
            )
        axis_values = [float(v) for v in grid[axis]]
        if not axis_values:
            raise ValidationError(f"sweep axis {axis!r} has no values")
        values.append(tuple(sorted(axis_values)))
    points = list(itertools.product(*values))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            rows = list(
                pool.map(lambda p: _evaluate_point(config, axes, p), points)
            )
    else:
        rows = [_evaluate_point(config, axes, point) for point in points]
    return SweepTable(axes=axes, rows=tuple(rows))
