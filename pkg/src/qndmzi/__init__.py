"""Exact single-photon simulator for a nested Mach-Zehnder interferometer
whose inner arms are probed through Kerr cross-phase coupling to coherent
fields, with post-selection, fringe, weak-value and dark-port-leakage
analysis."""

from .analysis import (
    FringeScan,
    LeakagePoint,
    OVERLAP_THRESHOLD,
    PostSelectionResult,
    TsvfReport,
    fringe_scan,
    leakage_sweep,
    mean_probe_photons,
    postselect,
    state_fidelity,
    tsvf_report,
)
from .circuit import (
    Circuit,
    FINAL_STAGE,
    SOURCE_STAGE,
    StageTrace,
    build_nested_mzi,
    default_final_bra,
    probe_optics_image,
    run_backward,
    run_both,
    run_forward,
)
from .elements import (
    BeamSplitter,
    Element,
    KerrCoupling,
    PhaseShift,
    PROBE,
    SYS,
    Snapshot,
    apply_beam_splitter,
    apply_element,
    apply_kerr,
    apply_phase,
)
from .fileformat import (
    CircuitFormatError,
    format_complex,
    parse_circuit,
    parse_complex,
    serialize_circuit,
)
from .states import (
    Branch,
    BraState,
    DimensionMismatchError,
    HybridState,
    MERGE_TOL,
    coherent_overlap,
    inner_product,
    merge_branches,
)

__all__ = [
    "Branch",
    "BraState",
    "BeamSplitter",
    "Circuit",
    "CircuitFormatError",
    "DimensionMismatchError",
    "Element",
    "FINAL_STAGE",
    "FringeScan",
    "HybridState",
    "KerrCoupling",
    "LeakagePoint",
    "MERGE_TOL",
    "OVERLAP_THRESHOLD",
    "PhaseShift",
    "PostSelectionResult",
    "PROBE",
    "SOURCE_STAGE",
    "Snapshot",
    "StageTrace",
    "SYS",
    "TsvfReport",
    "apply_beam_splitter",
    "apply_element",
    "apply_kerr",
    "apply_phase",
    "build_nested_mzi",
    "coherent_overlap",
    "default_final_bra",
    "fringe_scan",
    "format_complex",
    "inner_product",
    "leakage_sweep",
    "mean_probe_photons",
    "merge_branches",
    "parse_circuit",
    "parse_complex",
    "postselect",
    "probe_optics_image",
    "run_backward",
    "run_both",
    "run_forward",
    "serialize_circuit",
    "state_fidelity",
    "tsvf_report",
]
