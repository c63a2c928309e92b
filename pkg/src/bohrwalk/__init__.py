"""Exact conjugation-orbit dynamics, window-set searches, and diagnostics."""

__version__ = "0.1.0"

from .intmat import (
    AdjointOperator,
    CoordVector,
    IntPolynomial,
    SquareIntMatrix,
    TracelessIntMatrix,
    UnimodularMatrix,
    adjoint_matrix,
    char_poly,
    conjugate,
    coords_of,
    coords_to,
    elementary_generators,
    proximal_element,
)
from .proximal import SpectrumReport, eigen_moduli, is_proximal, spectrum_report
from .torus import MERSENNE61, Character, TorusPointQ, act, character, random_point
from .surd import BoundaryUndecidable, SurdNumber, parse_surd
from .bohr import (
    BohrSpec,
    EnumerationResult,
    MembershipCheck,
    ThickMask,
    bohr_document,
    contains,
    enumerate_box,
    iter_members,
    load_bohr_document,
    membership,
    tau,
    zero_symmetric_sub,
)
from .walk import (
    AtomicTorusMeasure,
    EmpiricalCloud,
    FiniteSupportMeasure,
    FourierCheck,
    SupportCapExceeded,
    WeylReport,
    convolve_group,
    convolve_power,
    fourier_convolution_check,
    nu_hat,
    pushforward_exact,
    sample_walk,
    weyl_report,
)
from .spectral import (
    RotationSystem,
    atom_mass,
    autocorr,
    character_average,
    folner_average,
    interval_overlap,
)
from .conjsearch import (
    BallCapExceeded,
    ConjugacySearchResult,
    CoverageReport,
    GroupBall,
    Witness,
    ball,
    charpoly_witness,
    discriminant_cover,
    find_conjugate_in_bohr,
    traceless_companion,
)
