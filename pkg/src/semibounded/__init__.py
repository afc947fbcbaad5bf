"""Semibounded Toeplitz and Hankel forms from their defining measures."""

from .measure import (
    Atom,
    Interval,
    JacobiDensity,
    Measure,
    MeasureSpecError,
    TrigDensity,
    circle_moments,
    interval_mass,
    line_moments,
    load_measure,
    mass_near_endpoint,
    measure_from_json,
    measure_to_json,
    moment_circle,
    moment_line,
    semibounded_gap,
)
from .forms import (
    CoefficientSequence,
    Kind,
    SectionOperator,
    fast_matvec,
    finite_section,
    form_direct,
    form_via_measure,
    from_measure,
    read_coefficients_csv,
    write_coefficients_csv,
)
from .spectra import LanczosNotConverged, SpectralReport, extreme_eigs, norm_growth, psd_check
from .diagnostics import (
    DiagnosticReport,
    Geometric,
    closure_domain_value,
    decay_stats,
    hankel_closable,
    toeplitz_closable,
    widom_boundedness,
)
from .outer import OuterFunction, boundary_modulus_check, outer_eval
from .laguerre import (
    bridge_residual,
    g_transform,
    laguerre_eval,
    laplace_of_laguerre,
    pullback_atoms,
    u_map,
    v_map,
)

__version__ = "0.1.0"
