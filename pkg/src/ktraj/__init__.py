"""Design 3D radial, cones and stack-of-spirals k-space trajectories.

Readouts are placed along spiral paths on the k-space extent surface, with
the path parameter solved by inverting the cumulative readout density.
The package also provides analytic density compensation, a Monte-Carlo
Voronoi oracle, PSF and uniformity instruments, and a trajectory file format.
"""

from .analysis import (
    PsfImage,
    UniformityStats,
    alias_onset,
    compute_psf,
    density_profile,
    fwhm,
    sphere_uniformity,
)
from .assembly import Trajectory, synthesize
from .config import DesignConfig, parse_config
from .dcf import (
    DcfTable,
    Support,
    analytic_dcf,
    cones_dcf,
    radial_dcf,
    relative_rms,
    stack_dcf,
    voronoi_dcf_oracle,
)
from .design import Design, design_cones, design_radial, design_stack
from .errors import (
    AssemblyError,
    BudgetExceeded,
    ConfigError,
    DomainError,
    InfeasibleDesign,
    InvalidInputError,
    KtrajError,
    SearchFailure,
)
from .geometry import DensityParams, ExtentModel, FovModel
from .numerics import SampledFunction, integrate, invert_monotone, solve_cdf_ode
from .paths import (
    DiscretizedPath,
    SpiralPath,
    design_cones_path,
    design_radial_path,
    design_stack_path,
    discretize,
    match_readout_count,
)
from .templates import (
    HardwareConfig,
    Template,
    TemplateSet,
    cone_surface_table,
    design_cone_template,
    design_radial_spoke,
    design_spiral_template,
    estimate_cone_interleaves,
    estimate_spiral_interleaves,
    spiral_surface_table,
)
from .trajio import export_trajectory, import_trajectory

__version__ = "0.1.0"
