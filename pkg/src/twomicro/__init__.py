"""Two-microlocal Besov/Triebel-Lizorkin norms of sampled signals.

Computes the inhomogeneous two-microlocal space norms of grid signals on
the torus through several equivalent discrete characterizations
(frequency-band decomposition, coefficient transforms, orthonormal
wavelets, atoms/molecules, differences and oscillations) and verifies the
structural relations between them as executable property suites.
"""

from .dyadic import (
    DEFAULT_DEPTH,
    DEFAULT_VIRTUAL_LEVELS,
    CubeRegion,
    DyadicCube,
    cube_geometry,
    cubes_containing,
    cubes_in_region,
    torus_distance,
    triple,
)
from .fields import BandStack, CoefField, NormReport, SampledSignal
from .lpdecomp import (
    FilterBank,
    ProfileSpec,
    build_dual_bank,
    build_filter_bank,
    get_filter_bank,
    lp_pieces,
    phi_analysis,
    phi_synthesis,
)
from .seqspace import (
    AlmostDiagonalParams,
    CubeMatrix,
    NormOverflowError,
    SpaceParams,
    apply_matrix,
    gram_matrix,
    is_almost_diagonal,
    local_seq_norm,
    maximal_mt,
    outer_norm,
    star_smoothing,
    weight,
)
from .funcnorm import band_stack_norm, full_norm, local_func_norm
from .synthesis import (
    AtomFamily,
    MoleculeFamily,
    WaveletSystem,
    atom_synthesis,
    build_wavelet_system,
    daubechies_filter,
    equivalence_report,
    load_wavelet_filter,
    make_bump_atoms,
    validate_atom_family,
    validate_molecule_family,
    wavelet_analysis,
    wavelet_molecules,
    wavelet_synthesis,
)
from .operators import (
    CZKernelSample,
    DifferenceSpec,
    SymbolGrid,
    apply_multiplier,
    apply_pseudo_diff,
    bessel_potential,
    difference_norms,
    hilbert_multiplier,
    kth_difference,
    local_mean_difference,
    oscillation,
    validate_cz_kernel,
    validate_symbol_class,
)

__version__ = "0.1.0"
