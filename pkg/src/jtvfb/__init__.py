"""Two-channel joint time-vertex graph filter banks with oversampled Laplacians."""

from .denoise import (
    DenoiseConfig,
    add_gaussian_noise,
    build_pipeline,
    denoise,
    metrics_record,
    mse,
    snr_db,
    threshold,
)
from .errors import JTVError
from .extension import (
    Coloring,
    OversampledExtension,
    bipartite_double_cover,
    extend_graph,
    foundation_bipartite,
    greedy_coloring,
    harary_bipartition,
    identity_extension,
    redundancy,
    ring_extend,
)
from .filterbank import (
    KernelPair,
    SubbandCoefficients,
    analyze_domain,
    dump_subbands,
    joint_analyze,
    joint_synthesize,
    joint_two_term,
    meyer_qmf_kernels,
    spectral_filter,
    synthesize_domain,
    verify_pr,
)
from .graphs import (
    Bipartition,
    Graph,
    SpectralBasis,
    bfs_two_coloring,
    build_graph,
    check_bipartite,
    eigendecompose,
    grid_graph,
    normalized_laplacian,
    read_edgelist,
    ring_graph,
    write_edgelist,
)
from .imaging import image_to_joint, read_pgm, video_to_joint, write_pgm
from .joint import (
    ExtendedJointSignal,
    JointGraph,
    build_joint,
    extend_signal,
    gradient_norms,
    ijft,
    jft,
    joint_bipartition,
    joint_laplacian,
    read_signal_csv,
    restrict_signal,
    write_signal_csv,
)
from .seirs import (
    SCENARIOS,
    SeirsParams,
    SeirsState,
    load_scenario_config,
    scenario_params,
    seirs_signal,
    seirs_step,
)

__version__ = "0.1.0"
