"""Directed interaction analysis of multichannel time series.

The pipeline: delay-embed pairs of series, estimate the fractal dimension
of the resulting point clouds, read interaction strength as the
reciprocal dimension, assemble all-pairs connectivity graphs, study their
clique topology across every threshold, and decode experimental
conditions from the graph weights with an elastic-net classifier.
"""

from .cim import (
    CimResult,
    EmbeddingVectorSelection,
    LagSet,
    SelectionStep,
    best_lag,
    cim_pair,
    progressive_embed,
)
from .connectivity import (
    ConnectivityMap,
    SensorProfile,
    build_map,
    extract_features,
    feature_labels,
    sensor_profile,
    symmetrize,
)
from .decode import (
    ConfusionResult,
    ElasticNetModel,
    FeatureTable,
    cross_validate,
    default_lambda_path,
    elasticnet_quadratic,
    fit_elasticnet_multinomial,
    kruskal_wallis,
    multinomial_deviance,
    predict_confusion,
    select_features,
    stratified_folds,
)
from .embedding import (
    EmbeddingSpec,
    PointCloud,
    embed_multivariate,
    embed_pair,
    embed_univariate,
)
from .errors import (
    BoundsError,
    CimkitError,
    DataError,
    DegenerateChannelError,
    DegenerateCloudError,
    DivergenceError,
    InsufficientLengthError,
    NoScalingRegionError,
    NoValidLagError,
    ParseError,
    SchemaError,
    ShapeError,
    SizeError,
    StratificationError,
)
from .fractal import (
    CorrelationCurve,
    DimensionEstimate,
    box_counting_dimension,
    box_occupancy,
    correlation_integral,
    default_box_sizes,
    default_radii,
    estimate_correlation_dimension,
)
from .io import (
    Recording,
    WindowSpec,
    load_recording,
    save_recording,
    slice_window,
    to_sample_index,
    zscore,
)
from .oracle import (
    MiEstimate,
    brute_force_betti,
    gf2_nullspace,
    gf2_rank,
    ksg_mutual_information,
    projected_mi,
)
from .synth import (
    SynthConfig,
    add_noise_snr,
    gen_ar_driven,
    gen_henon_coupled,
    gen_linear_flow,
    gen_sine_recursive,
)
from .topology import (
    Barcode,
    BettiTrajectory,
    FlagComplex,
    RankFiltration,
    betti_trajectory,
    bootstrap_compare,
    flag_complex,
    persistent_homology,
    rank_filtration,
)

__version__ = "0.1.0"
