"""Over-sea RF path-loss models and LPWAN measurement-campaign analysis.

Models: free space, plane-earth two-ray, round-earth two-ray with a composed
sea reflection (REL), Bullington plane-earth-plus-shadow, reduced ITU-R
P.2001, and log-distance.  Plus the campaign pipeline: log ingest, RSSI
calibration, GPS geolocation, link-budget conversion, least-squares fitting
and RMSE/MAE model comparison.
"""

from .errors import (
    AlreadyCalibrated,
    AntennaTooHigh,
    BullingtonValidityWarning,
    ConfigError,
    DegenerateFit,
    EmptyLog,
    FrequencyOutOfRange,
    HeaderMismatch,
    LengthMismatch,
    MissingCalibration,
    NoCoverage,
    NoSpecularPoint,
    NoValidSamples,
    NumericalFailure,
    SeaLossError,
    UnboundedRange,
    UnsupportedTimePercentage,
)
from .geometry import (
    EARTH_RADIUS,
    SPEED_OF_LIGHT,
    EarthModel,
    GeoPoint,
    LinkGeometry,
    ReflectionGeometry,
    critical_distance,
    fresnel60_distance,
    great_circle_distance,
    horizon_distance,
    reflection_geometry,
    wavelength,
)
from .ingest import (
    CalibrationTable,
    CampaignConfig,
    ExclusionZone,
    MeasurementRecord,
    ParsedLog,
    apply_calibration,
    builtin_data_path,
    geolocate,
    load_campaign,
    parse_log,
    rssi_to_pathloss,
    to_sample_set,
)
from .metrics import (
    ErrorReport,
    SampleSet,
    bin_samples,
    compare_models,
    fit_log_distance,
    mae,
    rmse,
)
from .models import (
    MODEL_IDS,
    ItuParams,
    LogDistanceParams,
    ModelContext,
    ModelCurve,
    RadioConfig,
    bullington_loss,
    evaluate_model,
    free_space_loss,
    itu_p2001_reduced_loss,
    log_distance_loss,
    max_range,
    rel_loss,
    smooth_earth_diffraction_loss,
    sweep,
    two_ray_flat,
    two_ray_round_earth,
)
from .sea import (
    EffectiveReflection,
    Polarization,
    SeaState,
    divergence_factor,
    effective_reflection,
    fresnel_reflection,
    roughness_factor,
    shadowing_factor,
)

__version__ = "0.1.0"
