"""Saliency prediction for omnidirectional (equirectangular) images."""
from .errors import DomainError, MapNotFoundError, SolverError, UndefinedMetricError
from .metrics import auc_judd, cc, equator_bias_profile, kld, nss
from .pipeline import (BiasProfile, PipelineConfig, apply_equator_bias, cmp_branch,
                       combine_branches, default_bias_profile, erp_branch, normalize_max,
                       predict, predict_stages)
from .saliency2d import BmsParams, bms, external_backend, luminance_backend
from .smoother import build_seed_mask, smooth
from .sphere_geom import Rotation3

__version__ = "0.1.0"
