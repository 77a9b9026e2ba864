"""Rank statistics of elliptic curves ordered by naive height.

Exact curve counts, the Selmer/Hasse probability model, a seeded simulator
of test curves, dataset estimators and fits, and count/average-rank
predictions by quadrature or series.
"""

from .constants import KAPPA, brumer_kappa, poonen_rains_s, s_weighted_sum
from .curve_enum import (
    HeightInterval,
    WeierstrassPair,
    count_all_pairs,
    count_minimal,
    count_minimal_upto,
    enumerate_minimal,
    is_admissible,
    naive_height,
)
from .dataset import CurveRecord, Dataset
from .estimators import (
    RatioPoint,
    average_rank,
    average_selmer_rank,
    estimate_cov11,
    fit_rho,
    fit_theta,
    moving_rho,
    moving_theta,
)
from .fileio import ingest_dataset, load_params, write_dataset
from .predictor import (
    predict_avg_rank,
    predict_avg_selmer_rank,
    predict_pi_Rr,
    predict_pi_Rr_Sn,
    predict_pi_Sn,
    predicted_std_errors,
    series_pi_rank,
)
from .quadrature import QuadratureSpec, integrate_density
from .rank_model import (
    DEFAULT_PARAMS,
    ModelParams,
    expected_product,
    joint_bernoulli_pair,
    rank_probability,
    rho,
    theta,
    theta_zero,
)
from .simulator import SimConfig, TestCurve, rank_of, sample_test_curve, simulate_sequence

__version__ = "0.1.0"
