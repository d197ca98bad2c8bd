"""Computer algebra for rational Hodge-Tate crystals over p-adic local fields."""
from .crystal import (
    CocycleResult,
    HTCrystal,
    NhtVerdict,
    OracleResult,
    Outcome,
    StratificationSeries,
    binomial_series,
    cocycle_check,
    convergence_oracle,
    nearly_ht_check,
    stratify,
)
from .errors import *  # noqa: F401,F403
from .linalg import KMatrix, charpoly, conjugate_by_shears, mat_mul, min_entry_valuation, shift
from .local_field import (
    KElement,
    KPoly,
    LocalField,
    NewtonPolygon,
    field_make,
    k_inv,
    k_mul,
    newton_polygon,
    residue_reduce,
    valuation,
)
from .padic import PadicScalar, padic_add, padic_inv, padic_mul, parse_padic
from .pd_series import PDSeries, pd_geom_inv, pd_mul, pd_substitute
from .sen import (
    FormalMatrixSeries,
    SenData,
    multiplicativity_check,
    recover_sen,
    sen_from_crystal,
    series_exp,
    series_log,
    tau_cocycle,
    theta_u_lambda_prime,
)

__version__ = "0.1.0"
