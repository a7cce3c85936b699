"""Linear reservoir computing on the noisy Lorenz system.

Builds random and shift-register (delay-embedding) linear reservoirs,
trains ridge readouts, runs autonomous forecasts, and numerically
verifies the stationary decomposition of the reservoir state into a
synchronization term plus Gaussian noise with Lyapunov-equation
covariance.
"""

__version__ = "0.1.0"

from linres.dynamics import (
    LorenzParams,
    NoiseModel,
    Normalizer,
    Trajectory,
    add_noise,
    apply_normalizer,
    fit_normalizer,
    generate_trajectory,
    invert_normalizer,
    lorenz_deriv,
    rk4_step,
)
from linres.forecast import ForecastResult, autonomous_forecast, mse, rmse_series, valid_time
from linres.readout import ReadoutWeights, predict_one_step, ridge_fit
from linres.reservoir import (
    ReservoirSystem,
    build_random,
    build_takens,
    drive,
    reservoir_step,
    spectral_radius,
)
from linres.theory import (
    Covariance,
    GsApproximation,
    empirical_noise_covariance,
    gs_consistency_residual,
    gs_truncated,
    solve_lyapunov,
)
