"""Coherent-integration toolkit: windowed Radon fractional Fourier transform
search for maneuvering targets with unknown entry/departure times, plus
full-window baselines and Monte-Carlo evaluation harnesses."""

from .baselines import (BaselineMap, equivalent_full_window_params, grft, mtd,
                        rfrft, rft)
from .detection import (Scenario, detect, detection_curve, find_peaks_2d,
                        monte_carlo_rmse, snr_at_pd, threshold_for_max,
                        threshold_from_reference, wilson_halfwidth)
from .echofile import (load_echo_file, load_matrix_file, save_echo_file,
                       save_matrix_file)
from .errors import (BudgetError, DegenerateAngleError, DwellError,
                     DtypeMismatchError, EchoFileError, MalformedHeaderError,
                     MinDwellError, OutOfWindowError, PayloadSizeError,
                     ValidationError, WrfrftError)
from .frft import (Angle, FrftPlan, centered_dft, centered_dft_matrix,
                   dechirp, frft_exact, frft_fast, grid_coords, kernel_matrix,
                   refine_tone_peak, tone_spectrum)
from .config import (PRESETS, ScenarioConfig, load_preset, parse_config,
                     serialize_config)
from .search import (GridAxis, Hypothesis, PeakRecord, SearchGrid,
                     amplitude_slice, alpha_for, alpha_from_formula,
                     base_steps, build_grid, extract_windowed_trajectory,
                     peak_profile, window_projection, wrfrft_search, wrfrft_single)
from .signal_model import (C_LIGHT, EchoMatrix, NoiseSpec, RadarParams,
                           TargetTruth, measure_peak_snr_db, pulse_compress,
                           reference_chirp, snap_to_pulse,
                           synthesize_compressed_echo, synthesize_raw_echo,
                           trajectory_range)

__version__ = "0.1.0"
