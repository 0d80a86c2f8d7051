"""
Sparse PCA variants with least-squares scores and consistent variance accounting.

Model variants: PCA, SPCA (simultaneous), SPCA-Sq (sequential), PMD with
projection / orthogonalized / Mackey deflation (PMD-PD, PMD-O, PMD-M) and
group-wise PCA with the same three deflations (GPCA-PD, GPCA-O, GPCA-M).
"""

from .deflation import (MackeyState, covariance_projection_deflate, mackey_deflate,
                        projection_deflate)
from .diagnostics import (StatsReport, corrected_scores, macl, macs, model_reports,
                          naive_scores, residuals, rss, stats_report, tot_pt, tot_qr, tot_t,
                          variance_split_check)
from .errors import (DegenerateComponent, InvalidInput, MissingData, ParseError,
                     RankExhausted, ShapeError, SparsePCAError)
from .gpca import correlation_map, find_groups, fit_gpca
from .methods import fit_method
from .numerics import gaussian_stream, pinv, qr, soft_threshold, svd
from .pca import METHODS, SPARSE_METHODS, FactorModel, fit_pca
from .pmd import PmdConfig, fit_pmd, pmd_rank_one
from .simulate import (SimulatedDataset, calibrate_sparsity, gen_montecarlo,
                       gen_nonorthogonal_spectra, gen_orthogonal_spectra)
from .spca import SpcaConfig, fit_spca_sequential, fit_spca_simultaneous, qr_variance

__version__ = "0.1.0"
