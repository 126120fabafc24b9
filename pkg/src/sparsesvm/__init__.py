"""Sparse support vector machines by annealed distance penalization.

Binary linear classifiers with an exact cardinality constraint on the
coefficients, trained by driving a squared-hinge objective plus a scaled
squared distance to the k-sparse set through a geometric penalty ladder.
Kernel, one-versus-one multiclass, and cross-validation layers sit on top.
"""

from .anneal import FitError, OuterRecord, prox_dist_fit, sv_count
from .config import AccelPolicy, AnnealSchedule, FitReport, SolverConfig
from .crossval import (CVRow, CVTable, SelectionMetrics, accuracy_pct,
                       cross_validate, selection_metrics)
from .data import (ColumnTransform, DataError, Dataset, DesignMatrix, FoldPlan,
                   ThinSVD, apply_transform, binarize, load_csv, make_folds,
                   thin_svd)
from .kernel import (KernelModel, gram_matrix, kernel_design, kernel_predict,
                     median_bandwidth)
from .model_io import MODEL_FORMAT, SavedModel, load_model, save_model
from .multiclass import (GaussianKernelSpec, OVOModel, PairClassifier,
                         init_heuristic, predict_ovo, train_ovo)
from .objective import (ObjectiveState, PenaltyWeights, gradient, hinge_loss,
                        penalized_objective, surrogate_value, working_response)
from .simdata import (PlantedModel, SimSpec, gen_gaussian_causal, gen_spiral,
                      gen_synthetic_corr)
from .solvers import (MMWorkspace, SDWorkspace, mm_solve, mm_update,
                      nesterov_step, sd_solve, sd_update, step_size)
from .sparsity import SparsityConstraint, project, sq_distance

__version__ = "0.1.0"
