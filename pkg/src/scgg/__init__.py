"""Structure-conditioned autoregressive graph generation for graph completion."""

from .baselines import evograph_complete, random_density_complete
from .checkpoint import load_checkpoint, save_checkpoint
from .evaluation import EvalReport, evaluate_completer, split_dataset
from .ged import EditCost, ged_approx, ged_exact, normalized_ged
from .graph import Graph, PreparedSample, generate_grid, load_edge_list, prepare_sample, reassemble, save_edge_list
from .inference import complete, complete_greedy
from .training import Checkpoint, TrainConfig, graph_loss, train

__version__ = "0.1.0"
