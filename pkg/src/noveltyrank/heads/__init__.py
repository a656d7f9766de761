"""From-scratch feed-forward scoring heads, losses, optimizer, and training."""

from .nn import MlpHead, classification_head, ranking_head
from .losses import classification_loss, ranknet_loss, sigmoid, softmax
from .optim import OptimizerState, TrainConfig, adamw_step, classify_config, lr_at, rank_config
from .training import ClassifyDataset, RankDataset, TrainingError, predict, train
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint

__all__ = [
    "MlpHead",
    "classification_head",
    "ranking_head",
    "classification_loss",
    "ranknet_loss",
    "sigmoid",
    "softmax",
    "TrainConfig",
    "OptimizerState",
    "adamw_step",
    "lr_at",
    "classify_config",
    "rank_config",
    "ClassifyDataset",
    "RankDataset",
    "TrainingError",
    "train",
    "predict",
    "CheckpointError",
    "save_checkpoint",
    "load_checkpoint",
]
