from .model import (
    GnnModel,
    GraphBatch,
    GraphShapeError,
    backward,
    ensemble_predict,
    ensemble_predict_batch,
    forward,
    forward_batch,
    init_model,
    loss_and_grads,
    loss_mse,
    make_batch,
    predict_batch,
    predict_config,
)
from .serialize import ModelFormatError, TruncatedPayloadError, load_model, save_model
from .training import EpochLog, TrainConfig, format_log, train, train_ensemble

__all__ = [
    "GnnModel",
    "GraphBatch",
    "GraphShapeError",
    "backward",
    "ensemble_predict",
    "ensemble_predict_batch",
    "forward",
    "forward_batch",
    "init_model",
    "loss_and_grads",
    "loss_mse",
    "make_batch",
    "predict_batch",
    "predict_config",
    "ModelFormatError",
    "TruncatedPayloadError",
    "load_model",
    "save_model",
    "EpochLog",
    "TrainConfig",
    "format_log",
    "train",
    "train_ensemble",
]
