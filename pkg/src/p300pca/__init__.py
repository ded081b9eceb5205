"""Single-trial P300 classification on channel-subtrial EEG data.

Pipeline: bandpass filter, slice one-second channel epochs, z-score,
PCA, then LDA / QDA / logistic (LR) / one-hidden-layer network (NLR),
with cross-validated forward selection of components and 8-channel voting.
"""

__version__ = "0.1.0"

from .data_model import (
    ChannelSubtrialDataset,
    Recording,
    StimulusLog,
    balance_classes,
    grouped_split,
    load_recording,
    save_recording,
    slice_channel_subtrials,
)
from .discriminant import fit_lda, fit_qda, predict
from .evaluation import EvalReport, FeatureConfig, PipelineConfig, PreprocessConfig, prepare_dataset, run_experiment
from .neuralnet import ScgOptions, scg_minimize, train_nn
from .pca import explained_variance, fit_pca, project
from .preprocess import apply_filter, design_bandpass, zscore_normalize
from .selection import forward_select, restricted_forward_select
from .synthgen import SynthConfig, generate_oddball
from .voting import accuracy, vote_aggregate

__all__ = [
    "ChannelSubtrialDataset", "Recording", "StimulusLog", "balance_classes", "grouped_split",
    "load_recording", "save_recording", "slice_channel_subtrials",
    "fit_lda", "fit_qda", "predict",
    "EvalReport", "FeatureConfig", "PipelineConfig", "PreprocessConfig", "prepare_dataset", "run_experiment",
    "ScgOptions", "scg_minimize", "train_nn",
    "explained_variance", "fit_pca", "project",
    "apply_filter", "design_bandpass", "zscore_normalize",
    "forward_select", "restricted_forward_select",
    "SynthConfig", "generate_oddball",
    "accuracy", "vote_aggregate",
]
