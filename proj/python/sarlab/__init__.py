"""Python interface to the sarlab core.

Waveforms are ``AudioClip`` objects, features are ``MelSpectrogram`` objects
whose ``frames`` are (T, n_mels) float64 arrays of natural-log mel magnitudes.
"""

import json as _json

from ._sarlab import (
    AudioClip,
    InvalidArgument,
    IoError,
    MelSpectrogram,
    NumericalError,
    SarModel,
    apply_mask,
    estoi,
    griffin_lim,
    load_checkpoint,
    log_mel_distortion,
    mel_spectrogram,
    read_mel,
    read_wav,
    realized_snr_db,
    resample,
    run_cli,
    stft_roundtrip,
    write_mel,
    write_synthetic_corpus,
    write_wav,
)
from . import _sarlab

__all__ = [
    "AudioClip", "InvalidArgument", "IoError", "MelSpectrogram", "NumericalError",
    "SarModel", "apply_mask", "build_manifest", "corrupt", "estoi", "griffin_lim",
    "init_model", "load_checkpoint", "log_mel_distortion", "mel_spectrogram", "model_config",
    "read_mel", "read_wav", "realized_snr_db", "resample", "run_cli", "run_experiment",
    "split_dataset", "stft_roundtrip", "train", "write_mel", "write_synthetic_corpus",
    "write_wav",
]


def corrupt(value, spec):
    """Apply a corruption spec (dict) to a feature array, MelSpectrogram or AudioClip."""
    text = _json.dumps(spec)
    if isinstance(value, AudioClip):
        return _sarlab._corrupt_audio(value, text)
    if isinstance(value, MelSpectrogram):
        return MelSpectrogram(_sarlab._corrupt_features(value.frames, text),
                              value.sample_rate, value.hop)
    return _sarlab._corrupt_features(value, text)


def init_model(config=None, seed=1337):
    return SarModel._initialise(_json.dumps(config or {}), seed)


def model_config(model):
    return _json.loads(model._config)


def train(train_set, val_set, train_config=None, model_config=None):
    """Train on lists of (T, n_mels) arrays; returns (model, history_csv)."""
    return _sarlab._train(list(train_set), list(val_set), _json.dumps(train_config or {}),
                          _json.dumps(model_config or {}))


def build_manifest(root):
    return _json.loads(_sarlab._build_manifest(str(root)))


def split_dataset(root, seed=1337):
    return _json.loads(_sarlab._split_dataset(str(root), seed))


def run_experiment(config_path):
    """Run the grid described by a JSON config file; returns the report as a dict."""
    return _json.loads(_sarlab._run_experiment(str(config_path)))
