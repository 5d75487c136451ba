"""Speech enhancement with Bayesian nonnegative matrix factorization."""

from ._core import (
    SAMPLE_RATE,
    Model,
    bss_eval,
    enhance,
    kl_nmf,
    long_term_snr,
    magnitude_spectrogram,
    mix,
    noise_presets,
    read_wav,
    segsnr,
    synth_noise,
    synth_speech,
    train,
    write_wav,
)

__all__ = [
    "SAMPLE_RATE",
    "Model",
    "bss_eval",
    "enhance",
    "kl_nmf",
    "long_term_snr",
    "magnitude_spectrogram",
    "mix",
    "noise_presets",
    "read_wav",
    "segsnr",
    "synth_noise",
    "synth_speech",
    "train",
    "write_wav",
]
