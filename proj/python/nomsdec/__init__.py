"""Belief-propagation decoding of binary linear codes with trainable
check-node offsets: SPA, min-sum, offset min-sum, and the trainable
neural-offset and weighted-SPA variants, plus the SGD training loop and the
Monte-Carlo BER harness."""

from ._core import (  # noqa: F401
    AlistError,
    BchError,
    BerPoint,
    ConfigError,
    DecoderParams,
    EvalConfig,
    IterationHistogram,
    LinearCode,
    TrainConfig,
    TrainLogRow,
    TrainResult,
    Tying,
    Variant,
    __version__,
    construct_bch,
    count_parameters,
    decode,
    ebn0_to_sigma2,
    export_histograms,
    load_alist_file,
    load_alist_text,
    load_params,
    make_bch,
    modulate_bpsk,
    run_ber,
    save_params,
    simulate_frame,
    syndrome_check,
    tie_offsets,
    train,
    uncoded,
)
