"""Kinyarwanda ASR data pipeline toolkit.

Non-neural side of a speech recognition system: vocabulary construction
and syllabic tokenization, CTC decoding, CER/WER evaluation, curriculum
planning, pseudo-label selection, audio segmentation and a speech-text
alignment annotation service.
"""

__version__ = "0.1.0"

from .audio import (
    SilenceMarker,
    Waveform,
    detect_silences,
    filter_segments,
    logmel,
    random_segments,
    read_wav,
    split_dataset,
    write_wav,
)
from .ctc import (
    DecodeConfig,
    DecodeResult,
    NBestEntry,
    Posteriorgram,
    batch_decode,
    beam_search,
    collapse,
    exhaustive_oracle,
    greedy_decode,
    load_posteriorgram,
    save_posteriorgram,
)
from .curriculum import CurriculumPlan, CurriculumStage, build_plan, rank_by_cer
from .manifest import ManifestEntry, read_manifest, write_manifest
from .metrics import EvalPair, EvalReport, cer, corpus_eval, edit_distance, strip_eval_punct, wer
from .pseudo_label import SelectionConfig, generation_report, select
from .tokenizer import (
    TokenSequence,
    Vocabulary,
    build_vocab,
    detokenize,
    normalize,
    syllable_count,
    tokenize,
)

__all__ = [
    "__version__",
    "Waveform", "SilenceMarker", "read_wav", "write_wav", "logmel",
    "detect_silences", "random_segments", "filter_segments", "split_dataset",
    "Posteriorgram", "DecodeConfig", "DecodeResult", "NBestEntry",
    "collapse", "greedy_decode", "beam_search", "exhaustive_oracle",
    "batch_decode", "save_posteriorgram", "load_posteriorgram",
    "CurriculumPlan", "CurriculumStage", "rank_by_cer", "build_plan",
    "ManifestEntry", "read_manifest", "write_manifest",
    "EvalPair", "EvalReport", "edit_distance", "strip_eval_punct", "cer", "wer", "corpus_eval",
    "SelectionConfig", "select", "generation_report",
    "Vocabulary", "TokenSequence", "build_vocab", "normalize", "tokenize",
    "detokenize", "syllable_count",
]
