"""Weighted visibly pushdown automata, nested Hankel matrices and the
SVD-based construction of an automaton from a finite-rank Hankel matrix."""
from .errors import (
    InputError,
    InsufficientTerms,
    NestedHankelError,
    NoNonzeroBasis,
    NotInSpan,
    NotRankOne,
    NotStabilized,
    NotWellMatched,
    RoundTripMismatch,
    SynthesisError,
    UnknownLetter,
    ZeroMatrix,
)
from .hankel import (
    HankelBlock,
    Oracle,
    SpanningGrid,
    automaton_oracle,
    block_rank,
    build_block,
    builtin_oracle,
    constant,
    dyck_one,
    paren_count,
    select_spanning,
    stabilized_block,
    word_hankel_rank_growth,
)
from .nested_words import (
    NestedWord,
    TaggedLetter,
    decode,
    encode,
    enumerate_well_matched,
    format_word,
    is_well_matched,
    parse_word,
    validate,
)
from .synthesis import SynthesisReport, synthesize, verify_equivalence
from .wvpa import Wvpa, paren_count_automaton, random_wvpa

__version__ = "0.1.0"
