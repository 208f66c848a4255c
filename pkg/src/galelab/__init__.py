"""galelab: exact-arithmetic betting strategies on characteristic sequences.

The package represents gales through sum-preserving rational mass
functions, so every gale identity is checkable with zero tolerance; the
irrational parts (powers of the exponent and of the alphabet
distribution) live only in the log2 capital reporting layer.

Modules:
    gales       exact gales, capital, validation, success traces
    langs       string enumeration, pairing, languages, selectors, policies
    selective   the block-tournament betting strategy for selective sets
    transforms  exponent shifts, mixtures, distribution change, pair lift
    pairs       disjoint pairs as ternary sequences
    experiments deterministic experiment runner used by the CLI
    cli         the ``galelab`` command
"""

from .errors import (
    ConfigError,
    ConstructorViolation,
    DecodeError,
    DisjointnessViolation,
    FixtureOverrunError,
    GaleLabError,
    InfeasibleParameters,
    PartialMassError,
    PolicyViolation,
    PropertyViolation,
    ReductionContractViolation,
    SelectorContractViolation,
    ThresholdViolation,
)
from .gales import (
    AlphabetDistribution,
    GaleSpec,
    LogCapital,
    MassFunction,
    MixtureMass,
    RatioMass,
    SuccessTrace,
    TableMass,
    bernoulli_mass,
    capital,
    dump_mass_table,
    halving_mass,
    load_mass_table,
    log2_fraction,
    martingale_to_sgale,
    predictor_mass,
    sgale_to_martingale,
    success_trace,
    validate_mass,
)
from .langs import (
    FunctionRegistry,
    LanguageSpec,
    LogLengthPolicy,
    ReductionFunction,
    RestrictedOracle,
    SelectorFunction,
    char_prefix,
    growth_rate,
    index_to_string,
    left_cut,
    left_cut_selector,
    pair,
    periodic,
    restrict_oracle,
    run_constructor,
    seeded_random,
    string_to_index,
    string_value,
    unpair,
)
from .pairs import GAMMA_ZERO, PairEncoding, encode_pair, flatten, union_language
from .selective import (
    BlockTournament,
    CertifyReport,
    StrategyConfig,
    build_tournament,
    certify_success,
    min_block_size,
    selective_gale,
    threshold_index,
)
from .transforms import (
    GaleFamily,
    exponent_shift,
    find_exponent_pair,
    lift_to_pair_gale,
    mixture,
    to_beta_gale,
)

__version__ = "0.1.0"
