"""bitlaws: exact Cantor-space measure algebra, concentration bounds, and
statistical-law scanners for bit sequences."""

from .measure import Containment, Dyadic, OpenSet, brute_force_measure, cylinder_measure
from .bounds import (
    CoverSchedule,
    TailBound,
    cover_schedule,
    deviation_asymptotic,
    exact_binomial_tail,
    hoeffding_fair,
    hoeffding_general,
    maximal_tail_bound,
    reduced_sum,
    slln_tail_bound,
)
from .generators import (
    BitSequence,
    BitstreamFormatError,
    StagedConfig,
    StageTrace,
    bits_from01,
    gen_adversarial,
    gen_biased,
    gen_champernowne,
    gen_prng,
    load_bits,
    write_bits,
)
from .stattests import (
    BlockStats,
    LilParams,
    NormalityReport,
    SllnReport,
    first_envelope_crossing,
    lil_envelope,
    lil_lower_params,
    lil_lower_scan,
    lil_upper_scan,
    normality_scan,
    prefix_sums,
    slln_scan,
)
from .solovay import (
    BorelCantelliReport,
    BudgetCheckReport,
    MembershipProfile,
    TestFamily,
    borel_cantelli_verdict,
    build_slln_family,
    coordinate_family,
    family_budget_check,
    load_family,
    membership_profile,
    save_family,
    slln_first_violation_cylinders,
    slln_truncated_measure,
)

__version__ = "0.1.0"
