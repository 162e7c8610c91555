"""q-analogue Euler-Barnes numbers, polynomials and zeta functions."""

from .characters import DirichletCharacter, load_character, principal, quadratic_mod3, quadratic_mod4
from .classical import bernoulli, bernoulli_euler_identity_audit, euler_number, frobenius_euler
from .qcore import (
    CertifiedValue,
    DomainError,
    NonRepresentableError,
    QContext,
    QZetaError,
    TailPolicy,
    TruncationError,
    geometric_sum,
    q_bracket,
    qpow_exact,
    tail_bound_geometric,
)
from .qeuler import (
    EgfSeries,
    distribution_relation_check,
    egf_functional_equation_check,
    egf_oracle_coefficient,
    generalized_q_euler,
    q_euler_higher,
    q_euler_number,
    q_euler_polynomial,
)
from .zeta import (
    ZetaQuery,
    evaluate,
    l_q,
    l_q_special_value,
    q_to_1_limit_check,
    zeta_multiple_shift_check,
    zeta_q_hurwitz,
    zeta_q_multiple,
    zeta_q_riemann,
    zeta_special_value,
)

__version__ = "0.1.0"
