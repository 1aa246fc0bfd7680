"""Empirical meta-game analysis: heuristic payoff tables, replicator dynamics,
Nash filtering through counterpart games, finite-sample bounds and an exact
Colonel Blotto oracle."""

from ._accel import backend_name
from .blotto import BlottoStrategy, blotto_meta_table, match_payoff, match_payoff_exact, strategy_count
from .bounds import (ConfidenceReport, MissingDataError, ObservationLog, batch_confidence, estimate_game,
                     required_samples, uniform_confidence)
from .dynamics import (Trajectory, VectorField, classify, directional_field, integrate, integrate_many,
                       single_population_field, two_population_field)
from .equilibrium import (DegenerateGameWarning, EquilibriumCandidate, certify_two_epsilon,
                          counterpart_nash_filter, exploitability, single_population_equilibria,
                          support_enumeration_2p, symmetric_equilibria)
from .game import (BimatrixGame, GameFormatError, NormalFormGame, counterpart_games, expected_payoff,
                   is_symmetric, mixed_strategy)
from .hpt import (AsymmetricMetaTable, MetaPayoffTable, WinRateMatrix, build_from_bimatrix,
                  build_symmetric_table, meta_expected_payoff, table_from_matrix)

__version__ = "0.1.0"
