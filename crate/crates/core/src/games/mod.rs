//! The online game: exact values, matrix games and adversaries.

mod adversary;
mod matrix;
pub mod simplex;
mod value;

pub use adversary::{
    lower_bound_adversary, rad_adversary, Adversary, BlockAdversary, SequenceAdversary, StochasticAdversary,
    TreeAdversary,
};
pub use matrix::{col_guarantee, row_guarantee, solve_matrix_game, MatrixGameSolution};
pub use value::{
    describe, supervised_spec, value_dual, value_primal, Form, GameSpec, GameValue, LossMode, Policy,
    DEFAULT_GAME_BUDGET,
};
