//! F-sets: finite unions of `gamma0 + C(g_1; d_1) + ... + C(g_k; d_k) + H`,
//! where `C(g; d) = {g + F^d g + ... + F^{(n-1)d} g : n >= 1}` and `H` is an
//! `F`-invariant subgroup.

mod compile;
mod expr;
mod normal;
mod oracle;
mod pnormal;
mod power;

pub use compile::{
    compile_fset, cycle_dfa, image_under_f, singleton_dfa, subgroup_dfa, sum_dfa, translate_dfa, union_dfa,
    CycleStrategy, Compiler,
};
pub use expr::{FSetExpr, Term};
pub use normal::{normalize, NormalComponent, NormalForm, MAX_BLOCK_DIGITS};
pub use oracle::FSetOracle;
pub use pnormal::{coset_expr, from_pnormal, pnormal_to_expr, to_pnormal, ElementaryNested, PNormal};
pub use power::{cycle_beta, cycle_to_power, CyclePiece};
