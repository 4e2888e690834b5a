//! Exact analysis of the sequences `⌊log_b(αn + β)⌋`.
//!
//! The crate follows the chain
//! `u_n regular ⇔ v_n automatic ⇔ {c_k} recognisable ⇔ L regular ⇔ r_k
//! ultimately periodic ⇔ α ∈ ℚ`, computing every object on the way exactly:
//! jump positions `c_k`, the digit-like sequence `r_k`, the base-changed
//! language `L_b(u)`, minimal automata, and level counts `f_k`.

pub mod exactnum;
pub mod numeration;
pub mod floorlog;
pub mod rkseq;
pub mod automata;
pub mod langreg;
pub mod fk;
pub(crate) mod serde_big;
pub mod cli;
