//! The modal μ-calculus on modal space models.
//!
//! Formulas denote clopen sets and fixpoints are taken in the lattice of
//! clopen sets. Two carriers are supported: finite discrete spaces and the
//! one-point compactification `ℕ ∪ {∞}` of the naturals, where fixpoint
//! iteration runs through limit stages computed exactly on set
//! descriptors.
//!
//! | module | contents |
//! |--------|----------|
//! | [`algebra`] | carriers, set descriptors, closure and interior, chain limits |
//! | [`formula`] | syntax, parser, printer, clean formulas, priorities |
//! | [`space`] | models, model files, validation of the modal-space conditions |
//! | [`semantics`] | clopen and standard denotations with approximation traces |
//! | [`game_core`] | parity arenas, solver, strategies, plays |
//! | [`game_build`] | fixpoint games, evaluation games, canonical strategies |
//! | [`bisim`] | Kripke and clopen bisimulations, invariance checks |
//! | [`oracle`] | seeded cross-checks against brute force |
//!
//! ```
//! use clopenmu::algebra::LimitParams;
//! use clopenmu::formula::Formula;
//! use clopenmu::semantics::{eval_den, Env};
//! use clopenmu::space::ModalSpaceModel;
//!
//! let model = ModalSpaceModel::countdown();
//! let phi = Formula::parse(r"mu q. (p \/ <> q)").unwrap();
//! let den = eval_den(&model, &phi, &Env::new(), &LimitParams::default()).unwrap();
//! assert!(den.value.is_full());
//! ```
//!
//! The guide in `book/` covers the concepts; its code blocks run as
//! doc-tests of this crate.

pub mod algebra;
pub mod bisim;
pub mod formula;
pub mod game_build;
pub mod game_core;
pub mod oracle;
pub mod semantics;
pub mod space;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/descriptors.md")]
    mod descriptors {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/semantics.md")]
    mod semantics {}
    #[doc = include_str!("../../../book/src/parity_games.md")]
    mod parity_games {}
    #[doc = include_str!("../../../book/src/fixpoint_games.md")]
    mod fixpoint_games {}
    #[doc = include_str!("../../../book/src/evaluation_games.md")]
    mod evaluation_games {}
    #[doc = include_str!("../../../book/src/bisimulation.md")]
    mod bisimulation {}
    #[doc = include_str!("../../../book/src/cross_checks.md")]
    mod cross_checks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
