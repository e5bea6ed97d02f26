//! Substitutions, unification and the resolution calculus.

mod inference;
mod subst;
mod unify;

pub use inference::{
    canonical_literals, factor, generate_inferences, generate_inferences_excluding, is_tautology, rename_apart,
    resolve, variant_key, InferenceError, VariantKey,
};
pub use subst::{Substitutable, Substitution};
pub use unify::{unify, unify_atoms, UnifyError};
