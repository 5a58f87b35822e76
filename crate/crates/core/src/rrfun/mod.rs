//! Orders Λ ⊆ Γ with an ideal I, the triangular algebra D = [[Λ/I, Γ/I], [0, Γ/I]],
//! triples (U, V, f) and the functor F: M ↦ (M/MI, MΓ/MI, σ_M).

mod datum;
mod functor;
mod realize;
mod triple;

pub use datum::{BaeckstroemDatum, DAlgebra};
pub use functor::{
    apply_f, apply_f_morphism, f_as_ppspec, f_image, fullness_direct, gamma_closure, gamma_closure_with_basis,
    route_comparison, FImage,
};
pub use realize::{primitive_idempotents, projective_cover, realize_triple};
pub use triple::{enumerate_indecomposables, in_d_class, in_d_class_pp, simple_modules, TripleMap, TripleModule};
