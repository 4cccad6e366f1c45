//! Andrews-Curtis census tooling for balanced presentations of the trivial
//! group on two generators: free-group words, AC-moves and certificates,
//! abelian invariants, primitivity, coset enumeration, the filtering census
//! and a genetic search for trivializations.

pub mod abelianization;
pub mod census;
pub mod cli;
pub mod fixtures;
pub mod gasearch;
pub mod presentation;
pub mod report;
pub mod toddcoxeter;
pub mod whitehead;
pub mod word;

pub use presentation::{AcMove, Certificate, CertificateError, Presentation, PresentationError};
pub use word::{Letter, Word, WordError};
