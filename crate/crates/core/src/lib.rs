//! Workbench for the resource-control lambda calculus: terms with explicit
//! erasure and duplication, explicit substitution, reduction modulo
//! structural equivalence, and intersection-type derivations.

pub mod alpha;
pub mod bridge;
pub mod certify;
pub mod deriv;
pub mod equiv;
pub mod linear;
pub mod nf;
pub mod reduce;
pub mod subst;
pub mod syntax;
pub mod term;
pub mod transport;
pub mod types;

pub use alpha::{alpha_eq, alpha_normalize, freshen};
pub use bridge::{to_plain, to_resource};
pub use equiv::{equiv_canonical, equiv_class, key, Key};
pub use linear::{check_linear, free_var_list, LinearityReport};
pub use nf::{classify_head_form, is_normal_form, HeadForm, HeadTag};
pub use syntax::{parse_plain, parse_sterm, parse_term, ParseError};
pub use term::{Name, Path, STerm, Term};
pub use subst::{eval_subst, measure, mul_multiset, step_subst, substitute, substitute_many, SubstTrace};
pub use linear::sfree_var_list;
