//! Scalar Gaussian special functions, permutation enumeration and the
//! sorted-region predicates shared by the rest of the crate.

mod normal;
mod permutation;
mod sorted;

pub use normal::{
    ln_std_normal_cdf, ln_std_normal_pdf, std_normal_cdf, std_normal_pdf, std_normal_quantile,
    FRAC_1_SQRT_2PI,
};
pub use permutation::{
    all_permutations, apply_permutation, factorial, permutations, Permutation, Permutations,
    MAX_PERMUTATION_DIM,
};
pub use sorted::{is_in_sorted_region, sort_ascending, SortedVector};

pub(crate) use permutation::{check_permutation_dim, lexicographic_rank};
pub(crate) use sorted::argsort_into;
