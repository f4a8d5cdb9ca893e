//! Closed-form optimum against a golden-section search, and the large-N
//! expansion.

use wstate::efficiency::{
    asymptotic_efficiency, golden_section_delta_sq, optimal_delta_sq, optimal_efficiency,
};

fn main() {
    println!(
        "{:>4} {:>16} {:>16} {:>10} {:>14} {:>14}",
        "N", "delta^2 closed", "delta^2 search", "gap", "Eff", "asymptote"
    );
    for n in [2, 3, 4, 5, 10, 20, 50, 100, 300] {
        let closed = optimal_delta_sq(n);
        let search = golden_section_delta_sq(n);
        println!(
            "{n:>4} {closed:>16.12} {search:>16.12} {:>10.1e} {:>14.8e} {:>14.8e}",
            (closed - search).abs(),
            optimal_efficiency(n),
            asymptotic_efficiency(n)
        );
    }
}
