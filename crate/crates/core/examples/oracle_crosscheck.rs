//! Compare the permanent/determinant kernel with explicit expansion of the
//! creation-operator product for the full N=3 circuit.

use wstate::circuit::{build_layout, build_protocol_unitary};
use wstate::efficiency::optimal_delta;
use wstate::fock::output_distribution;
use wstate::oracle::full_distribution;
use wstate::{FockConfiguration, GCompletion, ParticleStatistics, ProtocolParams};

fn main() -> wstate::Result<()> {
    let n = 3;
    let layout = build_layout(n)?;
    let input = FockConfiguration::from_modes(layout.dim(), &layout.input_modes())?;

    for stats in [ParticleStatistics::Boson, ParticleStatistics::Fermion] {
        let params = ProtocolParams::balanced(n, optimal_delta(n), stats)?;
        let u = build_protocol_unitary(&params, &GCompletion::gram_schmidt(n)?)?;
        let kernel = output_distribution(&u, &input, stats, |_| true)?;
        let oracle = full_distribution(&u, &input, stats)?;

        let worst = kernel
            .iter()
            .map(|(c, a)| (a.0 - oracle.get(c).map(|b| b.0).unwrap_or_default()).norm())
            .fold(0.0, f64::max);
        let norm: f64 = oracle.values().map(|a| a.probability()).sum();
        println!(
            "{stats}: {} configurations, {} nonzero in oracle, norm {norm:.12}, max gap {worst:.2e}",
            kernel.len(),
            oracle.len()
        );
    }
    Ok(())
}
