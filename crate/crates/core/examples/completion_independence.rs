//! Only the uniform first column of G matters: random completions give the
//! same post-selected state even though the full mode unitaries differ.

use wstate::circuit::build_protocol_unitary;
use wstate::efficiency::optimal_delta;
use wstate::protocol::run_protocol_with_completion;
use wstate::{GCompletion, ParticleStatistics, ProtocolParams};

fn main() -> wstate::Result<()> {
    let n = 5;
    let params = ProtocolParams::balanced(n, optimal_delta(n), ParticleStatistics::Boson)?;
    let reference_g = GCompletion::gram_schmidt(n)?;
    let reference = run_protocol_with_completion(&params, &reference_g)?;
    let reference_u = build_protocol_unitary(&params, &reference_g)?;

    for seed in 1..=4 {
        let g = GCompletion::randomized(n, seed)?;
        let u = build_protocol_unitary(&params, &g)?;
        let state = run_protocol_with_completion(&params, &g)?;
        let unitary_gap = (u.matrix() - reference_u.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let state_gap = state
            .amplitudes()
            .iter()
            .zip(reference.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        println!("seed {seed}: max |dM| = {unitary_gap:.3}, max |d psi| = {state_gap:.1e}");
    }
    Ok(())
}
