//! Fermions reach the same success probability as bosons, but every one-hot
//! term except the first picks up a minus sign. A phase of pi on output
//! path 1 restores the W state.

use wstate::efficiency::optimal_delta;
use wstate::protocol::{fidelity, run_protocol, w_state};
use wstate::{ParticleStatistics, ProtocolParams};

fn main() -> wstate::Result<()> {
    let n = 4;
    let w = w_state(n)?;
    let base = ProtocolParams::balanced(n, optimal_delta(n), ParticleStatistics::Fermion)?;

    for on in [false, true] {
        let state = run_protocol(&base.with_phase_correction(on))?;
        println!(
            "phase correction {on}: P = {:.10}, F = {:.6}",
            state.success_probability(),
            fidelity(&state, &w)?
        );
        for k in 1..=n {
            let i = state.one_hot_index(k);
            println!("  {}  {:+.6}", state.bitstring(i), state.amplitudes()[i].re);
        }
    }

    let boson = run_protocol(&ProtocolParams::balanced(
        n,
        optimal_delta(n),
        ParticleStatistics::Boson,
    )?)?;
    println!("boson P = {:.10}", boson.success_probability());
    Ok(())
}
