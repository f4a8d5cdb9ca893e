//! Simulate the circuit for a range of N and compare with the W state.

use wstate::efficiency::{efficiency_closed_form, optimal_delta};
use wstate::protocol::{fidelity, run_protocol, w_state};
use wstate::{ParticleStatistics, ProtocolParams};

fn main() -> wstate::Result<()> {
    println!(
        "{:>2} {:>8} {:>14} {:>14} {:>10}",
        "N", "delta", "P(success)", "closed form", "1 - F"
    );
    for n in 2..=8 {
        let delta = optimal_delta(n);
        let params = ProtocolParams::balanced(n, delta, ParticleStatistics::Boson)?;
        let state = run_protocol(&params)?;
        let f = fidelity(&state, &w_state(n)?)?;
        println!(
            "{n:>2} {delta:>8.5} {:>14.10} {:>14.10} {:>10.1e}",
            state.success_probability(),
            efficiency_closed_form(n, delta),
            1.0 - f
        );
    }

    let state = run_protocol(&ProtocolParams::balanced(
        3,
        0.5,
        ParticleStatistics::Boson,
    )?)?;
    println!("\nN=3, delta=0.5:\n{state}");
    Ok(())
}
