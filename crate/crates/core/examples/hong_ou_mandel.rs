//! Two-particle interference on a balanced beam splitter.
//!
//! Bosons bunch (no coincidences), fermions always exit in separate ports.

use wstate::fock::{determinant, output_distribution, permanent};
use wstate::{FockConfiguration, ModeUnitary, ParticleStatistics};

fn main() -> wstate::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bs = ModeUnitary::from_real_rows(&[&[s, s], &[s, -s]])?;
    let input = FockConfiguration::new(vec![1, 1]);

    println!(
        "perm = {}, det = {}",
        permanent(bs.matrix())?,
        determinant(bs.matrix())?
    );

    for stats in [ParticleStatistics::Boson, ParticleStatistics::Fermion] {
        println!("{stats}:");
        for (config, amp) in output_distribution(&bs, &input, stats, |_| true)? {
            println!(
                "  {config}  amplitude {:+.6}  probability {:.6}",
                amp.0.re,
                amp.probability()
            );
        }
    }
    Ok(())
}
