//! Print the staged circuit for N=3 and dump the composed unitary as JSON.

use wstate::circuit::{build_layout, write_unitary_json, ProtocolStages};
use wstate::efficiency::optimal_delta;
use wstate::{GCompletion, ParticleStatistics, ProtocolParams};

fn main() -> wstate::Result<()> {
    let n = 3;
    let layout = build_layout(n)?;
    let params = ProtocolParams::balanced(n, optimal_delta(n), ParticleStatistics::Boson)?;
    let stages = ProtocolStages::new(&params, &GCompletion::gram_schmidt(n)?)?;

    let labels: Vec<_> = (0..layout.dim())
        .map(|i| layout.label(i).map(|l| l.to_string()))
        .collect::<Result<_, _>>()?;
    println!("modes: {}", labels.join(" "));
    println!("sigma:{}", stages.sigma.matrix().map(|z| z.re));

    let u = stages.compose()?;
    println!("unitarity residual {:.1e}", u.unitarity_residual());

    let path = std::env::temp_dir().join("wstate_n3_unitary.json");
    write_unitary_json(&u, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
