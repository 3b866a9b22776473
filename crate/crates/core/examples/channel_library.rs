//! The channel constructors and their characteristic signatures.
//!
//! ```bash
//! cargo run --example channel_library
//! ```

use cvchannel::analysis::pair_ppt_eigenvalues;
use cvchannel::channels::{
    classical_noise_channel, cluster_channel, conjugate_pairs, dfg_array, loss_channel,
    nullifier_variances, quantum_noise_channel, single_mode_squeezer, DfgSpec, GraphSpec, LossSpec,
    Rotation,
};
use cvchannel::linalg::Mat;
use cvchannel::symplectic::vacuum_state;
use cvchannel::{apply_channel, GaussianChannel};

fn report(name: &str, ch: &GaussianChannel) -> cvchannel::Result<()> {
    let out = apply_channel(ch, &vacuum_state(ch.modes())?)?;
    let ppt = pair_ppt_eigenvalues(out.cov(), &conjugate_pairs(ch.modes()))?;
    let ppt: Vec<String> = ppt.iter().map(|v| format!("{v:+.3}")).collect();
    println!(
        "{name:<28} modes {:>2}  margin {:+.1e}  pair PPT [{}]",
        ch.modes(),
        ch.margin(),
        ppt.join(", ")
    );
    Ok(())
}

fn main() -> cvchannel::Result<()> {
    report("single-mode squeezer", &single_mode_squeezer(0.5, 0, 2)?)?;
    report("DFG array r=0.5", &dfg_array(&DfgSpec::uniform(8, 0.5))?)?;
    report(
        "rotated mode-dependent loss",
        &loss_channel(&LossSpec {
            transmissivities: vec![0.9, 0.5],
            rotation: Some(Rotation::beamsplitter(0, 1, 0.6)),
        })?,
    )?;
    report(
        "quantum noise eta=0.1",
        &quantum_noise_channel(0.1, 0.6, 2)?,
    )?;
    report(
        "classical noise",
        &classical_noise_channel(Mat::identity(4, 4) * 0.3)?,
    )?;

    let graph = GraphSpec::linear(4, 1.0);
    let cluster = cluster_channel(&graph)?;
    report("linear cluster r=1", &cluster)?;
    let out = apply_channel(&cluster, &vacuum_state(4)?)?;
    println!(
        "cluster nullifier variances {:?} (e^-2 = {:.4})",
        nullifier_variances(&graph.adjacency, out.cov().as_matrix()),
        (-2.0f64).exp()
    );
    Ok(())
}
