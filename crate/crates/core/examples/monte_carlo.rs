// Compare exact values with sampled Gaussian matrices.
//
// cargo run --release --example monte_carlo

use wte::oracle::mc_oracle;
use wte::{moment, Kind, Matrix, MatrixSet, MomentSpec, WordShape};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 6;
    let d1 = Matrix::new(n, n, (0..n * n).map(|i| ((i * 7) % 5) as f64 / 4.0 - 0.5).collect())?;
    let d2 = Matrix::new(n, n, (0..n * n).map(|i| ((i * 3) % 4) as f64 / 3.0).collect())?;
    for lengths in [vec![2], vec![4]] {
        let shape = WordShape::alternating(lengths.clone())?;
        let slots = (0..shape.letters())
            .map(|k| if k % 2 == 0 { d1.clone() } else { d2.clone() })
            .collect();
        let spec = MomentSpec::new(shape, MatrixSet::new(slots), n, n)?;
        let exact = moment(&spec)?.total;
        let rep = mc_oracle(&spec, Kind::Moment, 20_000, 42)?;
        println!(
            "letters {:?}: exact {exact:.6}  estimate {:.6} ± {:.6}  z = {:.2}",
            lengths,
            rep.estimate,
            rep.std_error,
            rep.z_score(exact)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
