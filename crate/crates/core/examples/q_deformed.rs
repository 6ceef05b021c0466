// Crossing-weighted pairings and correlated matrix families.
//
// cargo run --example q_deformed

use num_bigint::BigInt;
use wte::{moment, Matrix, MatrixSet, MomentSpec, Rational, WordShape};

fn frac(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let shape = WordShape::with_signs(vec![4], vec![1, 1, 1, 1])?;
    let base = MomentSpec::new(shape.clone(), MatrixSet::new(vec![Matrix::identity(3); 4]), 3, 3)?
        .with_wigner(vec![true])?;
    for q in [frac(-1, 1), frac(0, 1), frac(1, 2), frac(1, 1)] {
        let v = moment(&base.clone().with_q(q.clone())?)?.total;
        println!("q = {q:<4} E tr(Z^4) = {v}");
    }

    // two families with correlation 1/2: tr(G H G H)
    let shape = WordShape::new(vec![4], vec![1, 1, 1, 1], vec![0, 1, 0, 1])?;
    let gram = Matrix::from_rows(vec![vec![frac(1, 1), frac(1, 2)], vec![frac(1, 2), frac(1, 1)]])?;
    let spec = MomentSpec::new(shape, MatrixSet::new(vec![Matrix::identity(3); 4]), 3, 3)?
        .with_gram(vec!["G".into(), "H".into()], gram)?
        .with_wigner(vec![true, true])?;
    println!("E tr(GHGH), <G,H> = 1/2: {}", moment(&spec)?.total);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
