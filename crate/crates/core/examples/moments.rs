// Exact and floating-point moments with explicit constant matrices.
//
// cargo run --example moments

use num_bigint::BigInt;
use wte::matrix::dimension_profile;
use wte::{moment, wigner_moment, Matrix, MatrixSet, MomentSpec, Rational, WordShape};

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn ints(n: usize, v: &[i64]) -> Matrix<Rational> {
    Matrix::new(n, n, v.iter().map(|&x| int(x)).collect()).unwrap()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let d1 = ints(3, &[2, 1, 0, 0, 1, -1, 3, 0, 1]);
    let d2 = ints(3, &[1, 0, 2, -1, 1, 0, 0, 4, 1]);

    // E tr(XᵀD₁XD₂) = tr(D₁) tr(D₂)
    let shape = WordShape::alternating(vec![2])?;
    let spec = MomentSpec::new(shape, MatrixSet::new(vec![d1.clone(), d2.clone()]), 3, 3)?;
    let exact = moment(&spec)?;
    println!("E tr(X'D1 X D2)     = {} (terms: {})", exact.total, exact.terms.len());
    println!("tr(D1) tr(D2)       = {}", d1.trace()? * d2.trace()? / int(9));

    // E tr(XD₁XD₂) = N⁻² Tr(D₁D₂ᵀ)
    let shape = WordShape::with_signs(vec![2], vec![1, 1])?;
    let spec = MomentSpec::new(shape, MatrixSet::new(vec![d1.clone(), d2.clone()]), 3, 3)?;
    println!("E tr(X D1 X D2)     = {}", moment(&spec)?.total);
    println!("N^-2 Tr(D1 D2ᵀ)     = {}", d1.matmul(&d2.transpose())?.trace()? / int(9));

    // Wigner letters Z = (X + Xᵀ)/2
    let z = spec.clone().with_wigner(vec![true])?;
    println!("E tr(Z D1 Z D2)     = {}", wigner_moment(&z)?.total);

    // a longer rectangular word in floating point
    let shape = WordShape::alternating(vec![4, 2])?;
    let profile = dimension_profile(&shape, 5, 3);
    let slots = profile.iter().map(|&(r, _)| Matrix::<Rational>::identity(r)).collect();
    let spec = MomentSpec::new(shape, MatrixSet::new(slots), 5, 3)?.to_f64();
    let res = moment(&spec)?;
    println!(
        "E tr((X'X)^2) tr(X'X), N=5 M=3 = {} over {} pairings in {:?}",
        res.total,
        res.terms.len(),
        res.elapsed
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
