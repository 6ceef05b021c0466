// Check the pairing formula against the brute-force Wick expansion on every
// transpose pattern of a short word.
//
// cargo run --example wick_verification

use num_bigint::BigInt;
use wte::matrix::dimension_profile;
use wte::oracle::wick_oracle;
use wte::{moment, Kind, Matrix, MatrixSet, MomentSpec, Rational, WordShape};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (n, m) = (3, 2);
    let mut checked = 0;
    for bits in 0u32..16 {
        let eps: Vec<i8> = (0..4).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
        let shape = WordShape::with_signs(vec![2, 2], eps.clone())?;
        let slots = dimension_profile(&shape, n, m)
            .into_iter()
            .enumerate()
            .map(|(k, (r, c))| {
                let data = (0..r * c)
                    .map(|i| Rational::from_integer(BigInt::from((i as i64 * 3 + k as i64) % 5 - 2)))
                    .collect();
                Matrix::new(r, c, data).unwrap()
            })
            .collect();
        let spec = MomentSpec::new(shape, MatrixSet::new(slots), n, m)?;
        let engine = moment(&spec)?.total;
        let wick = wick_oracle(&spec, Kind::Moment)?;
        println!("eps {eps:?}: engine {engine:<12} wick {wick:<12} {}", if engine == wick { "ok" } else { "MISMATCH" });
        assert_eq!(engine, wick);
        checked += 1;
    }
    println!("{checked} transpose patterns agree exactly");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
