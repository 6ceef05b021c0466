// Cumulants, the moment-cumulant relation, and the scaled covariance
// N²k₂ approaching its leading-order value.
//
// cargo run --example cumulants_and_clt

use wte::engine::{leading_total, moment_from_cumulants};
use wte::matrix::dimension_profile;
use wte::{clt_report, cumulant, moment, Matrix, MatrixSet, MomentSpec, Rational, WordShape};

fn identities(shape: &WordShape, n: usize, m: usize) -> MatrixSet<Rational> {
    MatrixSet::new(
        dimension_profile(shape, n, m)
            .into_iter()
            .map(|(r, _)| Matrix::identity(r))
            .collect(),
    )
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let shape = WordShape::alternating(vec![2, 4, 2])?;
    let spec = MomentSpec::new(shape.clone(), identities(&shape, 3, 2), 3, 2)?;
    let k3 = cumulant(&spec)?;
    println!("k3 = {} from {} connected pairings", k3.total, k3.terms.len());
    println!("moment            {}", moment(&spec)?.total);
    println!("sum of cumulants  {}", moment_from_cumulants(&spec)?);

    println!("\nN   N^2 k2(tr X'X)   leading   gap");
    let pair = WordShape::alternating(vec![2, 2])?;
    for n in [4usize, 8, 16, 32] {
        let spec = MomentSpec::new(pair.clone(), identities(&pair, n, n), n, n)?;
        let k2 = cumulant(&spec)?;
        let n2 = Rational::from_integer((n * n).into());
        let full = &n2 * &k2.total;
        let lead = &n2 * &leading_total(&k2);
        println!("{n:<3} {full:<16} {lead:<9} {}", &full - &lead);
    }

    let quartic = WordShape::alternating(vec![4, 4])?;
    println!("\nN   N^2 k2(tr (X'X)^2)   leading");
    for n in [4usize, 8, 16] {
        let spec = MomentSpec::new(quartic.clone(), identities(&quartic, n, n), n, n)?;
        let rep = clt_report(&spec.select(&[0]))?;
        println!("{n:<3} {:<20} {}", rep.full[0][0], rep.leading[0][0]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
