// Parse trace expressions, bind matrices, and show the diagnostics for bad
// input.
//
// cargo run --example parse_expressions

use num_bigint::BigInt;
use wte::expr::{elaborate, parse, parse_with_warnings, Context, Gram};
use wte::{moment, Bindings, Matrix, Rational};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let text = "E[ Tr(X^T D1 X D2) tr(X' D1 X D3) ]";
    let ast = parse(text)?;
    println!("{text}\n  -> {ast}");

    let a = Matrix::from_rows(vec![
        vec![Rational::from_integer(BigInt::from(1)), Rational::from_integer(BigInt::from(2))],
        vec![Rational::from_integer(BigInt::from(0)), Rational::from_integer(BigInt::from(1))],
    ])?;
    let mut ctx = Context::new(3, 2);
    ctx.bindings = Some(Bindings::new().matrix("D1", a).identity("D2", 3).alias("D3", "D2"));
    let spec = elaborate(&ast, &ctx)?;
    println!("  value {}", moment(&spec)?.total);

    let (ast, warnings) = parse_with_warnings("E[ tr(D2 G' D1 H) ]")?;
    println!("{ast}  ({})", warnings.join("; "));
    let mut ctx = Context::new(2, 2);
    ctx.gram = Some(Gram::parse("G H\n1 1/2\n1/2 1\n")?);
    println!("  value {}", moment(&elaborate(&ast, &ctx)?)?.total);

    for bad in ["E[ tr(X D1 X) ]", "E[ tr(X D1 D2 D3) ]", "E[ tr(X D1 ]", "E[ tr() ]", "E[ tr(X # D1) ]"] {
        println!("{bad:<22} {}", parse(bad).unwrap_err());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
