// Classify every pairing of a word by the surface it glues into.
//
// cargo run --example surface_census -- 6 4

use std::collections::BTreeMap;

use wte::perm::pairing_count;
use wte::{enumerate_pairings, Gluing, WordShape};

pub fn census(lengths: Vec<usize>) -> Result<BTreeMap<(i64, String), usize>, Box<dyn std::error::Error>> {
    let shape = WordShape::alternating(lengths)?;
    let gluing = Gluing::new(&shape);
    let mut counts = BTreeMap::new();
    for p in enumerate_pairings(shape.letters()) {
        let s = gluing.glue(&p)?.surface;
        let kinds: Vec<String> = s.components.iter().map(|c| c.kind.to_string()).collect();
        *counts.entry((-s.order_exponent, kinds.join(" + "))).or_insert(0) += 1;
    }
    Ok(counts)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let lengths = if args.is_empty() { vec![6, 4] } else { args };
    let m: usize = lengths.iter().sum();
    let counts = census(lengths.clone())?;
    println!("word lengths {lengths:?}: {} pairings", pairing_count(m));
    println!("{:>6}  {:<32} {:>6}", "order", "surface", "count");
    for ((order, kinds), count) in &counts {
        println!("{:>6}  {:<32} {:>6}", -order, kinds, count);
    }
    assert_eq!(counts.values().sum::<usize>() as u64, pairing_count(m));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
