// Glue one pairing of tr(XᵀD₁XD₂⋯XᵀD₅XD₆)·tr(XᵀD₇XD₈XᵀD₉XD₁₀) and inspect
// the permutations and the resulting surface.
//
// cargo run --example gluing_walkthrough

use wte::perm::format_cycles;
use wte::{Gluing, Pairing, WordShape};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let shape = WordShape::alternating(vec![6, 4])?;
    let pairing = Pairing::from_blocks(10, &[(1, 9), (2, 7), (3, 4), (5, 10), (6, 8)])?;
    let gluing = Gluing::new(&shape);

    println!("pairing      {pairing}");
    println!("gamma+       {}", gluing.gamma_plus());
    println!("gamma-       {}", gluing.gamma_minus());
    println!("delta'       {}", gluing.delta_prime());

    let glued = gluing.glue(&pairing)?;
    println!("pi hat       {}", glued.pi_hat);
    println!("vertices     {}", glued.vertex);
    println!("particular   {}", format_cycles(&glued.particular));
    for c in &glued.particular {
        let factors: Vec<String> = c
            .iter()
            .map(|&k| if k < 0 { format!("D{}ᵀ", -k) } else { format!("D{k}") })
            .collect();
        println!("             Tr({})", factors.join(""));
    }

    let s = &glued.surface;
    for (i, c) in s.components.iter().enumerate() {
        println!(
            "component {i}: faces {:?}, V={} E={} F={} chi={} {}",
            c.faces, c.vertices, c.edges, c.face_count, c.euler, c.kind
        );
    }
    println!("order        N^{}", s.order_exponent);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
