//! Canonical codes for rooted neighborhoods, and the rooted metric
//! they induce: two rooted graphs at distance 1/r agree on radius-r
//! balls and differ at radius r+1.
//!
//! Run with: cargo run --example rooted_codes

use hyperfinite::canon::CodeCache;
use hyperfinite::generators::{cycle, path, torus};
use hyperfinite::rooted::{ball, rooted_distance, RootedDistance};

fn main() {
    let c12 = cycle(12).expect("valid size");
    let p12 = path(12).expect("valid size");
    let mut cache = CodeCache::new();

    // Inside a long cycle, every root looks the same at small radius.
    let code_a = cache.rooted(&ball(&c12, 0, 2).unwrap()).unwrap();
    let code_b = cache.rooted(&ball(&c12, 5, 2).unwrap()).unwrap();
    println!("cycle roots 0 and 5, radius 2: codes equal = {}", code_a == code_b);

    // A path endpoint looks different from an interior vertex.
    let end = cache.rooted(&ball(&p12, 0, 2).unwrap()).unwrap();
    let mid = cache.rooted(&ball(&p12, 6, 2).unwrap()).unwrap();
    println!("path end vs middle, radius 2: codes equal = {}", end == mid);
    println!("a code in hex: {}", mid.to_hex());

    // The interior of a long path is locally indistinguishable from a
    // cycle: the rooted distance is the reciprocal of the first radius
    // where the difference becomes visible.
    for (label, d) in [
        ("cycle@0 vs cycle@5 ", rooted_distance(&c12, 0, &c12, 5, 16).unwrap()),
        ("cycle@0 vs path@6  ", rooted_distance(&c12, 0, &p12, 6, 16).unwrap()),
        ("cycle@0 vs path@0  ", rooted_distance(&c12, 0, &p12, 0, 16).unwrap()),
        ("torus@0 vs cycle@0 ", rooted_distance(&torus(6).unwrap(), 0, &c12, 0, 16).unwrap()),
    ] {
        match d {
            RootedDistance::Zero => println!("{label} distance 0 (isomorphic)"),
            RootedDistance::Reciprocal(r) => {
                println!("{label} distance 1/{r} = {}", d.value())
            }
            RootedDistance::AtMostReciprocal(r) => {
                println!("{label} distance <= 1/{r} (unresolved at probe limit)")
            }
        }
    }
}
