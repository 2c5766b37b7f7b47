//! Build each graph family and print its basic shape: vertex/edge
//! counts, degree bound, and component structure.
//!
//! Run with: cargo run --example graph_families

use hyperfinite::generators::{binary_tree, cycle, path, random_regular, torus};
use hyperfinite::Graph;

fn describe(name: &str, g: &Graph) {
    let degrees: Vec<usize> = (0..g.vertex_count() as u32).map(|v| g.degree(v)).collect();
    let min_deg = degrees.iter().min().copied().unwrap_or(0);
    let max_deg = degrees.iter().max().copied().unwrap_or(0);
    println!(
        "{name:<24} n={:<5} edges={:<6} degree bound={} (observed {min_deg}..={max_deg}) components={}",
        g.vertex_count(),
        g.edge_count(),
        g.degree_bound(),
        g.components().len(),
    );
}

fn main() {
    describe("path(10)", &path(10).expect("valid size"));
    describe("cycle(12)", &cycle(12).expect("valid size"));
    describe("torus(8)", &torus(8).expect("valid side"));
    describe("binary_tree(5)", &binary_tree(5).expect("valid depth"));
    describe(
        "random_regular(3, 100)",
        &random_regular(3, 100, 7).expect("3-regular on 100 vertices exists"),
    );

    // Same seed, same graph; different seed, (almost surely) different.
    let a = random_regular(3, 100, 7).unwrap();
    let b = random_regular(3, 100, 7).unwrap();
    let c = random_regular(3, 100, 8).unwrap();
    println!("\nseed 7 == seed 7: {}", a.edges() == b.edges());
    println!("seed 7 == seed 8: {}", a.edges() == c.edges());

    // The text round-trip preserves the graph exactly.
    let text = a.to_edge_list_string();
    let back = Graph::from_edge_list_str(&text).expect("own output re-parses");
    println!("text round-trip exact: {}", a.edges() == back.edges());
    println!("\nfirst lines of the edge-list format:");
    for line in text.lines().take(5) {
        println!("  {line}");
    }
}
