//! Exact mass-transport verification: for every function in the
//! catalog, the average mass a root sends equals the average mass it
//! receives, as an identity of rational numbers.
//!
//! Run with: cargo run --example mass_transport

use hyperfinite::generators::{binary_tree, random_regular, torus};
use hyperfinite::stats::LocalFunction;
use hyperfinite::{mtp_check, Graph};

fn main() {
    let graphs: Vec<(&str, Graph)> = vec![
        ("torus(6)", torus(6).unwrap()),
        ("binary_tree(4)", binary_tree(4).unwrap()),
        ("random_regular(3, 60)", random_regular(3, 60, 5).unwrap()),
        (
            "star + isolated vertex",
            Graph::new(5, &[(0, 1), (0, 2), (0, 3)], None).unwrap(),
        ),
    ];

    for (name, g) in &graphs {
        println!("{name}:");
        for f in LocalFunction::CATALOG {
            let report = mtp_check(g, f).unwrap();
            println!(
                "  f={:<12} lhs = {}/{} rhs = {}/{} discrepancy = {}",
                f.to_string(),
                report.lhs.numer(),
                report.lhs.denom(),
                report.rhs.numer(),
                report.rhs.denom(),
                report.discrepancy(),
            );
            assert_eq!(report.lhs, report.rhs, "transport identity is exact");
        }
        println!();
    }

    // The identity is not a triviality of symmetric functions: the
    // degree-weighted edge indicator is asymmetric in (x, y), yet the
    // two sides still agree because summing over all ordered pairs
    // double-counts both ways identically.
    let star = &graphs[3].1;
    let report = mtp_check(star, LocalFunction::DegEdge).unwrap();
    println!(
        "deg_edge on the star: both sides equal {}/{} exactly",
        report.lhs.numer(),
        report.lhs.denom(),
    );
}
