//! Collapse a weighted ensemble of cuts into a single cut at least as
//! good as the ensemble average, by picking the best sample
//! independently on every component of the host graph.
//!
//! Run with: cargo run --example derandomizing_ensembles

use hyperfinite::exact::{rat, to_f64};
use hyperfinite::generators::torus;
use hyperfinite::{
    build_ensemble, derandomize_cut, verify_partition, CutEnsemble, EdgeCut, Graph, WeightedCut,
};

fn main() {
    // Twenty random-shift samples on a torus: the derandomized cut is
    // never worse than the ensemble mean.
    let g = torus(8).unwrap();
    let ens = build_ensemble(&g, 9, 20, 42).unwrap();
    let mean = ens.mean_cut_fraction(g.vertex_count());
    let single = derandomize_cut(&g, &ens).unwrap();
    let q = verify_partition(&g, &single, 9).unwrap();
    println!(
        "torus(8), k=9: ensemble mean fraction {:.4}, derandomized fraction {:.4}, valid {}",
        to_f64(&mean),
        q.cut_fraction,
        q.valid,
    );
    assert!(rat(q.cut_size as i128, g.vertex_count() as i128) <= mean);

    // On a multi-component host the choice is made per component, so
    // the result can beat every individual sample, not just the mean.
    // Host: two disjoint 6-cycles. Sample A is cheap on the first
    // cycle (two opposite edges) but shatters the second; sample B is
    // the mirror image.
    let mut edges: Vec<(u32, u32)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    edges.extend((0..6).map(|i| (6 + i, 6 + (i + 1) % 6)));
    let host = Graph::new(12, &edges, None).unwrap();

    let shatter_first: Vec<(u32, u32)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    let shatter_second: Vec<(u32, u32)> = (0..6).map(|i| (6 + i, 6 + (i + 1) % 6)).collect();
    let sample_a =
        EdgeCut::new([(0, 1), (3, 4)].into_iter().chain(shatter_second.clone())).unwrap();
    let sample_b =
        EdgeCut::new(shatter_first.into_iter().chain([(6, 7), (9, 10)])).unwrap();

    let ens = CutEnsemble::new(
        3,
        vec![
            WeightedCut { cut: sample_a, weight: rat(1, 2) },
            WeightedCut { cut: sample_b, weight: rat(1, 2) },
        ],
    )
    .unwrap();
    let combined = derandomize_cut(&host, &ens).unwrap();
    println!(
        "\ntwo 6-cycles, k=3: sample sizes {} and {}, mean size {}, combined size {}",
        ens.samples()[0].cut.len(),
        ens.samples()[1].cut.len(),
        to_f64(&(ens.mean_cut_fraction(12) * rat(12, 1))),
        combined.len(),
    );
    let q = verify_partition(&host, &combined, 3).unwrap();
    assert!(q.valid);
    println!("combined cut: {:?}", combined.to_vec());
}
