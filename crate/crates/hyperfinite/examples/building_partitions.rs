//! Cuts with bounded component size: the exact oracle on toy graphs,
//! the deterministic baselines at scale, and the structural gap
//! between grid-like and expander-like graphs.
//!
//! Run with: cargo run --example building_partitions

use hyperfinite::generators::{cycle, random_regular, torus};
use hyperfinite::{
    brute_force_optimal_cut, greedy_ball_partition, grid_block_cut, random_shifted_partition,
    verify_partition, Graph,
};

fn main() {
    // Exact minimum on a 6-cycle with components of at most 3: two
    // opposite edges.
    let c6 = cycle(6).unwrap();
    let best = brute_force_optimal_cut(&c6, 3).unwrap();
    println!("optimal cut of C6 at k=3: {:?}", best.to_vec());

    // Greedy pays more than the optimum on the same instance.
    let greedy = greedy_ball_partition(&c6, 3).unwrap();
    println!("greedy cut of C6 at k=3:  {:?} (size {})", greedy.to_vec(), greedy.len());

    // A 16x16 torus chopped into 4x4 blocks: the cut fraction of the
    // aligned block cut is exactly 2/block.
    let t16 = torus(16).unwrap();
    for block in [2u32, 4, 8] {
        let cut = grid_block_cut(16, block).unwrap();
        let q = verify_partition(&t16, &cut, (block * block) as usize).unwrap();
        println!(
            "torus(16), {block}x{block} blocks: k_max={} cut_fraction={} boundary_degree_mean={}",
            q.k_max, q.cut_fraction, q.boundary_degree_mean,
        );
    }

    // Grids get cheap cuts as k grows; random regular graphs do not.
    println!();
    let rr = random_regular(3, 1000, 1).unwrap();
    for k in [10usize, 50, 200] {
        let grid_cut = greedy_ball_partition(&t16, k).unwrap();
        let rr_cut = greedy_ball_partition(&rr, k).unwrap();
        let gq = verify_partition(&t16, &grid_cut, k).unwrap();
        let rq = verify_partition(&rr, &rr_cut, k).unwrap();
        println!(
            "greedy at k={k:<4} torus(16) fraction {:.4} | random 3-regular fraction {:.4}",
            gq.cut_fraction, rq.cut_fraction,
        );
    }

    // The randomized constructor is seed-deterministic and never emits
    // an oversized component.
    println!();
    let g = Graph::new(
        12,
        &[
            (0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 5), (5, 6), (6, 7), (7, 4),
            (6, 8), (8, 9), (9, 10), (10, 11), (11, 8),
        ],
        None,
    )
    .unwrap();
    for seed in 0..3 {
        let cut = random_shifted_partition(&g, 4, seed).unwrap();
        let q = verify_partition(&g, &cut, 4).unwrap();
        println!(
            "random shift seed {seed}: cut size {} k_max {} valid {}",
            q.cut_size, q.k_max, q.valid,
        );
    }
}
