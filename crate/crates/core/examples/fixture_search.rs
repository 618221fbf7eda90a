//! Randomized search for fixed-degree digraphs with given robustness labels.
//!
//! Usage: fixture_search <n> <in_degree> <seed> <r:s>[,<r:s>...]
//!
//! Prints the first graph satisfying every label as fixture JSON.

use oddic_core::graph::generate_random_digraph;
use oddic_core::graph::robustness::check_rs_robustness;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() != 5 {
        eprintln!("usage: fixture_search <n> <in_degree> <seed> <r:s>[,<r:s>...]");
        std::process::exit(2);
    }
    let n: usize = args[1].parse().expect("n");
    let k: usize = args[2].parse().expect("in_degree");
    let seed: u64 = args[3].parse().expect("seed");
    let labels: Vec<(usize, usize)> = args[4]
        .split(',')
        .map(|p| {
            let (r, s) = p.split_once(':').expect("r:s");
            (r.parse().expect("r"), s.parse().expect("s"))
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..10_000 {
        let g = generate_random_digraph(n, k, &mut rng).expect("valid in-degree");
        let ok = labels
            .iter()
            .all(|&(r, s)| check_rs_robustness(&g, r, s).expect("small graph"));
        if ok {
            eprintln!("found after {} attempts", attempt + 1);
            let lists: Vec<Vec<usize>> = g
                .all_in_neighbors()
                .iter()
                .map(|l| {
                    let mut l = l.clone();
                    l.sort_unstable();
                    l
                })
                .collect();
            println!("{{\"n\": {n}, \"in_neighbors\": {lists:?}}}");
            return;
        }
    }
    eprintln!("no graph found");
    std::process::exit(1);
}
