//! Squares of every permutation in S_1..S_4 under each of the four candidate
//! matrix conventions; only one gives nonnegative, consistent results.

use glnlab_core::grothendieck::{square_report_with, MatrixCache};
use glnlab_core::{Convention, DecompositionOptions, KlCache, Permutation};

fn main() {
    let cache = KlCache::new();
    for conv in Convention::all() {
        let opts = DecompositionOptions {
            convention: conv,
            ..Default::default()
        };
        let matrices = MatrixCache::new();
        let mut summary = Vec::new();
        for k in 1..=4 {
            for s in Permutation::all(k) {
                match square_report_with(&s, &cache, &matrices, &opts) {
                    Ok(r) if r.length > 1 => summary.push(format!("{s}:{:?}", r.multiplicities())),
                    Ok(_) => {}
                    Err(e) => summary.push(format!("{s}:ERR {e}")),
                }
            }
        }
        println!("{conv:?}: {}", summary.join(" "));
    }
}
