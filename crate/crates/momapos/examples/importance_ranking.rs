//! Scores object importance for opening the fridge in the 30-object
//! kitchen and shows which objects a few thresholds would keep.

use momapos::fixtures;
use momapos::importance::{score_scene, select_objects, EmbedParams, WalkParams};

fn main() {
    let scene = fixtures::kitchen_30();
    let walk = WalkParams { seed: 11, ..WalkParams::default() };
    let embed = EmbedParams { seed: 12, ..EmbedParams::default() };
    let scores = score_scene(&scene, "fridge", &walk, &embed).unwrap();

    let mut ranked: Vec<(&String, &f64)> = scores.iter().collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(a.1).unwrap());
    println!("top 8 of {} objects:", ranked.len());
    for (id, score) in ranked.iter().take(8) {
        println!("  {score:.3}  {id}");
    }

    for alpha in [0.9, 0.7, 0.45] {
        let sel = select_objects(&scores, "fridge", alpha);
        println!("alpha {alpha}: {} objects selected", sel.selected.len());
    }
}
