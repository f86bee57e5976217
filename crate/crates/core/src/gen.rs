//! Seeded random windows for fuzzing.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::window::{validate_window, Edge, Ext, Vertex, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub max_vertices: usize,
    pub max_cylinders: usize,
    /// Mark one vertex as QH (with infinitely many external cylinders).
    pub qh: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_vertices: 10,
            max_cylinders: 4,
            qh: false,
        }
    }
}

const ATTEMPTS: usize = 64;

/// A valid window drawn deterministically from `seed`: a random tree, a
/// partition of its edges into connected cylinders, and external cylinder
/// counts chosen to satisfy the valence rules.
pub fn gen_random(seed: u64, params: &GenParams) -> Result<Window> {
    if params.max_vertices < 3 {
        return Err(Error::BadParams(format!(
            "need at least 3 vertices, got {}",
            params.max_vertices
        )));
    }
    if params.max_cylinders == 0 {
        return Err(Error::BadParams("need at least one cylinder".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let w = draw(&mut rng, params);
        if validate_window(&w).is_empty() {
            return Ok(w);
        }
    }
    Err(Error::BadParams(format!(
        "no valid window after {ATTEMPTS} attempts for seed {seed}"
    )))
}

fn draw(rng: &mut ChaCha8Rng, params: &GenParams) -> Window {
    let n = rng.gen_range(3..=params.max_vertices);
    let ends: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    let m = ends.len();
    let k = rng.gen_range(1..=params.max_cylinders.min(m));

    let mut cyl: Vec<Option<usize>> = vec![None; m];
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    for (c, &e) in order.iter().take(k).enumerate() {
        cyl[e] = Some(c);
    }
    let touches = |a: (usize, usize), b: (usize, usize)| a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
    while cyl.iter().any(Option::is_none) {
        let mut options = Vec::new();
        for e in (0..m).filter(|&e| cyl[e].is_none()) {
            for f in 0..m {
                if let Some(c) = cyl[f] {
                    if touches(ends[e], ends[f]) {
                        options.push((e, c));
                    }
                }
            }
        }
        let &(e, c) = options.choose(rng).expect("the tree is connected");
        cyl[e] = Some(c);
    }

    let mut degree = vec![0usize; n];
    let mut cyls_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(a, b)) in ends.iter().enumerate() {
        let c = cyl[e].expect("assigned");
        for x in [a, b] {
            degree[x] += 1;
            if !cyls_at[x].contains(&c) {
                cyls_at[x].push(c);
            }
        }
    }
    let width = (n - 1).to_string().len();
    let name = |i: usize| format!("x{i:0width$}");
    let qh = params.qh.then(|| rng.gen_range(0..n));
    let vertices = (0..n)
        .map(|v| {
            let floor = [
                usize::from(degree[v] == 1),
                usize::from(cyls_at[v].len() >= 2),
                3usize.saturating_sub(degree[v]),
            ]
            .into_iter()
            .max()
            .unwrap_or(0) as u32;
            let ext = match rng.gen_range(0..4) {
                _ if qh == Some(v) => Ext::Inf,
                0 | 1 => Ext::Finite(floor),
                2 => Ext::Finite(floor + 1),
                _ => Ext::Inf,
            };
            Vertex {
                id: name(v),
                ext,
                qh: qh == Some(v),
            }
        })
        .collect();
    let edges = ends
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| Edge {
            id: format!("e{e:0width$}"),
            ends: [name(a), name(b)],
            cyl: format!("C{}", cyl[e].expect("assigned")),
        })
        .collect();
    let complete: BTreeMap<String, bool> = (0..k).map(|c| (format!("C{c}"), true)).collect();
    Window::new(vertices, edges, complete)
}
