//! Polytope-level properties: the random separable cloud stays inside and
//! fills the second-moment polytope, and the approximate extremal
//! constructions stay within their stated deviation.

use spinsq_core::polytope::*;
use spinsq_core::rng::SplitMix64;

mod hull {
    //! Minimal incremental 3D convex hull, used as an independent volume
    //! oracle. Returns outward half-space descriptions of the hull.

    pub type P3 = [f64; 3];

    fn sub(a: P3, b: P3) -> P3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    fn cross(a: P3, b: P3) -> P3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    pub fn dot(a: P3, b: P3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    /// Half-spaces `(normal, offset)` with `normal . p + offset <= 0` inside.
    pub fn planes(pts: &[P3]) -> Vec<(P3, f64)> {
        let mut simplex = vec![0usize];
        for (i, p) in pts.iter().enumerate() {
            match simplex.len() {
                1 => {
                    if dot(sub(*p, pts[simplex[0]]), sub(*p, pts[simplex[0]])) > 1e-12 {
                        simplex.push(i);
                    }
                }
                2 => {
                    let c = cross(
                        sub(*p, pts[simplex[0]]),
                        sub(pts[simplex[1]], pts[simplex[0]]),
                    );
                    if dot(c, c) > 1e-12 {
                        simplex.push(i);
                    }
                }
                3 => {
                    let n = cross(
                        sub(pts[simplex[1]], pts[simplex[0]]),
                        sub(pts[simplex[2]], pts[simplex[0]]),
                    );
                    if dot(n, sub(*p, pts[simplex[0]])).abs() > 1e-9 {
                        simplex.push(i);
                    }
                }
                _ => break,
            }
        }
        assert_eq!(simplex.len(), 4, "degenerate point cloud");
        let centroid = {
            let mut c = [0.0; 3];
            for &i in &simplex {
                for k in 0..3 {
                    c[k] += pts[i][k] / 4.0;
                }
            }
            c
        };
        let orient = |f: &[usize; 3]| -> (P3, f64) {
            let n = cross(sub(pts[f[1]], pts[f[0]]), sub(pts[f[2]], pts[f[0]]));
            let off = -dot(n, pts[f[0]]);
            if dot(n, centroid) + off > 0.0 {
                ([-n[0], -n[1], -n[2]], -off)
            } else {
                (n, off)
            }
        };
        let mut faces: Vec<[usize; 3]> = vec![
            [simplex[0], simplex[1], simplex[2]],
            [simplex[0], simplex[1], simplex[3]],
            [simplex[0], simplex[2], simplex[3]],
            [simplex[1], simplex[2], simplex[3]],
        ];
        for idx in 0..pts.len() {
            let p = pts[idx];
            let mut visible = Vec::new();
            for (fi, f) in faces.iter().enumerate() {
                let (n, off) = orient(f);
                if dot(n, p) + off > 1e-9 * (1.0 + dot(n, n).sqrt()) {
                    visible.push(fi);
                }
            }
            if visible.is_empty() {
                continue;
            }
            let mut edge_count = std::collections::HashMap::new();
            for &fi in &visible {
                let f = faces[fi];
                for e in [[f[0], f[1]], [f[1], f[2]], [f[0], f[2]]] {
                    let key = (e[0].min(e[1]), e[0].max(e[1]));
                    *edge_count.entry(key).or_insert(0) += 1;
                }
            }
            let horizon: Vec<(usize, usize)> = edge_count
                .iter()
                .filter(|(_, &c)| c == 1)
                .map(|(&k, _)| k)
                .collect();
            visible.sort_unstable_by(|a, b| b.cmp(a));
            for fi in visible {
                faces.swap_remove(fi);
            }
            for (a, b) in horizon {
                faces.push([a, b, idx]);
            }
        }
        faces.iter().map(orient).collect()
    }
}

#[test]
fn ten_thousand_samples_pass_membership() {
    let n = 10;
    let samples = sample_separable(n, 10_000, 7, 4, false).unwrap();
    for (i, s) in samples.iter().enumerate() {
        let geom = vertices_k_space(n, s.j).unwrap();
        assert!(
            geom.membership(&s.k2).inside,
            "sample {i} escaped the polytope"
        );
    }
}

#[test]
fn sample_cloud_fills_most_of_the_polytope() {
    // Zero-mean-spin samples against the matching polytope: the convex hull
    // of 10^4 points has to cover at least 80% of the polytope volume
    // (regression guard on the sampling law, Monte-Carlo volume with 10^6
    // trial points).
    let n = 10;
    let geom = vertices_k_space(n, [0.0; 3]).unwrap();
    let samples = sample_separable(n, 10_000, 7, 4, true).unwrap();
    let pts: Vec<hull::P3> = samples.iter().map(|s| s.k2).collect();
    let planes = hull::planes(&pts);

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for (_, v) in &geom.vertices {
        for k in 0..3 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let mut rng = SplitMix64::new(123);
    let trials = 1_000_000usize;
    let mut in_poly = 0usize;
    let mut in_hull = 0usize;
    for _ in 0..trials {
        let p = [
            rng.uniform(lo[0], hi[0]),
            rng.uniform(lo[1], hi[1]),
            rng.uniform(lo[2], hi[2]),
        ];
        if geom.membership(&p).inside {
            in_poly += 1;
            if planes
                .iter()
                .all(|(nv, off)| hull::dot(*nv, p) + off <= 0.0)
            {
                in_hull += 1;
            }
        }
    }
    assert!(
        in_poly > 50_000,
        "polytope occupies too little of the box: {in_poly}"
    );
    let ratio = in_hull as f64 / in_poly as f64;
    assert!(
        ratio >= 0.80,
        "hull covers only {:.1}% of the polytope",
        100.0 * ratio
    );
}

#[test]
fn hull_oracle_recovers_known_volume_ratio() {
    // Sanity-check the oracle itself: the hull of the polytope's own vertices
    // must cover the polytope exactly.
    let geom = vertices_k_space(10, [0.0; 3]).unwrap();
    let pts: Vec<hull::P3> = geom.vertices.iter().map(|(_, p)| *p).collect();
    let planes = hull::planes(&pts);
    let mut rng = SplitMix64::new(5);
    let mut inside_both = 0usize;
    let mut inside_poly = 0usize;
    for _ in 0..100_000 {
        let p = [
            rng.uniform(0.0, 25.0),
            rng.uniform(0.0, 25.0),
            rng.uniform(0.0, 25.0),
        ];
        let a = geom.membership(&p).inside;
        let b = planes
            .iter()
            .all(|(nv, off)| hull::dot(*nv, p) + off <= 1e-9);
        if a {
            inside_poly += 1;
            if b {
                inside_both += 1;
            }
        } else {
            assert!(
                !b || planes
                    .iter()
                    .any(|(nv, off)| hull::dot(*nv, p) + off > -1e-6)
            );
        }
    }
    assert_eq!(inside_both, inside_poly);
}

#[test]
fn b_vertex_deviation_bounded_by_quarter() {
    // The approximate construction misses the vertex only along its own axis
    // and by at most 1/4.
    let mut rng = SplitMix64::new(31);
    use spinsq_core::collective::{moments, Axis};
    for n in [3usize, 5, 7] {
        for trial in 0..5 {
            let dir = rng.unit_vector();
            let scale = rng.next_f64() * 0.4 * n as f64 / 2.0;
            let j = [dir[0] * scale, dir[1] * scale, dir[2] * scale];
            let geom = vertices_k_space(n, j).unwrap();
            for axis in Axis::ALL {
                let (rho, exact) = match construct_vertex_state_b(n, j, axis) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let m = moments(&rho).unwrap();
                let target = geom.vertex(VertexLabel::B(axis));
                let k2 = m.k2();
                for c in 0..3 {
                    let dev = (k2[c] - target[c]).abs();
                    if c == axis.index() && !exact {
                        assert!(
                            dev <= 0.25 + 1e-9,
                            "axis deviation {dev} (n={n}, trial {trial})"
                        );
                    } else {
                        assert!(dev < 1e-9, "off-axis deviation {dev}");
                    }
                }
            }
        }
    }
}

#[test]
fn rejects_mean_spin_outside_reach() {
    // p outside [0, 1] cannot be realised by the two-component construction.
    assert!(
        construct_vertex_state_a(4, [0.0, 0.0, 3.0], spinsq_core::collective::Axis::X).is_err()
    );
}
