use polyschwarz::assembly::*;
use polyschwarz::elements::{build_element, gauss_legendre, Family, ReferenceElement};
use polyschwarz::geometry::CartesianMesh;
use polyschwarz::linalg::{market, SparseCholesky};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn setup(f: Family, n: usize) -> (CartesianMesh<f64>, ReferenceElement<f64>, DofMap<f64>) {
    let mesh = CartesianMesh::new(n).unwrap();
    let elem = build_element(f).unwrap();
    let dm = DofMap::new(mesh, f).unwrap();
    (mesh, elem, dm)
}

fn operator(f: Family, n: usize) -> polyschwarz::CsrMatrix64 {
    let (mesh, elem, dm) = setup(f, n);
    assemble_operator(&mesh, &elem, &dm, DEFAULT_ETA).unwrap()
}

/// Cellwise Gauss quadrature of `sum_a w_a (D^(a, m-a) u)^2` using pointwise
/// evaluation of the discrete function.
fn broken_seminorm_sq(dm: &DofMap<f64>, elem: &ReferenceElement<f64>, u: &[f64], q: usize) -> f64 {
    let m = elem.order();
    let n = dm.mesh().cells_per_axis();
    let h = 1.0 / n as f64;
    let (x, w) = gauss_legendre::<f64>(q);
    let weights: Vec<f64> = match m {
        2 => vec![1.0, 2.0, 1.0],
        _ => vec![1.0, 3.0, 3.0, 1.0],
    };
    let mut total = 0.0;
    for cy in 0..n {
        for cx in 0..n {
            for (i, xi) in x.iter().enumerate() {
                for (j, yj) in x.iter().enumerate() {
                    let p = [
                        h * (cx as f64 + (xi + 1.0) / 2.0),
                        h * (cy as f64 + (yj + 1.0) / 2.0),
                    ];
                    let wq = w[i] * w[j] * h * h / 4.0;
                    for a in 0..=m {
                        let d = evaluate_in_cell(dm, elem, u, (cx, cy), p, (a, m - a));
                        total += wq * weights[a] * d * d;
                    }
                }
            }
        }
    }
    total
}

fn quad_form(a: &polyschwarz::CsrMatrix64, u: &[f64]) -> f64 {
    a.matvec(u).iter().zip(u).map(|(x, y)| x * y).sum()
}

#[test]
fn bfs_smallest_grid_is_spd() {
    let a = operator(Family::Bfs, 2);
    assert_eq!(a.nrows(), 4);
    let ev = a.to_dense().symmetric_eigenvalues();
    assert!(ev[0] > 0.0);
    SparseCholesky::new(&a).unwrap();
}

#[test]
fn adini_energy_matches_cellwise_quadrature() {
    let (mesh, elem, dm) = setup(Family::Adini, 4);
    let a = assemble_stiffness(&mesh, &elem, &dm).unwrap();
    let g = |k: usize, t: f64| -> f64 {
        // t^2 (1-t)^2 = t^2 - 2t^3 + t^4
        match k {
            0 => t * t - 2.0 * t.powi(3) + t.powi(4),
            1 => 2.0 * t - 6.0 * t * t + 4.0 * t.powi(3),
            _ => unreachable!(),
        }
    };
    let u = interpolate(&dm, |a, b, x| g(a, x[0]) * g(b, x[1]));
    let e = quad_form(&a, &u);
    let oracle = broken_seminorm_sq(&dm, &elem, &u, 8);
    assert!(e > 0.0);
    assert!((e - oracle).abs() <= 1e-10 * oracle, "{e} vs {oracle}");
}

#[test]
fn bfs_energy_identity_random_vectors() {
    let (mesh, elem, dm) = setup(Family::Bfs, 4);
    let a = assemble_stiffness(&mesh, &elem, &dm).unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..5 {
        let u: Vec<f64> = (0..dm.free_count())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let e = quad_form(&a, &u);
        let oracle = broken_seminorm_sq(&dm, &elem, &u, 7);
        assert!((e - oracle).abs() <= 1e-10 * oracle);
    }
}

#[test]
fn jinwu_energy_identity() {
    let (mesh, elem, dm) = setup(Family::JinWu, 3);
    let a = assemble_stiffness(&mesh, &elem, &dm).unwrap();
    let mut rng = StdRng::seed_from_u64(12);
    let u: Vec<f64> = (0..dm.free_count())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let e = quad_form(&a, &u);
    let oracle = broken_seminorm_sq(&dm, &elem, &u, 9);
    assert!((e - oracle).abs() <= 1e-10 * oracle);
}

#[test]
fn symmetry_all_families() {
    let mut rng = StdRng::seed_from_u64(3);
    for f in Family::ALL {
        for n in [4, 16, 32] {
            let a = operator(f, n);
            let scale = a.max_abs();
            assert!(a.symmetry_defect() <= 1e-12 * scale, "{f} n={n}");
            for _ in 0..100 {
                let i = rng.gen_range(0..a.nrows());
                let j = rng.gen_range(0..a.nrows());
                assert!((a.get(i, j) - a.get(j, i)).abs() <= 1e-12 * scale);
            }
        }
    }
}

#[test]
fn factorization_succeeds_all_families() {
    let mut rng = StdRng::seed_from_u64(5);
    for f in Family::ALL {
        for n in [2, 4, 8, 16, 32] {
            let a = operator(f, n);
            let chol = SparseCholesky::new(&a).unwrap_or_else(|e| panic!("{f} n={n}: {e}"));
            let b: Vec<f64> = (0..a.nrows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = chol.solve(&b);
            let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(rn <= 1e-10 * bn, "{f} n={n}: {}", rn / bn);
        }
    }
}

#[test]
fn c0ip_is_spd_at_default_penalty() {
    let a = operator(Family::C0ip, 8);
    let ev = a.to_dense().symmetric_eigenvalues();
    assert!(ev[0] > 0.0, "smallest eigenvalue {}", ev[0]);
}

#[test]
fn c0ip_edge_terms_of_global_bubble() {
    // u = x(1-x)y(1-y) is a single Q2 polynomial: interior jumps vanish and
    // only the boundary edges contribute.
    for n in [2, 4, 8] {
        let (mesh, elem, dm) = setup(Family::C0ip, n);
        let u = interpolate(&dm, |a, b, x| {
            let g = |k: usize, t: f64| if k == 0 { t * (1.0 - t) } else { 1.0 - 2.0 * t };
            assert!(a <= 1 && b <= 1);
            g(a, x[0]) * g(b, x[1])
        });
        let h = 1.0 / n as f64;
        let eta = 5.0;
        let pen = assemble_c0ip_edge_terms(&mesh, &elem, &dm, eta, EdgeTerms::Penalty).unwrap();
        let want = eta / h * 4.0 / 30.0;
        assert!((quad_form(&pen, &u) - want).abs() <= 1e-12 * want);
        let cons =
            assemble_c0ip_edge_terms(&mesh, &elem, &dm, eta, EdgeTerms::Consistency).unwrap();
        let want = -16.0 / 30.0;
        assert!((quad_form(&cons, &u) - want).abs() <= 1e-12);

        // interior normal-derivative jumps vanish pointwise
        for i in 1..n {
            for c in 0..n {
                let t = (c as f64 + 0.37) * h;
                let x = i as f64 * h;
                let l = evaluate_in_cell(&dm, &elem, &u, (i - 1, c), [x, t], (1, 0));
                let r = evaluate_in_cell(&dm, &elem, &u, (i, c), [x, t], (1, 0));
                assert!((l - r).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn penalty_is_linear_in_eta() {
    let (mesh, elem, dm) = setup(Family::C0ip, 6);
    let a1 = assemble_operator(&mesh, &elem, &dm, 5.0).unwrap();
    let a2 = assemble_operator(&mesh, &elem, &dm, 10.0).unwrap();
    let p = assemble_c0ip_edge_terms(&mesh, &elem, &dm, 5.0, EdgeTerms::Penalty).unwrap();
    let diff = a2.add_scaled(-1.0, &a1).unwrap().to_dense();
    let pd = p.to_dense();
    let scale = a1.max_abs();
    for i in 0..diff.rows() {
        for j in 0..diff.cols() {
            assert!((diff[(i, j)] - pd[(i, j)]).abs() <= 1e-12 * scale);
        }
    }
    let all = assemble_c0ip_edges(&mesh, &elem, &dm, 5.0).unwrap();
    let cons = assemble_c0ip_edge_terms(&mesh, &elem, &dm, 5.0, EdgeTerms::Consistency).unwrap();
    let split = cons.add_scaled(1.0, &p).unwrap().to_dense();
    let alld = all.to_dense();
    for i in 0..split.rows() {
        for j in 0..split.cols() {
            assert!((split[(i, j)] - alld[(i, j)]).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn load_vectors() {
    for f in Family::ALL {
        let (mesh, elem, dm) = setup(f, 4);
        let b = assemble_load(&mesh, &elem, &dm, |_| 0.0).unwrap();
        assert_eq!(b.len(), dm.free_count());
        assert!(b.iter().all(|&v| v == 0.0));
    }
    // f = 1: sum of entries is the integral of the sum of free basis functions
    let (mesh, elem, dm) = setup(Family::C0ip, 4);
    let b = assemble_load(&mesh, &elem, &dm, |_| 1.0).unwrap();
    let ones = vec![1.0; dm.free_count()];
    let (x, w) = gauss_legendre::<f64>(3);
    let h = 0.25;
    let mut oracle = 0.0;
    for cy in 0..4 {
        for cx in 0..4 {
            for (i, xi) in x.iter().enumerate() {
                for (j, yj) in x.iter().enumerate() {
                    let p = [
                        h * (cx as f64 + (xi + 1.0) / 2.0),
                        h * (cy as f64 + (yj + 1.0) / 2.0),
                    ];
                    oracle += w[i] * w[j] * h * h / 4.0
                        * evaluate_in_cell(&dm, &elem, &ones, (cx, cy), p, (0, 0));
                }
            }
        }
    }
    let total: f64 = b.iter().sum();
    assert!((total - oracle).abs() < 1e-14);
    assert!(total < 1.0 && total > 0.5);
}

/// Fourth-order five-point second difference.
fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

/// Fourth-order central first difference.
fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

#[test]
fn manufactured_derivatives_match_finite_differences() {
    let mut rng = StdRng::seed_from_u64(8);
    for ms in [Manufactured::Biharmonic, Manufactured::Triharmonic] {
        let m = ms.order();
        for _ in 0..20 {
            let p = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)];
            let hh = 1e-3;
            // first partials, then chained Laplacians up to order m
            for a in 0..=2 * m {
                for b in 0..=2 * m - a {
                    let fx = d1(|t| ms.derivative(a, b, [t, p[1]]), p[0], hh);
                    let want = ms.derivative::<f64>(a + 1, b, p);
                    let scale = ms.derivative::<f64>(a + 1, b, p).abs().max(1.0);
                    assert!(
                        (fx - want).abs() <= 1e-6 * scale.max(fx.abs()) + 1e-6,
                        "{a},{b}"
                    );
                }
            }
            for k in 0..m {
                let lap = d2(|t| ms.laplacian_power(k, [t, p[1]]), p[0], hh)
                    + d2(|t| ms.laplacian_power(k, [p[0], t]), p[1], hh);
                let want = ms.laplacian_power::<f64>(k + 1, p);
                let scale = ms.laplacian_power::<f64>(k + 1, [0.5, 0.5]).abs();
                assert!((lap - want).abs() <= 1e-6 * scale, "k={k}: {lap} vs {want}");
            }
            let f = ms.rhs::<f64>(p);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(f, sign * ms.laplacian_power::<f64>(m, p));
        }
    }
}

#[test]
fn manufactured_solutions_are_clamped() {
    let mut rng = StdRng::seed_from_u64(9);
    for ms in [Manufactured::Biharmonic, Manufactured::Triharmonic] {
        let m = ms.order();
        for _ in 0..20 {
            let t: f64 = rng.gen();
            for a in 0..m {
                for b in 0..m - a {
                    for p in [[0.0, t], [1.0, t], [t, 0.0], [t, 1.0]] {
                        assert!(ms.derivative(a, b, p).abs() < 1e-12);
                    }
                }
            }
        }
    }
    let u: f64 = Manufactured::Biharmonic.value([0.5, 0.5]);
    assert!((u - 1.0 / 16.0).abs() < 1e-15);
    assert_eq!(Manufactured::for_order(3), Some(Manufactured::Triharmonic));
    assert_eq!(Manufactured::for_order(4), None);
}

#[test]
fn bfs_solution_approaches_manufactured_nodal_values() {
    let ms = Manufactured::Biharmonic;
    let mut errs = Vec::new();
    for n in [8, 16, 32] {
        let (mesh, elem, dm) = setup(Family::Bfs, n);
        let a = assemble_operator(&mesh, &elem, &dm, DEFAULT_ETA).unwrap();
        let b = assemble_load(&mesh, &elem, &dm, |x| ms.rhs(x)).unwrap();
        let u = SparseCholesky::new(&a).unwrap().solve(&b);
        let err = dm
            .free_dofs()
            .iter()
            .zip(&u)
            .filter(|(d, _)| d.deriv == (0, 0))
            .map(|(d, v)| (v - ms.value(dm.anchor(d.lattice))).abs())
            .fold(0.0, f64::max);
        errs.push(err);
    }
    let h = 1.0 / 32.0;
    assert!(errs[2] <= h * h * ms.value([0.5, 0.5]), "{errs:?}");
    assert!(
        errs[1] / errs[2] > 3.0 && errs[0] / errs[1] > 3.0,
        "{errs:?}"
    );
}

#[test]
fn assembly_is_deterministic_across_thread_counts() {
    let (mesh, elem, dm) = setup(Family::JinWu, 12);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let a = assemble_operator(&mesh, &elem, &dm, DEFAULT_ETA).unwrap();
                let b =
                    assemble_load(&mesh, &elem, &dm, |x| Manufactured::Triharmonic.rhs(x)).unwrap();
                (a, b)
            })
    };
    let (a1, b1) = run(1);
    let (a4, b4) = run(4);
    assert_eq!(a1, a4);
    assert_eq!(
        b1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b4.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
}

#[test]
fn matrix_market_export_round_trip() {
    let a = operator(Family::Adini, 5);
    let dir = std::env::temp_dir().join(format!("polyschwarz-mm-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a.mtx");
    market::write_matrix(&path, &a).unwrap();
    let back: polyschwarz::CsrMatrix64 = market::read_matrix(&path).unwrap();
    assert_eq!(back.nrows(), a.nrows());
    let d = back.add_scaled(-1.0, &a).unwrap();
    assert!(d.max_abs() <= 1e-15 * a.max_abs());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn single_precision_assembly() {
    let mesh = CartesianMesh::<f32>::new(4).unwrap();
    let elem = build_element::<f32>(Family::Bfs).unwrap();
    let dm = DofMap::new(mesh, Family::Bfs).unwrap();
    let a = assemble_operator(&mesh, &elem, &dm, 5.0f32).unwrap();
    assert_eq!(a.nrows(), 36);
    SparseCholesky::new(&a).unwrap();
}
