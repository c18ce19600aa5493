//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line with its wall time and budget.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpl_core::asymptotic::{
    disjoint_rank_bounds, lattice_construction, lattice_obstruction, strassen_rank_bounds, BoundOptions, BoundValue,
};
use tpl_core::catalog::{
    decomposition_sum, epr, ghz, mamu, strassen_decomposition, w_border_certificate, w_state, ww_decomposition, Catalog,
    STRASSEN_ID, WW_ID, W_BORDER_ID,
};
use tpl_core::hypergraph::{build_structure, fold_to_fan, is_homomorphism, make_family, EdgeAssignment, Family, Hypergraph};
use tpl_core::linalg::{compound, determinant, inverse};
use tpl_core::obstructions::{
    flattening_ratio, hyperdeterminant_222, koszul_flatten, quantum_functional_point, random_simple, KoszulSpec,
    ThetaWeights,
};
use tpl_core::preorder::{
    classify_222, decide_222, interpolate, rank_222, subrank_222, verify_degeneration, verify_restriction,
    DegenerationCertificate, Mode, OrbitClass222,
};
use tpl_core::{EpsPoly, Matrix, QComplex, Scalar, Tensor};

// Pinned tolerances.
const QF_GHZ_TOL: f64 = 1e-9;
const QF_W_TOL: f64 = 1e-6;
const QF_MULT_TOL: f64 = 1e-9;
const LOG2_7_TOL: f64 = 1e-4;
const ROOT_TOL: f64 = 1e-12;

fn q(n: i64, d: i64) -> QComplex {
    QComplex::from_frac(n, d)
}

fn ones(dims: &[usize], idx: &[&[usize]]) -> Tensor<QComplex> {
    Tensor::from_entries(dims.to_vec(), idx.iter().map(|i| (i.to_vec(), q(1, 1)))).unwrap()
}

fn unpack(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for (slot, &d) in idx.iter_mut().zip(dims).rev() {
        *slot = flat % d;
        flat /= d;
    }
    idx
}

fn random_tensor(rng: &mut ChaCha8Rng, dims: &[usize], density: f64, den: i64) -> Tensor<QComplex> {
    let total: usize = dims.iter().product();
    let entries: Vec<(Vec<usize>, QComplex)> = (0..total)
        .filter_map(|f| rng.random_bool(density).then(|| (unpack(f, dims), q(rng.random_range(-den..=den), den))))
        .collect();
    Tensor::from_entries(dims.to_vec(), entries).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, den: i64) -> Matrix<QComplex> {
    Matrix::from_fn(rows, cols, |_, _| q(rng.random_range(-den..=den), den))
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix<QComplex> {
    loop {
        let m = random_matrix(rng, n, n, 3);
        if !determinant(&m).unwrap().is_zero() {
            return m;
        }
    }
}

/// Textbook rational elimination on real matrices.
fn rank_oracle(m: &Matrix<QComplex>) -> usize {
    let mut a: Vec<Vec<QComplex>> = m.to_rows();
    assert!(a.iter().flatten().all(QComplex::is_real));
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        let pivot_inv = a[rank][c].inv().unwrap();
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = a[r][c].mul(&pivot_inv);
                for k in c..cols {
                    a[r][k] = a[r][k].sub(&a[rank][k].mul(&f));
                }
            }
        }
        rank += 1;
    }
    rank
}

fn random_theta(rng: &mut ChaCha8Rng, k: usize) -> ThetaWeights {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let mut theta: Vec<f64> = raw.iter().map(|x| x / s).collect();
    theta[0] = 1.0 - theta[1..].iter().sum::<f64>();
    ThetaWeights::new(theta).unwrap()
}

/// `MaMu(d) = Σ e_{(i,j)} ⊗ e_{(j,k)} ⊗ e_{(k,i)}`, written out directly.
fn mamu_oracle(d: usize) -> Tensor<QComplex> {
    let mut idx = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                idx.push(vec![i * d + j, j * d + k, k * d + i]);
            }
        }
    }
    Tensor::from_entries(vec![d * d; 3], idx.into_iter().map(|i| (i, q(1, 1)))).unwrap()
}

/// `t^{⊠n}` entry by entry.
fn kron_power_oracle(t: &Tensor<QComplex>, n: usize) -> Tensor<QComplex> {
    let k = t.order();
    let dims: Vec<usize> = t.dims().iter().map(|d| d.pow(n as u32)).collect();
    let total: usize = dims.iter().product();
    let entries = (0..total).filter_map(|f| {
        let idx = unpack(f, &dims);
        let digits: Vec<Vec<usize>> = (0..k).map(|j| unpack(idx[j], &vec![t.dims()[j]; n])).collect();
        let v = (0..n).fold(q(1, 1), |acc, copy| {
            let sub: Vec<usize> = (0..k).map(|j| digits[j][copy]).collect();
            acc.mul(&t.get(&sub))
        });
        (!v.is_zero()).then_some((idx, v))
    });
    Tensor::from_entries(dims.clone(), entries.collect::<Vec<_>>()).unwrap()
}

fn random_degeneration(rng: &mut ChaCha8Rng) -> (Tensor<QComplex>, Tensor<QComplex>, DegenerationCertificate) {
    loop {
        let k = rng.random_range(2..=4);
        let dims: Vec<usize> = (0..k).map(|_| rng.random_range(1..=4)).collect();
        let targets: Vec<usize> = (0..k).map(|_| rng.random_range(1..=4)).collect();
        let volume: usize = dims.iter().product();
        let t = random_tensor(rng, &dims, (12.0 / volume as f64).min(0.7), 2);
        let mut budget = 6u32;
        let maps: Vec<Matrix<EpsPoly>> = (0..k)
            .map(|j| {
                let deg = rng.random_range(0..=budget.min(3));
                budget -= deg;
                Matrix::from_fn(targets[j], dims[j], |_, _| {
                    let terms: Vec<(u32, QComplex)> = (0..=deg)
                        .filter_map(|d| rng.random_bool(0.6).then(|| (d, QComplex::from_int(rng.random_range(-2..=2)))))
                        .collect();
                    EpsPoly::from_coeffs(terms)
                })
            })
            .collect();
        let coeffs = t.to_eps().apply(&maps).unwrap().coefficients();
        let Some((&d, lowest)) = coeffs.iter().next() else { continue };
        let e = coeffs.keys().next_back().unwrap() - d;
        return (t, lowest.clone(), DegenerationCertificate::new(maps, d, e));
    }
}

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn c1_orbits() -> Result<(), String> {
    let reps: [(&str, Tensor<QComplex>); 7] = [
        ("Zero", Tensor::zeros(vec![2, 2, 2]).unwrap()),
        ("Product", ones(&[2, 2, 2], &[&[0, 0, 0]])),
        ("EPR_12", ones(&[2, 2, 2], &[&[0, 0, 0], &[1, 1, 0]])),
        ("EPR_13", ones(&[2, 2, 2], &[&[0, 0, 0], &[1, 0, 1]])),
        ("EPR_23", ones(&[2, 2, 2], &[&[0, 0, 0], &[0, 1, 1]])),
        ("W", ones(&[2, 2, 2], &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]])),
        ("GHZ", ones(&[2, 2, 2], &[&[0, 0, 0], &[1, 1, 1]])),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, rep) in &reps {
        check(classify_222(rep).unwrap().name() == *name, format!("{name} misclassified"))?;
        for _ in 0..100 {
            let g: Vec<Matrix<QComplex>> = (0..3).map(|_| random_invertible(&mut rng, 2)).collect();
            let moved = rep.apply(&g).unwrap();
            check(classify_222(&moved).unwrap().name() == *name, format!("{name} not invariant"))?;
        }
    }
    let (g2, w) = (&reps[6].1, &reps[5].1);
    check(!decide_222(g2, w, Mode::Restriction).unwrap(), "GHZ2 restricts to W")?;
    check(decide_222(g2, w, Mode::Degeneration).unwrap(), "GHZ2 does not degenerate to W")?;
    check(!decide_222(w, g2, Mode::Degeneration).unwrap(), "W degenerates to GHZ2")?;
    check(rank_222(w).unwrap() == 3 && subrank_222(w).unwrap() == 1, "R(W), Q(W)")?;
    check(rank_222(g2).unwrap() == 2 && subrank_222(g2).unwrap() == 2, "R(GHZ2), Q(GHZ2)")?;
    check(OrbitClass222::ALL.len() == 7, "seven orbits")
}

/// Cayley's hyperdeterminant, term by term.
fn cayley(t: &Tensor<QComplex>) -> QComplex {
    let a = |i: usize, j: usize, k: usize| t.get(&[i, j, k]);
    let m = |xs: &[QComplex]| xs.iter().fold(q(1, 1), |acc, x| acc.mul(x));
    let sq = |x: QComplex| x.mul(&x);
    let terms = [
        (1, sq(m(&[a(0, 0, 0), a(1, 1, 1)]))),
        (1, sq(m(&[a(0, 0, 1), a(1, 1, 0)]))),
        (1, sq(m(&[a(0, 1, 0), a(1, 0, 1)]))),
        (1, sq(m(&[a(1, 0, 0), a(0, 1, 1)]))),
        (-2, m(&[a(0, 0, 0), a(0, 0, 1), a(1, 1, 0), a(1, 1, 1)])),
        (-2, m(&[a(0, 0, 0), a(0, 1, 0), a(1, 0, 1), a(1, 1, 1)])),
        (-2, m(&[a(0, 0, 0), a(0, 1, 1), a(1, 0, 0), a(1, 1, 1)])),
        (-2, m(&[a(0, 0, 1), a(0, 1, 0), a(1, 0, 1), a(1, 1, 0)])),
        (-2, m(&[a(0, 0, 1), a(0, 1, 1), a(1, 1, 0), a(1, 0, 0)])),
        (-2, m(&[a(0, 1, 0), a(0, 1, 1), a(1, 0, 1), a(1, 0, 0)])),
        (4, m(&[a(0, 0, 0), a(0, 1, 1), a(1, 0, 1), a(1, 1, 0)])),
        (4, m(&[a(0, 0, 1), a(0, 1, 0), a(1, 0, 0), a(1, 1, 1)])),
    ];
    terms.into_iter().fold(QComplex::zero(), |acc, (c, x)| acc.add(&x.mul(&QComplex::from_int(c))))
}

fn c2_hyperdeterminant() -> Result<(), String> {
    check(hyperdeterminant_222(&w_state()).unwrap().is_zero(), "Det(W) != 0")?;
    check(hyperdeterminant_222(&ghz(2, 3)).unwrap() == q(1, 1), "Det(GHZ2) != 1")?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..100 {
        let t = random_tensor(&mut rng, &[2, 2, 2], 0.8, 3);
        let det_t = hyperdeterminant_222(&t).unwrap();
        check(det_t == cayley(&t), format!("instance {i}: disagrees with Cayley's formula"))?;
        let maps: Vec<Matrix<QComplex>> = (0..3).map(|_| random_matrix(&mut rng, 2, 2, 2)).collect();
        let s = maps.iter().fold(q(1, 1), |acc, m| acc.mul(&determinant(m).unwrap()));
        let lhs = hyperdeterminant_222(&t.apply(&maps).unwrap()).unwrap();
        check(lhs == s.mul(&s).mul(&det_t), format!("instance {i}: covariance fails"))?;
    }
    Ok(())
}

fn c3_interpolation() -> Result<(), String> {
    let (g2, w) = (ghz(2, 3), w_state());
    let cert = w_border_certificate();
    let chk = verify_degeneration(&g2, &w, &cert).unwrap();
    check(chk.ok && chk.d == 1 && chk.e == 2, "border certificate degrees")?;
    let r = interpolate(&g2, &w, &cert).unwrap();
    check(verify_restriction(&g2.direct_power(3).unwrap(), &w, &r).unwrap(), "⊕³GHZ2 ≥ W rejected")?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let (t, target, cert) = random_degeneration(&mut rng);
        let chk = verify_degeneration(&t, &target, &cert).unwrap();
        check(chk.ok && chk.e <= 6, format!("case {i}: generated degeneration invalid"))?;
        let r = interpolate(&t, &target, &cert).unwrap();
        let src = t.direct_power(chk.e as usize + 1).unwrap();
        check(verify_restriction(&src, &target, &r).unwrap(), format!("case {i}: interpolation rejected"))?;
    }
    Ok(())
}

fn diag_perm(rng: &mut ChaCha8Rng, n: usize) -> Matrix<QComplex> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut g = Matrix::zeros(n, n);
    for (i, &p) in perm.iter().enumerate() {
        let x = rng.random_range(1..=4) * if rng.random_bool(0.5) { -1 } else { 1 };
        g.set(i, p, q(x, rng.random_range(1..=3)));
    }
    g
}

fn c4_koszul() -> Result<(), String> {
    let spec = KoszulSpec::new(3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = loop {
        let s = random_simple(&[3, 3, 3], &mut rng);
        if !s.is_zero() {
            break s;
        }
    };
    check(rank_oracle(&koszul_flatten(&s, &spec).unwrap()) == 2, "simple rank != 2")?;
    check(rank_oracle(&koszul_flatten(&ghz(3, 3), &spec).unwrap()) == 6, "GHZ3 rank != 6")?;
    let mut hits = 0;
    for i in 0..20 {
        let t = random_tensor(&mut rng, &[3, 3, 3], 1.0, 7);
        let r = flattening_ratio(&t, &spec, 16, i).unwrap();
        if r.rank == rank_oracle(&koszul_flatten(&t, &spec).unwrap()) && r.ratio.to_string() == "9/2" {
            hits += 1;
        }
    }
    check(hits >= 19, format!("ratio 9/2 in only {hits}/20 trials"))?;
    for i in 0..50 {
        let t = random_tensor(&mut rng, &[3, 3, 3], 0.6, 3);
        let g = diag_perm(&mut rng, 3);
        let eye = Matrix::identity(3);
        let moved = t.apply(&[eye.clone(), eye.clone(), g.clone()]).unwrap();
        let g_inv = inverse(&g).unwrap().unwrap();
        let left = eye.kron(&compound(&g, 2).unwrap());
        let right = eye.kron(&compound(&g_inv, 1).unwrap());
        let want = left.matmul(&koszul_flatten(&t, &spec).unwrap()).unwrap().matmul(&right).unwrap();
        check(koszul_flatten(&moved, &spec).unwrap() == want, format!("covariance fails for g #{i}"))?;
    }
    Ok(())
}

fn c5_quantum_functional() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for r in 2..=5 {
        for _ in 0..10 {
            let theta = random_theta(&mut rng, 3);
            let v = quantum_functional_point(&ghz(r, 3).to_float(), &theta).unwrap();
            check((v - r as f64).abs() <= QF_GHZ_TOL, format!("F(GHZ_{r}) = {v}"))?;
        }
    }
    let h = -(1.0f64 / 3.0) * (1.0f64 / 3.0).log2() - (2.0f64 / 3.0) * (2.0f64 / 3.0).log2();
    let fw = quantum_functional_point(&w_state().to_float(), &ThetaWeights::uniform(3)).unwrap();
    check((fw - h.exp2()).abs() <= QF_W_TOL, format!("F(W) = {fw}"))?;
    let mut pairs = 0;
    while pairs < 20 {
        let s = random_tensor(&mut rng, &[2, 3, 2], 0.7, 3);
        let t = random_tensor(&mut rng, &[3, 2, 2], 0.7, 3);
        if s.is_zero() || t.is_zero() {
            continue;
        }
        let theta = random_theta(&mut rng, 3);
        let f = |x: &Tensor<QComplex>| quantum_functional_point(&x.to_float(), &theta).unwrap();
        let (fs, ft, fst) = (f(&s), f(&t), f(&s.kron(&t).unwrap()));
        check((fst - fs * ft).abs() <= QF_MULT_TOL * fst.max(1.0), format!("pair {pairs}: {fst} vs {}", fs * ft))?;
        pairs += 1;
    }
    Ok(())
}

fn c6_hypergraph() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=3 {
        for _ in 0..4 {
            let dims: Vec<usize> = (0..3).map(|_| rng.random_range(1..=3)).collect();
            let t = random_tensor(&mut rng, &dims, 0.4, 2);
            let h = make_family(Family::Strassen, n, 3).unwrap();
            let built = build_structure(&h, &EdgeAssignment::broadcast(&t, n)).unwrap();
            check(built == kron_power_oracle(&t, n), format!("Strassen_{n} structure with dims {dims:?}"))?;
        }
    }
    let triangle = Hypergraph::new(3, vec![vec![0, 2], vec![1, 0], vec![2, 1]]).unwrap();
    for d in [2, 3] {
        let built = build_structure(&triangle, &EdgeAssignment::broadcast(&epr(d), 3)).unwrap();
        check(built == mamu_oracle(d), format!("triangle of EPR_{d} is not MaMu({d})"))?;
    }
    let f = fold_to_fan(Family::Triangular, 6).unwrap();
    check(f.covering == 6, format!("covering {}", f.covering))?;
    check(is_homomorphism(&f.source, &f.fan, &f.map), "fan map is not a homomorphism")
}

fn c7_disjoint_w() -> Result<(), String> {
    let r = disjoint_rank_bounds(&w_state(), &Catalog::builtin(), &BoundOptions::default()).unwrap();
    let (lo, hi) = (r.lower.unwrap(), r.upper.unwrap());
    check(lo.value == BoundValue::int(2) && hi.value == BoundValue::int(2), "bounds are not 2 and 2")?;
    check(lo.witness.starts_with("gauge point"), format!("lower witness `{}`", lo.witness))?;
    check(hi.witness.contains(W_BORDER_ID), format!("upper witness `{}`", hi.witness))
}

fn c8_catalog() -> Result<(), String> {
    let w = w_state();
    check(strassen_decomposition().len() == 7, "Strassen terms")?;
    check(decomposition_sum(&[4, 4, 4], &strassen_decomposition()).unwrap() == mamu_oracle(2), "MaMu(2) sum")?;
    check(ww_decomposition().len() == 7, "W⊠W terms")?;
    check(decomposition_sum(&[4, 4, 4], &ww_decomposition()).unwrap() == kron_power_oracle(&w, 2), "W⊠W sum")?;
    let cat = Catalog::builtin();
    let m = strassen_rank_bounds(&mamu(2), 1, &cat).unwrap();
    let up = m.upper.clone().unwrap();
    check(up.value == BoundValue::Root { radicand: 7, n: 1 } && up.witness.contains(STRASSEN_ID), "MaMu(2) ≤ 7")?;
    let omega = m.derived.first().ok_or("no omega report")?.upper.clone().unwrap();
    check((omega.value.approx() - 2.8074).abs() <= LOG2_7_TOL, format!("ω ≤ {}", omega.value.approx()))?;
    let r = strassen_rank_bounds(&w, 2, &cat).unwrap().upper.unwrap();
    check(r.value == BoundValue::Root { radicand: 7, n: 2 } && r.witness.contains(WW_ID), "R(W) ≤ √7")?;
    check((r.value.approx() - 7f64.sqrt()).abs() <= ROOT_TOL, "√7 value")
}

fn c9_lattice() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dense = random_tensor(&mut rng, &[3, 3, 3], 1.0, 5);
    let o = lattice_obstruction(&ghz(3, 3), &dense, 1, &KoszulSpec::new(3, 1).unwrap()).unwrap();
    check(o.obstructed, format!("ranks {} vs {}", o.rank_source, o.rank_target))?;
    let c = lattice_construction(&ghz(2, 3), &w_state(), &w_border_certificate(), Family::Triangular, 2).unwrap();
    check(c.summands == 5, format!("{} summands", c.summands))?;
    let ok = verify_restriction(&c.source.direct_power(c.summands).unwrap(), &c.target, &c.certificate).unwrap();
    check(ok, "lattice certificate rejected")
}

fn c10_cli_golden() -> Result<(), String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let p = |n: &str| dir.join(n).to_str().unwrap().to_string();
    let run = |args: &[&str], stdin: Option<Vec<u8>>| -> Vec<u8> {
        use std::io::Write;
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tpl"));
        cmd.args(args).env_remove("TPL_CATALOG").stdout(std::process::Stdio::piped());
        if stdin.is_some() {
            cmd.stdin(std::process::Stdio::piped());
        }
        let mut child = cmd.spawn().unwrap();
        if let Some(bytes) = stdin {
            child.stdin.take().unwrap().write_all(&bytes).unwrap();
        }
        let out = child.wait_with_output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let built = run(&["build", "--name", "W"], None);
    let classified = run(&["classify"], Some(built));
    check(classified == std::fs::read(p("classify_w.txt")).unwrap(), "classify output differs")?;
    check(classified == b"W\n", "classify does not print W")?;
    let verify = run(&["cert-verify", "--src", &p("ghz2.json"), "--dst", &p("w.json"), "--cert", &p("w-border.json")], None);
    check(verify == std::fs::read(p("cert_verify.json")).unwrap(), "cert-verify output differs")?;
    check(verify == b"{\"ok\":true,\"d\":1,\"e\":2}\n", "cert-verify is not ok/1/2")?;
    let bounds = run(&["bounds", "disjoint", "--tensor", &p("w.json"), "--seed", "0"], None);
    check(bounds == std::fs::read(p("bounds_disjoint_w.json")).unwrap(), "bounds output differs")?;
    check(bounds == run(&["bounds", "disjoint", "--tensor", &p("w.json"), "--seed", "0"], None), "not reproducible")
}

type Criterion = (u32, &'static str, Option<u64>, fn() -> Result<(), String>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "2x2x2 orbits, decisions, ranks", Some(5), c1_orbits),
        (2, "hyperdeterminant values and covariance", Some(2), c2_hyperdeterminant),
        (3, "interpolation of degenerations", Some(30), c3_interpolation),
        (4, "Koszul flattening ranks, ratio 9/2, covariance", Some(30), c4_koszul),
        (5, "quantum functional values", Some(10), c5_quantum_functional),
        (6, "structure tensors and fan folding", Some(10), c6_hypergraph),
        (7, "disjoint asymptotic rank of W", Some(2), c7_disjoint_w),
        (8, "seven-term certificates and Strassen bounds", None, c8_catalog),
        (9, "lattice obstruction and construction", Some(60), c9_lattice),
        (10, "CLI golden outputs", Some(5), c10_cli_golden),
    ];
    let mut failed = 0;
    for (id, name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let over = budget.is_some_and(|b| took > Duration::from_secs(b));
        let budget_text = budget.map_or("no budget".to_string(), |b| format!("budget {b} s"));
        match (&outcome, over) {
            (Ok(()), false) => println!("PASS  {id:>2}  {name}  ({:.2} s, {budget_text})", took.as_secs_f64()),
            _ => {
                failed += 1;
                let why = outcome.err().unwrap_or_else(|| "over time budget".into());
                println!("FAIL  {id:>2}  {name}  ({:.2} s, {budget_text}): {why}", took.as_secs_f64());
            }
        }
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
