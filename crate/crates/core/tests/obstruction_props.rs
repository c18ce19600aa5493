mod common;

use common::{q, random_invertible, random_matrix, random_tensor, rank_oracle};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpl_core::catalog::{ghz, w_state};
use tpl_core::linalg::{compound, determinant, inverse};
use tpl_core::obstructions::{
    flattening_ratio, gauge_points, hyperdeterminant_222, koszul_flatten, koszul_flatten_power,
    quantum_functional_point, random_simple, KoszulSpec, ThetaWeights,
};
use tpl_core::{Matrix, QComplex, Scalar, Tensor};

fn random_theta(rng: &mut impl Rng, k: usize) -> ThetaWeights {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let mut theta: Vec<f64> = raw.iter().map(|x| x / s).collect();
    let rest: f64 = theta[1..].iter().sum();
    theta[0] = 1.0 - rest;
    ThetaWeights::new(theta).unwrap()
}

/// Cayley's hyperdeterminant written out term by term.
fn cayley(t: &Tensor<QComplex>) -> QComplex {
    let a = |i: usize, j: usize, k: usize| t.get(&[i, j, k]);
    let sq = |x: QComplex| x.mul(&x);
    let m = |xs: &[QComplex]| xs.iter().fold(QComplex::one(), |acc, x| acc.mul(x));
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

#[test]
fn hyperdeterminant_values_and_covariance() {
    assert!(hyperdeterminant_222(&w_state()).unwrap().is_zero());
    assert_eq!(hyperdeterminant_222(&ghz(2, 3)).unwrap(), QComplex::one());
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let t = random_tensor(&mut rng, &[2, 2, 2], 0.8, 3);
        let det_t = hyperdeterminant_222(&t).unwrap();
        assert_eq!(det_t, cayley(&t));
        let maps: Vec<Matrix<QComplex>> = (0..3).map(|_| random_matrix(&mut rng, 2, 2, 2)).collect();
        let scale = maps.iter().fold(QComplex::one(), |acc, m| acc.mul(&determinant(m).unwrap()));
        let lhs = hyperdeterminant_222(&t.apply(&maps).unwrap()).unwrap();
        assert_eq!(lhs, scale.mul(&scale).mul(&det_t));
    }
}

#[test]
fn koszul_ranks_of_simple_and_ghz() {
    let spec = KoszulSpec::new(3, 1).unwrap();
    assert_eq!(spec.wedge_dims(), (3, 3));
    assert_eq!(spec.simple_rank(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let s = random_simple(&[3, 3, 3], &mut rng);
        if !s.is_zero() {
            assert_eq!(rank_oracle(&koszul_flatten(&s, &spec).unwrap()), 2);
        }
    }
    assert_eq!(rank_oracle(&koszul_flatten(&ghz(3, 3), &spec).unwrap()), 6);
    let r = flattening_ratio(&ghz(3, 3), &spec, 8, 0).unwrap();
    assert_eq!(r.ratio, q(3, 1).re);
}

#[test]
fn random_dense_tensors_reach_ratio_nine_halves() {
    let spec = KoszulSpec::new(3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut hits = 0;
    for i in 0..20 {
        let t = random_tensor(&mut rng, &[3, 3, 3], 1.0, 7);
        let r = flattening_ratio(&t, &spec, 16, i).unwrap();
        assert_eq!(r.rank, rank_oracle(&koszul_flatten(&t, &spec).unwrap()));
        if r.rank == 9 && r.simple_rank == 2 {
            hits += 1;
        }
    }
    assert!(hits >= 19, "only {hits}/20 reached 9/2");
}

fn diag_perm(rng: &mut impl Rng, n: usize) -> Matrix<QComplex> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut g = Matrix::zeros(n, n);
    for (i, &p) in perm.iter().enumerate() {
        let mut x = rng.random_range(1..=4);
        if rng.random_bool(0.5) {
            x = -x;
        }
        g.set(i, p, q(x, rng.random_range(1..=3)));
    }
    g
}

#[test]
fn koszul_flattening_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for round in 0..50 {
        let (d3, p) = (3 + round % 2, 1 + round % 2);
        let spec = KoszulSpec::new(d3, p).unwrap();
        let t = random_tensor(&mut rng, &[2, 3, d3], 0.6, 3);
        let a = random_invertible(&mut rng, 2);
        let b = random_invertible(&mut rng, 3);
        let g = if round % 5 == 0 { random_invertible(&mut rng, d3) } else { diag_perm(&mut rng, d3) };
        let g_inv = inverse(&g).unwrap().unwrap();
        let moved = t.apply(&[a.clone(), b.clone(), g.clone()]).unwrap();
        let left = a.kron(&compound(&g, p + 1).unwrap());
        let right = b.transpose().kron(&compound(&g_inv, p).unwrap());
        let want = left.matmul(&koszul_flatten(&t, &spec).unwrap()).unwrap().matmul(&right).unwrap();
        assert_eq!(koszul_flatten(&moved, &spec).unwrap(), want, "round {round}");
    }
}

#[test]
fn koszul_rank_is_multiplicative_on_kron_powers() {
    let spec = KoszulSpec::new(2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let s = random_tensor(&mut rng, &[2, 2, 2], 0.7, 2);
        let t = random_tensor(&mut rng, &[2, 2, 2], 0.7, 2);
        let rs = rank_oracle(&koszul_flatten(&s, &spec).unwrap());
        let rt = rank_oracle(&koszul_flatten(&t, &spec).unwrap());
        let prod = koszul_flatten_power(&s.kron(&t).unwrap(), &spec, 2).unwrap();
        assert_eq!(rank_oracle(&prod), rs * rt);
    }
    assert!(koszul_flatten_power(&ghz(3, 3), &spec, 2).is_err());
}

#[test]
fn quantum_functional_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for r in 2..=5 {
        for _ in 0..10 {
            let theta = random_theta(&mut rng, 3);
            let v = quantum_functional_point(&ghz(r, 3).to_float(), &theta).unwrap();
            assert!((v - r as f64).abs() <= 1e-9, "GHZ_{r}: {v}");
        }
    }
    let h = -(1.0f64 / 3.0) * (1.0f64 / 3.0).log2() - (2.0f64 / 3.0) * (2.0f64 / 3.0).log2();
    let w = quantum_functional_point(&w_state().to_float(), &ThetaWeights::uniform(3)).unwrap();
    assert!((w - h.exp2()).abs() <= 1e-6);
    assert!((w - 1.8898816).abs() <= 1e-6);
}

#[test]
fn quantum_functional_is_multiplicative_and_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let s = random_tensor(&mut rng, &[2, 3, 2], 0.7, 3);
        let t = random_tensor(&mut rng, &[3, 2, 2], 0.7, 3);
        if s.is_zero() || t.is_zero() {
            continue;
        }
        let theta = random_theta(&mut rng, 3);
        let fs = quantum_functional_point(&s.to_float(), &theta).unwrap();
        let ft = quantum_functional_point(&t.to_float(), &theta).unwrap();
        let fst = quantum_functional_point(&s.kron(&t).unwrap().to_float(), &theta).unwrap();
        assert!((fst - fs * ft).abs() <= 1e-9 * fst.max(1.0));
        // Moving factor j to position perm⁻¹(j) moves its weight along.
        let perm = [2, 0, 1];
        let moved = s.permute(&perm).unwrap();
        let th: Vec<f64> = perm.iter().map(|&j| theta.as_slice()[j]).collect();
        let fm = quantum_functional_point(&moved.to_float(), &ThetaWeights::new(th).unwrap()).unwrap();
        assert!((fm - fs).abs() <= 1e-9 * fs.max(1.0));
    }
    assert!(ThetaWeights::new(vec![0.5, 0.6]).is_err());
}

#[test]
fn gauge_points_never_increase_under_restriction() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let t = random_tensor(&mut rng, &[3, 3, 3], 0.5, 2);
        let maps: Vec<Matrix<QComplex>> = (0..3)
            .map(|_| {
                let rows = rng.random_range(1..=3);
                random_matrix(&mut rng, rows, 3, 1)
            })
            .collect();
        let before = gauge_points(&t).unwrap();
        let after = gauge_points(&t.apply(&maps).unwrap()).unwrap();
        assert!(after.iter().zip(&before).all(|(a, b)| a <= b));
    }
}
