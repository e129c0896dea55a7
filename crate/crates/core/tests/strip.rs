use lattice_ans::lattice::{Boundary, EmpiricalDescription, Grid, LatticeModel, Pattern, Region};
use lattice_ans::rng::{random_bits, SplitMix64};
use lattice_ans::spectral::kmodel::kmodel_capacity;
use lattice_ans::strip::*;
use lattice_ans::HARD_SQUARE_ENTROPY as H;
use proptest::prelude::*;

fn hs_strip(n: usize, boundary: Boundary) -> StripModel {
    StripModel::build(StripBase::HardSquare, n, boundary).unwrap()
}

fn codec(n: usize, boundary: Boundary) -> LatticeCodec {
    LatticeCodec::new(hs_strip(n, boundary), DEFAULT_PRECISION, 0).unwrap()
}

/// Largest eigenvalue of a small symmetric 0/1 matrix by dense Jacobi-free
/// power iteration on `M + I`, independent of the spectral module.
fn dense_lambda(cols: &[u32], adj: impl Fn(u32, u32) -> bool) -> f64 {
    let n = cols.len();
    let mut v = vec![1.0f64; n];
    let mut lam = 0.0;
    for _ in 0..20_000 {
        let w: Vec<f64> = (0..n)
            .map(|a| v[a] + (0..n).filter(|&b| adj(cols[a], cols[b])).map(|b| v[b]).sum::<f64>())
            .collect();
        let norm = w.iter().cloned().fold(0.0, f64::max);
        lam = norm - 1.0;
        v = w.iter().map(|x| x / norm).collect();
    }
    lam
}

#[test]
fn narrow_strips_match_closed_forms() {
    let one = hs_strip(1, Boundary::Zero);
    assert!((one.capacity() - kmodel_capacity(1)).abs() < 1e-12);
    let two = hs_strip(2, Boundary::Zero);
    assert_eq!(two.columns().len(), 3);
    // Largest root of (1 − x)((1 − x)² − 2).
    let lam = 1.0 + 2f64.sqrt();
    assert!((two.eig().lambda - lam).abs() < 1e-12);
    assert!((two.capacity() - lam.log2() / 2.0).abs() < 1e-12);
    assert!((two.capacity() - 0.6358).abs() < 1e-4);
}

#[test]
fn strip_eigenvalues_match_dense_iteration() {
    for n in 3..=7 {
        for b in [Boundary::Zero, Boundary::Cyclic] {
            let m = hs_strip(n, b);
            let dense = dense_lambda(m.columns(), |u, v| u & v == 0);
            assert!((m.eig().lambda - dense).abs() < 1e-9, "n {n} {b}");
        }
    }
}

#[test]
fn column_alphabets_match_lattice_scan() {
    let hs = LatticeModel::hard_square();
    for n in 1..=8 {
        for b in [Boundary::Zero, Boundary::Cyclic] {
            let m = hs_strip(n, b);
            let expected: Vec<u32> = (0..1u32 << n)
                .filter(|&v| {
                    let g = Grid::from_cells(2, n, 1, 2, (0..n).map(|j| (v >> j & 1) as u8).collect()).unwrap();
                    g.scan_axes(&hs, b, Boundary::Zero).is_ok()
                })
                .collect();
            assert_eq!(m.columns(), expected.as_slice(), "n {n} {b}");
        }
    }
}

#[test]
fn capacity_sandwich() {
    let mut prev_gap = f64::INFINITY;
    for n in 3..=12 {
        let cyc = hs_strip(n, Boundary::Cyclic).capacity();
        let zero = hs_strip(n, Boundary::Zero).capacity();
        assert!(H <= zero, "n {n}");
        if n % 2 == 1 {
            assert!(cyc <= H, "n {n}");
        } else {
            // Even cylinders sit slightly above the plane's entropy.
            assert!(cyc > H && cyc - H < 0.004, "n {n}");
            assert!(zero - cyc <= prev_gap);
            prev_gap = zero - cyc;
        }
    }
    assert!((hs_strip(12, Boundary::Cyclic).capacity() - H).abs() < 1e-3);
}

#[test]
fn conditionals_chain_to_transitions() {
    for n in 1..=8 {
        for b in [Boundary::Zero, Boundary::Cyclic] {
            let m = hs_strip(n, b);
            let t = ConditionalTables::build(&m).unwrap();
            let cols = m.columns();
            for (a, &u) in cols.iter().enumerate() {
                for (c, &v) in cols.iter().enumerate() {
                    let s = m.chain().transition_prob(a, c);
                    assert!((t.chain_prob(a, v) - s).abs() < 1e-12, "n {n} {b} {u:b}->{v:b}");
                }
            }
        }
    }
    // All nine pairs of the width-2 zero strip, against S = M ψ_v / (λ ψ_u).
    let m = hs_strip(2, Boundary::Zero);
    let t = ConditionalTables::build(&m).unwrap();
    let (lam, psi) = (m.eig().lambda, &m.eig().right);
    for a in 0..3 {
        for b in 0..3 {
            let allowed = (m.columns()[a] & m.columns()[b] == 0) as u8 as f64;
            let s = allowed * psi[b] / (lam * psi[a]);
            assert!((t.chain_prob(a, m.columns()[b]) - s).abs() < 1e-12);
        }
    }
}

#[test]
fn single_row_first_node_is_golden() {
    let m = hs_strip(1, Boundary::Zero);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let first = m.first_column_distribution();
    assert!((first[1] - 1.0 / (phi * phi)).abs() < 1e-12);
    assert!((first[1] - 0.382).abs() < 1e-3);
}

#[test]
fn first_column_frequencies() {
    let c = codec(2, Boundary::Zero);
    let p = c.model().first_column_distribution();
    let trials = 100_000;
    let mut freq = [0usize; 3];
    let mut rng = SplitMix64::new(4);
    for _ in 0..trials {
        let bits = random_bits(&mut rng, DEFAULT_PRECISION as usize);
        let enc = c.encode(&bits, Some(1)).unwrap();
        let v = (enc.grid.get(0, 0) | enc.grid.get(1, 0) << 1) as u32;
        freq[c.model().column_index(v).unwrap()] += 1;
    }
    for (f, p) in freq.iter().zip(&p) {
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((*f as f64 - trials as f64 * p).abs() < 3.0 * sigma, "{f} vs {p}");
    }
}

#[test]
fn width_eight_roundtrip_and_scan() {
    let hs = LatticeModel::hard_square();
    for b in [Boundary::Cyclic, Boundary::Zero] {
        let c = codec(8, b);
        let bits = random_bits(&mut SplitMix64::new(8), 10_000);
        let enc = c.encode(&bits, Some(4096)).unwrap();
        assert_eq!((enc.grid.rows(), enc.grid.cols()), (8, 4096));
        assert!(enc.grid.scan_axes(&hs, b, Boundary::Zero).is_ok());
        assert_eq!(c.decode(&enc).unwrap(), bits);
        let text = enc.to_text();
        assert_eq!(c.decode(&EncodedLattice::from_text(&text).unwrap()).unwrap(), bits);
    }
}

#[test]
fn tampered_lattices_are_rejected() {
    let c = codec(6, Boundary::Cyclic);
    let bits = random_bits(&mut SplitMix64::new(2), 500);
    let enc = c.encode(&bits, None).unwrap();
    let mut bad = enc.clone();
    let (r, col) = (0..6).flat_map(|r| (0..bad.grid.cols()).map(move |c| (r, c))).find(|&(r, c)| bad.grid.get(r, c) == 1).unwrap();
    bad.grid.set((r + 1) % 6, col, 1);
    assert!(matches!(c.decode(&bad), Err(StripError::InvalidLattice(_))));
    let mut bad = enc.clone();
    bad.header.state = 3;
    assert!(c.decode(&bad).is_err());
}

#[test]
fn long_run_rate_near_capacity() {
    let c = codec(8, Boundary::Cyclic);
    let r = evaluate_rate(&c, 4, 200_000, 1).unwrap();
    assert!(r.mean >= c.model().capacity() - 0.005);
    assert!(r.mean <= c.model().capacity() + 1e-4);
}

#[test]
fn rate_gap_shrinks_with_width() {
    let gaps: Vec<f64> = [2, 4, 6, 8]
        .iter()
        .map(|&n| evaluate_rate(&codec(n, Boundary::Cyclic), 2, 100_000, 7).unwrap().gap().abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn unconstrained_half_is_plain_binary() {
    let m = StripModel::build(StripBase::Unconstrained, 4, Boundary::Cyclic).unwrap();
    let c = LatticeCodec::new(m, 16, 0).unwrap();
    let bits = random_bits(&mut SplitMix64::new(3), 400);
    let enc = c.encode(&bits, None).unwrap();
    // One bit per node; each node is the complement of the bit that last
    // entered the state.
    assert_eq!(enc.nodes(), 400 - 16);
    for k in 0..enc.nodes() {
        let (col, row) = (k / 4, k % 4);
        assert_eq!(enc.grid.get(row, col), 1 - bits[15 + k]);
    }
    assert_eq!(c.decode(&enc).unwrap(), bits);
    assert_eq!(enc.bits_per_node(), (400.0 - 17.0) / 384.0);
}

#[test]
fn bulk_marginals_match_stationary_law() {
    for b in [Boundary::Cyclic, Boundary::Zero] {
        let c = codec(6, b);
        let target = c.model().row_marginals();
        let lattices: Vec<Grid> = (0..24)
            .map(|t| c.encode(&random_bits(&mut SplitMix64::derive(5, t), 6_000), None).unwrap().grid)
            .collect();
        for (j, &p) in target.iter().enumerate() {
            let est: Vec<f64> = lattices
                .iter()
                .map(|g| {
                    let d = EmpiricalDescription::within(vec![g.clone()], Region::rect(1, 1), j..j + 1, 50..g.cols());
                    d.occurrences(&Pattern::single((0, 0), 1)).unwrap() as f64 / d.observations() as f64
                })
                .collect();
            let mean = est.iter().sum::<f64>() / est.len() as f64;
            let sd = (est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (est.len() - 1) as f64).sqrt();
            let se = sd / (est.len() as f64).sqrt();
            assert!((mean - p).abs() < 3.0 * se, "{b} row {j}: {mean} vs {p} (se {se})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn roundtrip_identity(n in 1usize..=6, cyclic in any::<bool>(), seed in any::<u64>(), len in 0usize..300, key in prop_oneof![Just(0u64), any::<u64>()], precision in 8u32..=20) {
        let boundary = if cyclic { Boundary::Cyclic } else { Boundary::Zero };
        if cyclic && n == 1 {
            return Ok(());
        }
        let c = LatticeCodec::new(hs_strip(n, boundary), precision, key).unwrap();
        let bits = random_bits(&mut SplitMix64::new(seed), len);
        let enc = c.encode(&bits, None).unwrap();
        prop_assert!(enc.grid.scan_axes(&LatticeModel::hard_square(), boundary, Boundary::Zero).is_ok());
        prop_assert_eq!(c.decode(&enc).unwrap(), bits);
    }
}
