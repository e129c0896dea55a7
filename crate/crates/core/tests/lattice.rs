use lattice_ans::lattice::*;
use proptest::prelude::*;

fn hs() -> LatticeModel {
    LatticeModel::hard_square()
}

/// Independent count: valid rows of width `w` as bitmasks, adjacency by
/// disjointness, summed over `h`-row paths.
fn transfer_count(h: usize, w: usize) -> u128 {
    let rows: Vec<u32> = (0..1u32 << w).filter(|r| r & (r >> 1) == 0).collect();
    let mut v = vec![1u128; rows.len()];
    for _ in 1..h {
        v = rows
            .iter()
            .map(|&a| rows.iter().zip(&v).filter(|(&b, _)| a & b == 0).map(|(_, &c)| c).sum())
            .collect();
    }
    v.iter().sum()
}

fn brute_force(region: &Region, model: &LatticeModel) -> usize {
    let cells: Vec<Coord> = region.iter().collect();
    (0..1u64 << cells.len())
        .filter(|bits| {
            let p: Pattern = cells.iter().enumerate().map(|(i, &c)| (c, (bits >> i & 1) as u8)).collect();
            model.is_valid(&p)
        })
        .count()
}

#[test]
fn hard_square_counts_match_transfer_matrix() {
    assert_eq!(count(&Region::rect(2, 2), &hs(), &Pattern::new()).unwrap(), 7);
    assert_eq!(brute_force(&Region::rect(2, 2), &hs()), 7);
    assert_eq!(brute_force(&Region::rect(4, 4), &hs()) as u128, transfer_count(4, 4));
    for (h, w) in [(4, 4), (3, 7), (8, 8), (10, 10), (12, 9)] {
        assert_eq!(count(&Region::rect(h, w), &hs(), &Pattern::new()).unwrap(), transfer_count(h, w), "{h}x{w}");
    }
    assert_eq!(enumerate_valuations(&Region::rect(4, 4), &hs(), &Pattern::new()).unwrap().len() as u128, transfer_count(4, 4));
}

#[test]
fn entropy_estimates() {
    assert_eq!(entropy_estimate(1, &hs()).unwrap(), 1.0);
    let h4 = entropy_estimate(4, &hs()).unwrap();
    assert!((h4 - (transfer_count(4, 4) as f64).log2() / 16.0).abs() < 1e-15);
    // Free-boundary squares overestimate and decrease toward the capacity.
    let est: Vec<f64> = (2..=10).map(|k| entropy_estimate(k, &hs()).unwrap()).collect();
    assert!(est.windows(2).all(|w| w[1] < w[0]));
    assert!(est.iter().all(|&h| h > 0.5878911617753406));
    assert_eq!(entropy_estimate(6, &LatticeModel::unconstrained(2, 2)).unwrap(), 1.0);
}

#[test]
fn counting_description_center() {
    let a = Region::square(3);
    let d = CountingDescription::new(&hs(), &a, &Pattern::new()).unwrap();
    let with_center = count(&a, &hs(), &Pattern::single((0, 0), 1)).unwrap();
    assert_eq!(d.prob(&Pattern::single((0, 0), 1)).unwrap(), with_center as f64 / 63.0);
}

#[test]
fn ploc_holds_for_exact_description() {
    let a = Region::square(5);
    let d = CountingDescription::new(&hs(), &a, &Pattern::new()).unwrap();
    let sites: Vec<PlocSite> = a.interior(&hs()).iter().map(|x| PlocSite::neighborhood(&hs(), x)).collect();
    assert!(check_ploc(&d, &hs(), &sites).unwrap() < 1e-12);
}

#[test]
fn ploc_fails_for_biased_description() {
    // One sample of a checkerboard: a free center given all-zero neighbors
    // is always 1 on one parity.
    let mut g = Grid::for_model(&hs(), 8, 8);
    for r in 0..8 {
        for c in 0..8 {
            g.set(r, c, ((r + c) % 2 == 0) as u8);
        }
    }
    let d = EmpiricalDescription::new(vec![g], Region::square(3));
    let v = check_ploc(&d, &hs(), &[PlocSite::neighborhood(&hs(), (0, 0))]).unwrap();
    assert!(v > 0.0);
}

#[test]
fn bounds_shrink_over_nested_squares() {
    let f = Pattern::single((0, 0), 1);
    let regions: Vec<Region> = [3, 5, 7].iter().map(|&s| Region::square(s)).collect();
    let b = description_bounds(&hs(), &regions, &f).unwrap();
    for w in b.windows(2) {
        assert!(w[0].high >= w[1].high && w[1].high >= w[1].low && w[1].low >= w[0].low);
        assert!(w[1].gap() <= w[0].gap());
    }
    // Boundary zero around a 3x3: center sees a free 3x3 with 1 forcing its cross.
    assert_eq!(b[0].high, 1.0 / 2.0);
}

#[test]
fn bounds_without_neutral_shortcut_agree() {
    // The shortcut sweeps only boundary cells touching the interior; a sweep
    // over the whole boundary must find the same extremes.
    let f = Pattern::single((0, 0), 1);
    let r = [Region::square(3), Region::square(5)];
    let b = description_bounds(&hs(), &r, &f).unwrap();
    let full: Vec<(f64, f64)> = r
        .iter()
        .map(|a| {
            let vs = enumerate_valuations(&a.boundary(&hs()), &hs(), &Pattern::new()).unwrap();
            vs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                let d = CountingDescription::new(&hs(), a, v).unwrap();
                let p = d.prob(&f).unwrap();
                (lo.min(p), hi.max(p))
            })
        })
        .collect();
    for (x, y) in b.iter().zip(&full) {
        assert_eq!((x.low, x.high), *y);
    }
}

#[test]
fn sequential_reconstruction_2x3() {
    let a = Region::rect(2, 3);
    let d = CountingDescription::new(&hs(), &a, &Pattern::new()).unwrap();
    let order: Vec<Coord> = a.iter().collect();
    let seq = SequentialDescription::new(&d, order.clone(), 2);
    let mut total = 0.0;
    for bits in 0..1u32 << 6 {
        let values: Vec<u8> = (0..6).map(|i| (bits >> i & 1) as u8).collect();
        let u: Pattern = order.iter().copied().zip(values.iter().copied()).collect();
        let direct = d.prob(&u).unwrap();
        let chained = seq.joint(&values).unwrap();
        assert!((direct - chained).abs() < 1e-12);
        total += chained;
    }
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn sequential_uniform_for_free_model() {
    let m = LatticeModel::unconstrained(2, 3);
    let a = Region::rect(2, 2);
    let d = CountingDescription::new(&m, &a, &Pattern::new()).unwrap();
    let seq = SequentialDescription::new(&d, a.iter().collect(), 3);
    for prefix in [&[][..], &[2], &[0, 1, 2]] {
        assert!(seq.conditionals(prefix).unwrap().iter().all(|&q| (q - 1.0 / 3.0).abs() < 1e-15));
    }
}

#[test]
fn thermal_chain_on_small_regions() {
    for (r, c, boundary) in [(2, 2, Boundary::Free), (3, 3, Boundary::Free), (3, 4, Boundary::Cyclic), (4, 4, Boundary::Free)] {
        let chain = ThermalChain::build(&hs(), r, c, boundary).unwrap();
        if boundary == Boundary::Free {
            assert_eq!(chain.states.len() as u128, count(&Region::rect(r, c), &hs(), &Pattern::new()).unwrap());
        }
        assert!(chain.stochastic_error() < 1e-12);
        assert!(chain.is_irreducible());
    }
}

#[test]
fn thermalization_is_uniform_on_2x2() {
    let states = enumerate_valuations(&Region::rect(2, 2), &hs(), &Pattern::new()).unwrap();
    let n = 1_000_000;
    let cfg = ThermalConfig::default();
    let mut t = Thermalizer::new(&hs(), 2, 2, cfg.boundary, 5).unwrap();
    t.sweeps(cfg.warmup_sweeps);
    let mut freq = vec![0usize; 16];
    for _ in 0..n {
        t.sweeps(t.cells());
        let g = t.grid().cells();
        freq[g.iter().enumerate().map(|(i, &s)| (s as usize) << i).sum::<usize>()] += 1;
    }
    let p = 1.0 / states.len() as f64;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    let seen: Vec<usize> = freq.iter().copied().filter(|&f| f > 0).collect();
    assert_eq!(seen.len(), 7);
    for f in seen {
        assert!((f as f64 - n as f64 * p).abs() < 3.0 * sigma, "{f}");
    }
}

#[test]
fn thermalized_center_matches_counting() {
    let n = 100_000;
    let cfg = ThermalConfig { spacing: 5 * 25, ..ThermalConfig::default() };
    let samples = thermalize(&hs(), 5, 5, cfg, n, 9).unwrap();
    let f = Pattern::single((2, 2), 1);
    let d = EmpiricalDescription::new(samples, Region::rect(5, 5));
    let exact = CountingDescription::new(&hs(), &Region::rect(5, 5), &Pattern::new()).unwrap().prob(&f).unwrap();
    let p = d.prob(&f).unwrap();
    let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
    assert!((p - exact).abs() < 3.0 * sigma, "empirical {p} exact {exact}");
}

#[test]
fn thermalized_bulk_density_within_bounds() {
    let samples = thermalize(&hs(), 20, 20, ThermalConfig::default(), 400, 9).unwrap();
    assert!(samples.iter().all(|g| g.scan(&hs(), Boundary::Free).is_ok()));
    let d = EmpiricalDescription::within(samples, Region::square(5), 4..16, 4..16);
    let p = d.prob(&Pattern::single((0, 0), 1)).unwrap();
    let b = description_bounds(&hs(), &[Region::square(5)], &Pattern::single((0, 0), 1)).unwrap()[0];
    assert!(b.low < p && p < b.high, "{p} outside [{}, {}]", b.low, b.high);
    assert_eq!(d.prob(&Pattern::new().with((0, 0), 1).with((0, 1), 1)).unwrap(), 0.0);
}

fn square_symmetries(c: Coord) -> [Coord; 8] {
    let (r, q) = c;
    [(r, q), (q, -r), (-r, -q), (-q, r), (r, -q), (-r, q), (q, r), (-q, -r)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counting_description_is_normalized(cells in proptest::collection::vec((-1i32..=1, -2i32..=2, 0u8..2), 0..5), ext in (-1i32..=1, -2i32..=2)) {
        let a = Region::rect_at((-1, -2), 3, 5);
        let d = CountingDescription::new(&hs(), &a, &Pattern::new()).unwrap();
        let f: Pattern = cells.iter().map(|&(r, c, s)| ((r, c), s)).collect();
        if f.get(ext).is_none() {
            let parent = d.prob(&f).unwrap();
            let sum: f64 = (0..2).map(|s| d.prob(&f.clone().with(ext, s)).unwrap()).sum();
            prop_assert!((parent - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_description_is_normalized(seed in any::<u64>(), cells in proptest::collection::vec((0i32..3, 0i32..3, 0u8..2), 0..4), ext in (0i32..3, 0i32..3)) {
        let samples = thermalize(&hs(), 6, 6, ThermalConfig::default(), 5, seed).unwrap();
        let d = EmpiricalDescription::new(samples, Region::rect(3, 3));
        let f: Pattern = cells.iter().map(|&(r, c, s)| ((r, c), s)).collect();
        if f.get(ext).is_none() {
            let parent = d.occurrences(&f).unwrap();
            let sum: usize = (0..2).map(|s| d.occurrences(&f.clone().with(ext, s)).unwrap()).sum();
            prop_assert_eq!(parent, sum);
        }
    }

    #[test]
    fn counting_description_has_square_symmetry(cells in proptest::collection::vec((-2i32..=2, -2i32..=2, 0u8..2), 1..5)) {
        let a = Region::square(5);
        let d = CountingDescription::new(&hs(), &a, &Pattern::new()).unwrap();
        let f: Pattern = cells.iter().map(|&(r, c, s)| ((r, c), s)).collect();
        let p = d.prob(&f).unwrap();
        for k in 0..8 {
            let g = f.map_coords(|c| square_symmetries(c)[k]);
            prop_assert!((d.prob(&g).unwrap() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn counts_match_brute_force_on_random_regions(cells in proptest::collection::btree_set((0i32..4, 0i32..4), 0..12), clamp in proptest::collection::vec((0i32..4, 0i32..4, 0u8..2), 0..3)) {
        let region: Region = cells.iter().copied().collect();
        let clamp: Pattern = clamp.into_iter().filter(|&(r, c, _)| region.contains((r, c))).map(|(r, c, s)| ((r, c), s)).collect();
        let direct = count(&region, &hs(), &clamp).unwrap();
        let list: Vec<Coord> = region.iter().collect();
        let brute = (0..1u64 << list.len()).filter(|bits| {
            let p: Pattern = list.iter().enumerate().map(|(i, &c)| (c, (bits >> i & 1) as u8)).collect();
            hs().is_valid(&p) && clamp.iter().all(|(c, s)| p.get(c) == Some(s))
        }).count();
        prop_assert_eq!(direct, brute as u128);
    }

    #[test]
    fn one_dimensional_counts_match_brute_force(k in 1u32..4, n in 1usize..12) {
        let m = LatticeModel::k_model(k);
        let brute = (0..1u32 << n).filter(|&w| (1..=k).all(|d| w & (w >> d) == 0)).count();
        prop_assert_eq!(count(&Region::rect(1, n), &m, &Pattern::new()).unwrap(), brute as u128);
    }
}
