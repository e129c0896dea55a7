use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use lattice_ans::ans::{apportion, forbidden_symbol_wrap, AbsCoder, AbsParams, AbsVariant, AnsTable, Codec, Container, Ratio, Spread};
use lattice_ans::experiments::report::fmt15;
use lattice_ans::experiments::{
    algorithm1_entropy, algorithm1_optimum, algorithm1_rate, algorithm2_simulate, fit_charging_profile, reproduce_tables_with,
    Algorithm1Codec, Algorithm2Config, ChargingProfile, Estimate, ReportOptions,
};
use lattice_ans::lattice::{
    check_ploc, description_bounds, thermalize, Boundary, CountingDescription, Description, EmpiricalDescription, Grid,
    LatticeModel, Pattern, PlocSite, Region, ThermalConfig,
};
use lattice_ans::spectral::kmodel::{kmodel_automaton, kmodel_benefit, kmodel_blocked, kmodel_optimum};
use lattice_ans::spectral::{format_report, path_prob, solve, WeightedGraph};
use lattice_ans::strip::{evaluate_rate, EncodedLattice, LatticeCodec, StripModel};

use crate::{data, usage, Algo1Args, Algo2Args, CapacityArgs, Cli, CliError, CoderArgs, Command, DescribeArgs, DescribeMode, Direction, Format, MerwArgs, ReportArgs, SampleArgs, StripAction, StripArgs};

type Result<T> = std::result::Result<T, CliError>;

const DEFAULT_ABS_PRECISION: u32 = 16;
const DEFAULT_ANS_PRECISION: u32 = 12;
const FIT_ORDERS: usize = 4;
const SAMPLE_MARK: &str = "# sample";

pub fn run(cli: &Cli) -> Result<()> {
    let fmt = cli.format;
    let seed = cli.seed;
    match &cli.command {
        Command::Capacity(a) => capacity(a, fmt),
        Command::Merw(a) => merw(a, fmt),
        Command::Abs(a) => abs(a),
        Command::Ans(a) => ans(a),
        Command::Sample(a) => sample(a, seed),
        Command::Describe(a) => describe(a, fmt),
        Command::Strip(a) => strip(a, fmt, seed),
        Command::Algo1(a) => algo1(a, fmt, seed),
        Command::Algo2(a) => algo2(a, fmt, seed),
        Command::Report(a) => report(a, fmt, seed),
    }
}

/// Ordered key-value output.
#[derive(Default)]
struct Fields(Vec<(String, String)>);

impl Fields {
    fn put(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn num(&mut self, key: &str, value: f64) {
        self.put(key, fmt15(value));
    }

    fn est(&mut self, key: &str, e: Estimate) {
        self.num(key, e.mean);
        self.num(&format!("{key}_stderr"), e.stderr);
    }

    fn emit(&self, fmt: Format) -> Result<()> {
        let mut out = String::new();
        if fmt == Format::Csv {
            out.push_str("key,value\n");
        }
        for (k, v) in &self.0 {
            match fmt {
                Format::Text => out.push_str(&format!("{k} = {v}\n")),
                Format::Csv => out.push_str(&format!("{k},{v}\n")),
            }
        }
        write_output(None, out.as_bytes())
    }
}

fn emit_table(fmt: Format, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::new();
    match fmt {
        Format::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for r in rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        Format::Text => {
            let widths: Vec<usize> =
                (0..header.len()).map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0)).collect();
            let line = |cells: Vec<&str>| cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ");
            out.push_str(&line(header.to_vec()));
            out.push('\n');
            for r in rows {
                out.push_str(&line(r.iter().map(String::as_str).collect()));
                out.push('\n');
            }
        }
    }
    write_output(None, out.as_bytes())
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        Some(p) => fs::read(p).map_err(|e| data(format!("{}: {e}", p.display()))),
        None => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).map_err(data)?;
            Ok(buf)
        }
    }
}

fn read_text(path: Option<&Path>) -> Result<String> {
    String::from_utf8(read_input(path)?).map_err(|_| data("input is not UTF-8 text"))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| data(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(data)
        }
    }
}

fn model(name: &str) -> Result<LatticeModel> {
    LatticeModel::preset(name).map_err(usage)
}

fn boundary(name: &str) -> Result<Boundary> {
    name.parse().map_err(usage)
}

fn list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',').map(|t| t.trim().parse().map_err(|_| usage(format!("bad {what} `{t}`")))).collect()
}

fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1)).collect()
}

fn bits_to_bytes(bits: &[u8]) -> Result<Vec<u8>> {
    if bits.len() % 8 != 0 {
        return Err(data(format!("{} decoded bits are not whole bytes", bits.len())));
    }
    Ok(bits.chunks(8).map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b)).collect())
}

fn capacity(a: &CapacityArgs, fmt: Format) -> Result<()> {
    let m = model(&a.model)?;
    let mut f = Fields::default();
    f.put("model", m.name());
    if let Some(k) = a.model.strip_prefix("k-model:") {
        let k: u32 = k.parse().map_err(usage)?;
        let (cap, q) = kmodel_optimum(k);
        let (auto, _) = solve(&kmodel_automaton(k)).map_err(data)?;
        let (blocked, _) = solve(&kmodel_blocked(k)).map_err(data)?;
        let benefit = kmodel_benefit(k);
        f.num("capacity", cap);
        f.num("argmax_q", q);
        f.num("lg_lambda_automaton", auto.entropy_bits());
        f.num("lg_lambda_blocked", blocked.entropy_bits());
        f.num("benefit_percent", benefit);
        f.put("summary", format!("capacity {cap:.6} bits/node, benefit {:.0}%", benefit));
    } else if m.dim() == 1 {
        let range = (m.range() as usize).max(1);
        let g = WeightedGraph::block_symbols(m.alphabet() as usize, range, |w| {
            m.is_valid(&w.iter().enumerate().map(|(i, &s)| ((0, i as i32), s as u8)).collect())
        })
        .map_err(data)?;
        let (eig, _) = solve(&g).map_err(data)?;
        f.put("block_states", g.size());
        f.num("capacity", eig.entropy_bits());
    } else {
        let b = boundary(&a.boundary)?;
        let s = StripModel::from_model(&m, a.width, b).map_err(data)?;
        f.put("width", a.width);
        f.put("boundary", b);
        f.put("column_symbols", s.columns().len());
        f.put("degenerate", s.degenerate());
        f.num("capacity", s.capacity());
        f.num("reference", s.base().reference_entropy());
    }
    f.emit(fmt)
}

fn merw(a: &MerwArgs, fmt: Format) -> Result<()> {
    let text = read_text(Some(&a.graph))?;
    let g = WeightedGraph::from_text(&text).map_err(data)?;
    let (eig, coder) = solve(&g).map_err(data)?;
    let mut out = format_report(&g, &eig, &coder);
    if let Some(p) = &a.path {
        let path: Vec<usize> = list(p, "vertex")?;
        if let Some(&v) = path.iter().find(|&&v| v >= g.size()) {
            return Err(usage(format!("vertex {v} outside 0..{}", g.size())));
        }
        out.push_str(&format!("path_prob = {:.15e}\n", path_prob(&coder, &path).map_err(data)?));
    }
    if fmt == Format::Csv {
        out = std::iter::once("key,value".to_string())
            .chain(out.lines().map(|l| l.replacen(" = ", ",", 1).replace(' ', ";")))
            .map(|l| l + "\n")
            .collect();
    }
    write_output(None, out.as_bytes())
}

fn abs_codec(a: &CoderArgs) -> Result<Codec> {
    let precision = a.precision.unwrap_or(DEFAULT_ABS_PRECISION);
    let mut q: Ratio = a.q.parse().map_err(usage)?;
    if q.dyadic_bits().is_none_or(|b| b > precision) {
        q = Ratio::quantize(q.to_f64(), precision).map_err(usage)?;
        eprintln!("q quantized to {q}");
    }
    let variant = if a.floor { AbsVariant::Floor } else { AbsVariant::Ceiling };
    let params = AbsParams { q, precision, digit_bits: a.digit_bits.unwrap_or(1), variant };
    AbsCoder::new(params).map(Codec::Abs).map_err(usage)
}

fn ans_codec(a: &CoderArgs, input: &[u8]) -> Result<(Codec, bool)> {
    let precision = a.precision.unwrap_or(DEFAULT_ANS_PRECISION);
    let digit_bits = a.digit_bits.unwrap_or(1);
    if !(1..=30).contains(&precision) || !(1..=16).contains(&digit_bits) {
        return Err(usage("precision must lie in 1..=30 and digit bits in 1..=16"));
    }
    let mut counts = [0f64; 256];
    for &b in input {
        counts[b as usize] += 1.0;
    }
    for s in 0..256 {
        if counts.iter().filter(|&&c| c > 0.0).count() >= 2 {
            break;
        }
        if counts[s] == 0.0 {
            counts[s] = 1.0;
        }
    }
    let present: Vec<bool> = counts.iter().map(|&c| c > 0.0).collect();
    let mut probs = counts.to_vec();
    if let Some(eps) = a.forbidden_eps {
        probs = forbidden_symbol_wrap(&probs, eps).map_err(usage)?;
    }
    let l = 1u64 << precision;
    let mut l_s = apportion(&probs, l).map_err(data)?;
    // every present byte needs a nonempty interval
    for s in 0..probs.len() {
        let needed = if s < 256 { present[s] } else { true };
        if needed && l_s[s] == 0 {
            let donor = (0..l_s.len()).max_by_key(|&i| l_s[i]).expect("nonempty");
            if l_s[donor] < 2 {
                return Err(usage(format!("precision {precision} too small for {} symbols", probs.len())));
            }
            l_s[donor] -= 1;
            l_s[s] = 1;
        }
    }
    let table = AnsTable::from_counts(&l_s, 1u64 << digit_bits, Spread::Keyed(a.key)).map_err(usage)?;
    Ok((Codec::Table(table), a.forbidden_eps.is_some()))
}

fn coder_io(a: &CoderArgs, encode: impl Fn(&[u8]) -> Result<Container>, symbols_to_bytes: impl Fn(&[usize]) -> Result<Vec<u8>>) -> Result<()> {
    let input = read_input(a.input.as_deref())?;
    let output = match a.direction {
        Direction::Encode => {
            let bytes = encode(&input)?.to_bytes();
            if a.verify {
                let back = Container::from_bytes(&bytes).and_then(|c| c.decode()).map_err(data)?;
                if symbols_to_bytes(&back)? != input {
                    return Err(data("verification failed: decoded output differs from input"));
                }
                eprintln!("verified {} bytes", input.len());
            }
            bytes
        }
        Direction::Decode => {
            let c = Container::from_bytes(&input).map_err(data)?;
            let symbols = c.decode().map_err(data)?;
            if a.verify {
                let again = Container::encode(c.codec.clone(), c.forbidden, &symbols).map_err(data)?.to_bytes();
                if again != input {
                    return Err(data("verification failed: re-encoding differs from input"));
                }
                eprintln!("verified {} symbols", symbols.len());
            }
            symbols_to_bytes(&symbols)?
        }
    };
    write_output(a.output.as_deref(), &output)
}

fn abs(a: &CoderArgs) -> Result<()> {
    if a.forbidden_eps.is_some() {
        return Err(usage("--forbidden-eps applies to ans only"));
    }
    let codec = if a.direction == Direction::Encode { Some(abs_codec(a)?) } else { None };
    coder_io(
        a,
        |input| {
            let bits: Vec<usize> = bytes_to_bits(input).into_iter().map(usize::from).collect();
            Container::encode(codec.clone().expect("encoder codec"), false, &bits).map_err(data)
        },
        |symbols| {
            let bits: Vec<u8> = symbols.iter().map(|&s| u8::try_from(s).ok().filter(|&b| b < 2).ok_or_else(|| data("non-binary symbol"))).collect::<Result<_>>()?;
            bits_to_bytes(&bits)
        },
    )
}

fn ans(a: &CoderArgs) -> Result<()> {
    if a.floor {
        return Err(usage("--floor applies to abs only"));
    }
    coder_io(
        a,
        |input| {
            let (codec, forbidden) = ans_codec(a, input)?;
            let symbols: Vec<usize> = input.iter().map(|&b| b as usize).collect();
            Container::encode(codec, forbidden, &symbols).map_err(data)
        },
        |symbols| symbols.iter().map(|&s| u8::try_from(s).map_err(|_| data(format!("symbol {s} is not a byte")))).collect(),
    )
}

fn sample(a: &SampleArgs, seed: u64) -> Result<()> {
    let m = model(&a.model)?;
    let b = boundary(&a.boundary)?;
    let config = ThermalConfig { boundary: b, warmup_sweeps: a.warmup, spacing: a.spacing };
    let grids = thermalize(&m, a.rows, a.cols, config, a.count, seed).map_err(usage)?;
    let mut out = String::new();
    for (i, g) in grids.iter().enumerate() {
        out.push_str(&format!("{SAMPLE_MARK} {i} model={} boundary={b} seed={seed}\n", m.name()));
        out.push_str(&g.to_text());
    }
    write_output(a.output.as_deref(), out.as_bytes())
}

/// Grids from a file of one or more `# sample` sections, or a single grid
/// with any `#` header.
fn read_grids(path: &PathBuf) -> Result<Vec<Grid>> {
    let text = read_text(Some(path))?;
    let mut chunks: Vec<String> = Vec::new();
    for line in text.lines() {
        if line.starts_with(SAMPLE_MARK) || chunks.is_empty() {
            chunks.push(String::new());
        }
        let last = chunks.last_mut().expect("nonempty");
        last.push_str(line);
        last.push('\n');
    }
    chunks
        .iter()
        .filter(|c| c.lines().any(|l| !l.trim().is_empty() && !l.starts_with('#')))
        .map(|c| Grid::from_text(c).map_err(|e| data(format!("{}: {e}", path.display()))))
        .collect()
}

fn parse_pattern(text: &str) -> Result<Pattern> {
    let mut p = Pattern::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || usage(format!("bad pattern entry `{item}`, expected `r,c=s`"));
        let (at, s) = item.split_once('=').ok_or_else(bad)?;
        let (r, c) = at.split_once(',').ok_or_else(bad)?;
        let (r, c, s) = (r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?, s.trim().parse().map_err(|_| bad())?);
        p.set((r, c), s);
    }
    Ok(p)
}

fn centered(m: &LatticeModel, side: usize) -> Region {
    if m.dim() == 1 {
        let lo = -((side as i32 - 1) / 2);
        Region::rect_at((0, lo), 1, side)
    } else {
        Region::square(side)
    }
}

fn ploc_if_fits(desc: &dyn Description, m: &LatticeModel, region: &Region) -> Result<Option<f64>> {
    let site = PlocSite::neighborhood(m, (0, 0));
    if !site.context.is_subset(region) {
        return Ok(None);
    }
    check_ploc(desc, m, &[site]).map(Some).map_err(data)
}

fn describe(a: &DescribeArgs, fmt: Format) -> Result<()> {
    let m = model(&a.model)?;
    let f = parse_pattern(&a.pattern)?;
    if f.iter().any(|((r, _), s)| s >= m.alphabet() || (m.dim() == 1 && r != 0)) {
        return Err(usage("pattern does not fit the model"));
    }
    let sides: Vec<usize> = list(&a.side, "side")?;
    if sides.contains(&0) {
        return Err(usage("sides must be positive"));
    }
    let mut rows = Vec::new();
    match a.mode {
        DescribeMode::Exact => {
            for &side in &sides {
                let region = centered(&m, side);
                let d = CountingDescription::new(&m, &region, &Pattern::new()).map_err(data)?;
                let p = d.prob(&f).map_err(data)?;
                let ploc = ploc_if_fits(&d, &m, &region)?;
                rows.push(vec![side.to_string(), d.total().to_string(), fmt15(p), ploc.map_or("-".into(), fmt15)]);
            }
            emit_table(fmt, &["side", "valuations", "prob", "ploc_violation"], &rows)
        }
        DescribeMode::Bounds => {
            let regions: Vec<Region> = sides.iter().map(|&s| centered(&m, s)).collect();
            let bounds = description_bounds(&m, &regions, &f).map_err(data)?;
            for (side, b) in sides.iter().zip(bounds) {
                rows.push(vec![side.to_string(), b.boundary_valuations.to_string(), fmt15(b.low), fmt15(b.high), fmt15(b.gap())]);
            }
            emit_table(fmt, &["side", "boundary_valuations", "low", "high", "gap"], &rows)
        }
        DescribeMode::Empirical => {
            if a.input.is_empty() {
                return Err(usage("empirical mode needs --input sample files"));
            }
            let mut grids = Vec::new();
            for p in &a.input {
                grids.extend(read_grids(p)?);
            }
            if grids.iter().any(|g| (g.rows(), g.cols()) != (grids[0].rows(), grids[0].cols())) {
                return Err(data("samples differ in shape"));
            }
            let window = centered(&m, sides[0]);
            let d = EmpiricalDescription::new(grids, window.clone());
            let p = d.prob(&f).map_err(data)?;
            let n = d.observations() as f64;
            let mut out = Fields::default();
            out.put("observations", d.observations());
            out.num("prob", p);
            out.num("prob_stderr", (p * (1.0 - p) / n).sqrt());
            if let Some(v) = ploc_if_fits(&d, &m, &window)? {
                out.num("ploc_violation", v);
            }
            out.emit(fmt)
        }
    }
}

fn strip_codec(model_name: &str, width: usize, b: Boundary, precision: u32, key: u64) -> Result<LatticeCodec> {
    let s = StripModel::from_model(&model(model_name)?, width, b).map_err(usage)?;
    LatticeCodec::new(s, precision, key).map_err(usage)
}

fn strip(a: &StripArgs, fmt: Format, seed: u64) -> Result<()> {
    let widths: Vec<usize> = list(&a.width, "width")?;
    let b = boundary(&a.boundary)?;
    if b == Boundary::Free {
        return Err(usage("strip boundary must be cyclic or zero"));
    }
    let single = || -> Result<usize> {
        match widths.as_slice() {
            [w] => Ok(*w),
            _ => Err(usage("this action takes a single --width")),
        }
    };
    match a.action {
        StripAction::Build => {
            let s = StripModel::from_model(&model(&a.model)?, single()?, b).map_err(usage)?;
            let mut f = Fields::default();
            f.put("model", s.base().model().name());
            f.put("width", s.width());
            f.put("boundary", s.boundary());
            f.put("column_symbols", s.columns().len());
            f.put("transitions", s.graph().matrix().nnz());
            f.put("degenerate", s.degenerate());
            f.num("lambda", s.eig().lambda);
            f.num("capacity", s.capacity());
            f.num("chain_entropy", s.chain().chain_entropy() / s.width() as f64);
            f.put("row_marginals", s.row_marginals().iter().map(|&p| fmt15(p)).collect::<Vec<_>>().join(" "));
            f.emit(fmt)
        }
        StripAction::Capacity => {
            let m = model(&a.model)?;
            let mut rows = Vec::new();
            for &w in &widths {
                let s = StripModel::from_model(&m, w, b).map_err(usage)?;
                let r = s.base().reference_entropy();
                rows.push(vec![w.to_string(), b.to_string(), s.columns().len().to_string(), fmt15(s.capacity()), fmt15(r - s.capacity())]);
            }
            emit_table(fmt, &["width", "boundary", "column_symbols", "capacity", "gap"], &rows)
        }
        StripAction::Encode => {
            let codec = strip_codec(&a.model, single()?, b, a.precision, a.key)?;
            let bits = bytes_to_bits(&read_input(a.input.as_deref())?);
            let enc = codec.encode(&bits, a.columns).map_err(data)?;
            let text = enc.to_text();
            if a.verify {
                let back = EncodedLattice::from_text(&text).and_then(|e| codec.decode(&e)).map_err(data)?;
                if back != bits {
                    return Err(data("verification failed: decoded lattice differs from input"));
                }
                eprintln!("verified {} bits in {} nodes, {} bits/node", bits.len(), enc.nodes(), fmt15(enc.bits_per_node()));
            }
            write_output(a.output.as_deref(), text.as_bytes())
        }
        StripAction::Decode => {
            let text = read_text(a.input.as_deref())?;
            let enc = EncodedLattice::from_text(&text).map_err(data)?;
            let h = &enc.header;
            let codec = strip_codec(&h.model, h.width, h.boundary, h.precision, h.key).map_err(|e| match e {
                CliError::Usage(m) | CliError::Data(m) => data(m),
            })?;
            let bits = codec.decode(&enc).map_err(data)?;
            if a.verify {
                let again = codec.encode(&bits, Some(enc.grid.cols())).map_err(data)?;
                if again != enc {
                    return Err(data("verification failed: re-encoding differs from input"));
                }
            }
            write_output(a.output.as_deref(), &bits_to_bytes(&bits)?)
        }
        StripAction::Evaluate => {
            if a.trials == 0 {
                return Err(usage("--trials must be positive"));
            }
            let mut rows = Vec::new();
            for &w in &widths {
                let codec = strip_codec(&a.model, w, b, a.precision, a.key)?;
                let r = evaluate_rate(&codec, a.trials, a.bits, seed).map_err(data)?;
                rows.push(vec![
                    w.to_string(),
                    b.to_string(),
                    r.trials.to_string(),
                    fmt15(r.mean),
                    fmt15(r.stderr),
                    fmt15(r.capacity),
                    fmt15(r.reference),
                    fmt15(r.gap()),
                ]);
            }
            emit_table(fmt, &["width", "boundary", "trials", "rate", "stderr", "capacity", "reference", "gap"], &rows)
        }
    }
}

fn algo1(a: &Algo1Args, fmt: Format, seed: u64) -> Result<()> {
    if a.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let (best, q_opt) = algorithm1_optimum();
    let q = a.q.unwrap_or(q_opt);
    let codec = Algorithm1Codec::new(a.side, a.side, q, a.precision, boundary(&a.boundary)?).map_err(usage)?;
    let rate = algorithm1_rate(&codec, a.trials, seed).map_err(data)?;
    let mut f = Fields::default();
    f.num("q_optimal", q_opt);
    f.num("entropy_optimal", best);
    f.num("delta_h_optimal", lattice_ans::HARD_SQUARE_ENTROPY - best);
    f.num("q", codec.q());
    f.num("entropy", algorithm1_entropy(codec.q()));
    f.put("side", a.side);
    f.put("boundary", codec.boundary());
    f.est("rate", rate);
    f.put("trials", rate.samples);
    f.emit(fmt)
}

fn algo2(a: &Algo2Args, fmt: Format, seed: u64) -> Result<()> {
    let config = Algorithm2Config { side: a.side, trials: a.trials, bins: a.bins, boundary: boundary(&a.boundary)? };
    let profile = match &a.profile {
        Some(text) => text.parse::<ChargingProfile>().map_err(usage)?,
        None => fit_charging_profile(&config, a.fit_samples, FIT_ORDERS, seed).map_err(usage)?.profile,
    };
    let rep = algorithm2_simulate(&config, &profile, seed).map_err(usage)?;
    if let Some(p) = &a.curves {
        write_output(Some(p), rep.curves_csv().as_bytes())?;
    }
    let mut f = Fields::default();
    f.put("side", config.side);
    f.put("boundary", config.boundary);
    f.put("trials", config.trials);
    f.put("profile", profile);
    f.est("entropy_direct", rep.direct);
    f.est("entropy_integral", rep.integral);
    f.est("delta_h", rep.delta_h());
    f.est("density", rep.density);
    f.est("a_start", rep.a_start());
    f.est("a_end", rep.a_end());
    f.est("q_start", rep.q_start());
    f.emit(fmt)
}

fn report(a: &ReportArgs, fmt: Format, seed: u64) -> Result<()> {
    let opts = ReportOptions { seed, side: a.side, trials: a.trials, fit_samples: a.fit_samples };
    let rep = reproduce_tables_with(&opts).map_err(data)?;
    let text = match fmt {
        Format::Text => rep.to_text(),
        Format::Csv => rep.to_csv(),
    };
    write_output(None, text.as_bytes())?;
    let failed: Vec<&str> = rep.failures().map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(data(format!("{} row(s) differ from the published values: {}", failed.len(), failed.join(" "))))
    }
}
