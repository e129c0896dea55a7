use super::coder::SymbolCoder;
use super::stream::StreamDecoder;
use super::AnsError;

/// Scales every probability by `1 − ε` and appends a never-encoded symbol
/// of probability `ε`.
pub fn forbidden_symbol_wrap(probs: &[f64], eps: f64) -> Result<Vec<f64>, AnsError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(AnsError::InvalidProbability(format!("forbidden probability {eps}")));
    }
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(AnsError::InvalidProbability(format!("{probs:?}")));
    }
    let mut out: Vec<f64> = probs.iter().map(|p| p / total * (1.0 - eps)).collect();
    out.push(eps);
    Ok(out)
}

/// Decodes with the last symbol treated as forbidden. `count = None` stops
/// at the initial state `l`, as [`super::stream::ans_stream_decode_all`].
pub fn decode_guarded<C: SymbolCoder>(
    digits: &[u32],
    coder: &C,
    final_state: u64,
    count: Option<usize>,
) -> Result<Vec<usize>, AnsError> {
    let forbidden = coder.symbols() - 1;
    let mut dec = StreamDecoder::new(digits, final_state);
    let mut out = Vec::new();
    loop {
        match count {
            Some(n) if out.len() == n => break,
            None if dec.at_start(coder.l()) => break,
            _ => {}
        }
        let s = dec.next(coder)?;
        if s == forbidden {
            return Err(AnsError::ErrorDetected { position: out.len() });
        }
        out.push(s);
    }
    Ok(out)
}
