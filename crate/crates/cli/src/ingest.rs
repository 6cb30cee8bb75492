use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use heegner_core::arith::gcd;
use heegner_core::lfun::{hecke_extend, CoefficientSeries, Parity, HECKE_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Header of a Maass coefficient file.
#[derive(Debug, Clone, PartialEq)]
pub struct MaassHeader {
    pub level: u64,
    pub t: f64,
    pub parity: Parity,
    pub count: usize,
    pub source: String,
}

/// `# key: value` header lines, then `n<TAB>lambda(n)` for `n = 1..=count`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaassDataFile {
    pub header: MaassHeader,
    pub coeffs: Vec<f64>,
}

/// Random coprime pairs tested at ingest.
pub const SPOT_CHECK_PAIRS: usize = 100;
const SPOT_CHECK_SEED: u64 = 0x5eed;

pub fn parse_maass(text: &str) -> anyhow::Result<MaassDataFile> {
    let (mut level, mut t, mut parity, mut count, mut source) = (None, None, None, None, String::new());
    let mut coeffs = Vec::new();
    let mut in_body = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if in_body {
                bail!("line {lineno}: header line after the body started");
            }
            let (key, value) = rest
                .split_once(':')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| anyhow!("line {lineno}: header lines look like '# key: value'"))?;
            let bad = |what: &str| anyhow!("line {lineno}: bad {what} {value:?}");
            match key {
                "level" => level = Some(value.parse::<u64>().ok().filter(|&l| l > 0).ok_or_else(|| bad("level"))?),
                "t" => t = Some(value.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad("spectral parameter"))?),
                "parity" => {
                    parity = Some(match value.to_ascii_lowercase().as_str() {
                        "even" | "0" => Parity::Even,
                        "odd" | "1" => Parity::Odd,
                        _ => return Err(bad("parity")),
                    })
                }
                "count" => count = Some(value.parse::<usize>().map_err(|_| bad("count"))?),
                "source" => source = value.to_string(),
                _ => bail!("line {lineno}: unknown header key {key:?}"),
            }
            continue;
        }
        in_body = true;
        let (n, v) = line.split_once('\t').ok_or_else(|| anyhow!("line {lineno}: body lines look like 'n<TAB>value'"))?;
        let n: usize = n.trim().parse().map_err(|_| anyhow!("line {lineno}: bad index {n:?}"))?;
        if n != coeffs.len() + 1 {
            bail!("line {lineno}: expected n = {}, found {n}", coeffs.len() + 1);
        }
        let v: f64 = v.trim().parse().map_err(|_| anyhow!("line {lineno}: bad coefficient {v:?}"))?;
        if !v.is_finite() {
            bail!("line {lineno}: coefficient is not finite");
        }
        coeffs.push(v);
    }
    let missing = |k: &str| anyhow!("header: missing '{k}'");
    let header = MaassHeader {
        level: level.ok_or_else(|| missing("level"))?,
        t: t.ok_or_else(|| missing("t"))?,
        parity: parity.ok_or_else(|| missing("parity"))?,
        count: count.ok_or_else(|| missing("count"))?,
        source,
    };
    if coeffs.len() != header.count {
        bail!("header: count is {} but the body has {} coefficients", header.count, coeffs.len());
    }
    Ok(MaassDataFile { header, coeffs })
}

impl MaassDataFile {
    pub fn render(&self) -> String {
        let h = &self.header;
        let parity = if h.parity == Parity::Even { "even" } else { "odd" };
        let mut s = format!("# level: {}\n# t: {:?}\n# parity: {parity}\n# count: {}\n# source: {}\n", h.level, h.t, h.count, h.source);
        for (i, v) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{}\t{v:?}", i + 1);
        }
        s
    }

    /// Normalization, the random coprime spot check, then the core constructor.
    pub fn validate(&self) -> anyhow::Result<CoefficientSeries> {
        let c = &self.coeffs;
        match c.first() {
            Some(&l1) if (l1 - 1.0).abs() <= HECKE_TOL => {}
            Some(&l1) => bail!("normalization: lambda(1) = {l1}, expected 1"),
            None => bail!("normalization: no coefficients"),
        }
        spot_check(c, self.header.level)?;
        Ok(CoefficientSeries::new(self.header.t, self.header.level, self.header.parity, c.clone())?)
    }
}

/// `lambda(m) lambda(n) = lambda(mn)` on seeded random pairs with `gcd(m, n) = gcd(mn, level) = 1`.
fn spot_check(c: &[f64], level: u64) -> anyhow::Result<()> {
    let n_max = c.len() as u64;
    if n_max < 6 {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_CHECK_SEED);
    let (mut done, mut tries) = (0, 0);
    while done < SPOT_CHECK_PAIRS && tries < 100 * SPOT_CHECK_PAIRS {
        tries += 1;
        let m = rng.gen_range(2..=n_max / 2);
        if n_max / m < 2 {
            continue;
        }
        let n = rng.gen_range(2..=n_max / m);
        if gcd(m as i64, n as i64) != 1 || gcd((m * n) as i64, level as i64) != 1 {
            continue;
        }
        done += 1;
        let (lm, ln, lmn) = (c[m as usize - 1], c[n as usize - 1], c[(m * n) as usize - 1]);
        if (lm * ln - lmn).abs() > HECKE_TOL * (1.0 + lmn.abs()) {
            bail!("Hecke check: pair ({m}, {n}): lambda({m}) lambda({n}) = {} but lambda({}) = {lmn}", lm * ln, m * n);
        }
    }
    Ok(())
}

pub fn ingest_maass(path: &Path) -> anyhow::Result<CoefficientSeries> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_maass(&text).with_context(|| format!("parsing {}", path.display()))?;
    file.validate().with_context(|| format!("validating {}", path.display()))
}

/// Level-one toy Hecke data: `lambda(p) = 2 cos(theta_p)` with seeded angles.
///
/// Multiplicative and within the Ramanujan bound, but not the data of any
/// automorphic form; it exercises ingestion, not the L-value identities.
pub fn synthetic_maass(t: f64, count: usize, seed: u64) -> MaassDataFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = hecke_extend(count, 1, |_| 2.0 * rng.gen_range(0.0..std::f64::consts::PI).cos());
    MaassDataFile {
        header: MaassHeader { level: 1, t, parity: Parity::Even, count, source: format!("synthetic, seed {seed}") },
        coeffs,
    }
}
