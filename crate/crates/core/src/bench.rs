//! Benchmark assembly: answer-label binning, per-bin capping, and fixed
//! per-task quotas.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use log::warn;
use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interchange::{to_jsonl_string, Answer, QaItem, Task};
use crate::qagen::sort_items;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    /// Bucket width for distance answers, meters.
    pub distance_bin: f64,
    /// Distances at or above this share one overflow bucket.
    pub distance_max: f64,
    /// Bucket width for speed answers, km/h.
    pub speed_bin: f64,
    /// Bucket width for interval durations, seconds.
    pub interval_bin: f64,
    pub quota: usize,
    /// Fixed per-bin cap; when unset each task uses its smallest bin,
    /// clamped to `[min_cap, quota]`.
    pub cap: Option<usize>,
    pub min_cap: usize,
    pub tasks: Vec<Task>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            distance_bin: 5.0,
            distance_max: 50.0,
            speed_bin: 5.0,
            interval_bin: 1.0,
            quota: 200,
            cap: None,
            min_cap: 10,
            tasks: Task::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinKey {
    /// Bucket `k` covering `[k * width, (k + 1) * width)`.
    Range { k: u64, width_milli: u64 },
    /// Everything at or above the last bounded bucket.
    Overflow { from_milli: u64 },
    Hour(u8),
    Label(String),
}

fn milli(x: f64) -> u64 {
    (x * 1000.0).round() as u64
}

fn fmt_edge(milli: u64) -> String {
    let x = milli as f64 / 1000.0;
    if milli.is_multiple_of(1000) {
        format!("{}", milli / 1000)
    } else {
        format!("{x}")
    }
}

impl fmt::Display for BinKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinKey::Range { k, width_milli } => {
                write!(f, "[{},{})", fmt_edge(k * width_milli), fmt_edge((k + 1) * width_milli))
            }
            BinKey::Overflow { from_milli } => write!(f, "[{},inf)", fmt_edge(*from_milli)),
            BinKey::Hour(h) => write!(f, "hour-{h}"),
            BinKey::Label(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelBin {
    pub task: Task,
    pub key: BinKey,
}

impl fmt::Display for LabelBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.task, self.key)
    }
}

fn bucket(x: f64, width: f64) -> BinKey {
    BinKey::Range {
        k: (x / width).floor().max(0.0) as u64,
        width_milli: milli(width),
    }
}

pub fn bin_of(item: &QaItem, cfg: &BenchConfig) -> LabelBin {
    let key = match &item.answer_typed {
        Answer::Meters(d) if *d >= cfg.distance_max => BinKey::Overflow {
            from_milli: milli(cfg.distance_max),
        },
        Answer::Meters(d) => bucket(*d, cfg.distance_bin),
        Answer::Kmh(v) => bucket(*v, cfg.speed_bin),
        Answer::Clock(h) => BinKey::Hour(*h),
        Answer::Interval([s, e]) => bucket(e - s, cfg.interval_bin),
        Answer::Choice(c) => BinKey::Label(c.to_string()),
        Answer::Boolean(b) => BinKey::Label(if *b { "yes" } else { "no" }.into()),
    };
    LabelBin { task: item.task, key }
}

pub fn bin_counts(items: &[QaItem], cfg: &BenchConfig) -> BTreeMap<LabelBin, usize> {
    let mut out = BTreeMap::new();
    for item in items {
        *out.entry(bin_of(item, cfg)).or_default() += 1;
    }
    out
}

fn group_by_bin<'a>(items: &'a [QaItem], cfg: &BenchConfig) -> BTreeMap<LabelBin, Vec<&'a QaItem>> {
    let mut bins: BTreeMap<LabelBin, Vec<&QaItem>> = BTreeMap::new();
    for item in items {
        bins.entry(bin_of(item, cfg)).or_default().push(item);
    }
    for members in bins.values_mut() {
        members.sort_by(|a, b| a.qa_id.cmp(&b.qa_id));
    }
    bins
}

/// Per-task cap: the configured one, or the task's smallest bin clamped to
/// `[min_cap, quota]`.
pub fn caps_for(items: &[QaItem], cfg: &BenchConfig) -> BTreeMap<Task, usize> {
    let mut smallest: BTreeMap<Task, usize> = BTreeMap::new();
    for (bin, n) in bin_counts(items, cfg) {
        let e = smallest.entry(bin.task).or_insert(n);
        *e = (*e).min(n);
    }
    smallest
        .into_iter()
        .map(|(task, n)| {
            let cap = cfg.cap.unwrap_or_else(|| n.clamp(cfg.min_cap, cfg.quota.max(cfg.min_cap)));
            (task, cap)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Balanced {
    pub items: Vec<QaItem>,
    pub caps: BTreeMap<Task, usize>,
}

/// Keeps at most `cap` items per bin, sampled uniformly without replacement
/// with one generator walked over the bins in sorted order.
pub fn balance_with_caps(items: &[QaItem], caps: &BTreeMap<Task, usize>, seed: u64, cfg: &BenchConfig) -> Result<Vec<QaItem>> {
    if let Some((t, _)) = caps.iter().find(|(_, c)| **c == 0) {
        return Err(Error::InvalidArgument(format!("cap for {t} must be >= 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (bin, members) in group_by_bin(items, cfg) {
        let cap = caps.get(&bin.task).copied().unwrap_or(usize::MAX);
        if members.len() <= cap {
            out.extend(members.into_iter().cloned());
        } else {
            let mut picked = index::sample(&mut rng, members.len(), cap).into_vec();
            picked.sort_unstable();
            out.extend(picked.into_iter().map(|i| members[i].clone()));
        }
    }
    sort_items(&mut out);
    Ok(out)
}

pub fn balance(items: &[QaItem], seed: u64, cfg: &BenchConfig) -> Result<Balanced> {
    let caps = caps_for(items, cfg);
    let items = balance_with_caps(items, &caps, seed, cfg)?;
    Ok(Balanced { items, caps })
}

/// Per-bin allocation summing to `quota`: every bin gets up to a common
/// level, and the leftover units go to seeded picks among bins that still
/// have room.
fn water_fill(sizes: &[usize], quota: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    if total <= quota {
        return sizes.to_vec();
    }
    let filled = |level: usize| sizes.iter().map(|&s| s.min(level)).sum::<usize>();
    let (mut lo, mut hi) = (0, sizes.iter().copied().max().unwrap_or(0));
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if filled(mid) <= quota {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let mut alloc: Vec<usize> = sizes.iter().map(|&s| s.min(lo)).collect();
    let mut room: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] > lo).collect();
    room.shuffle(rng);
    for &i in room.iter().take(quota - filled(lo)) {
        alloc[i] += 1;
    }
    alloc
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchHeader {
    pub tool: String,
    pub version: String,
    pub stage: String,
    pub seed: u64,
    pub caps: BTreeMap<Task, usize>,
    pub quotas: BTreeMap<Task, usize>,
    pub counts: BTreeMap<Task, usize>,
    pub warnings: Vec<String>,
}

impl BenchHeader {
    pub fn new(stage: &str, seed: u64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            stage: stage.into(),
            seed,
            caps: BTreeMap::new(),
            quotas: BTreeMap::new(),
            counts: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub header: BenchHeader,
    pub items: Vec<QaItem>,
}

fn task_counts(items: &[QaItem]) -> BTreeMap<Task, usize> {
    let mut out = BTreeMap::new();
    for i in items {
        *out.entry(i.task).or_default() += 1;
    }
    out
}

impl Benchmark {
    pub fn from_balanced(b: Balanced, seed: u64) -> Self {
        let mut header = BenchHeader::new("balance", seed);
        header.caps = b.caps;
        header.counts = task_counts(&b.items);
        Self { header, items: b.items }
    }

    pub fn to_jsonl_string(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            header: &'a BenchHeader,
        }
        let mut out = serde_json::to_string(&Line { header: &self.header }).expect("serializable header");
        out.push('\n');
        out.push_str(&to_jsonl_string(&self.items));
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_jsonl_string()).map_err(|e| Error::io(path, e))
    }
}

/// Reads a QA file with or without a leading header line.
pub fn read_items_with_header(path: impl AsRef<Path>) -> Result<(Option<BenchHeader>, Vec<QaItem>)> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Line {
        header: BenchHeader,
    }
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut header = None;
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let at = || format!("{}:{}", path.display(), i + 1);
        if i == 0 && line.trim_start().starts_with("{\"header\"") {
            let h: Line = serde_json::from_str(line).map_err(|e| Error::malformed(at(), e))?;
            header = Some(h.header);
        } else {
            items.push(serde_json::from_str::<QaItem>(line).map_err(|e| Error::malformed(at(), e))?);
        }
    }
    for item in &items {
        item.check()?;
    }
    Ok((header, items))
}

/// Draws exactly `quota` items per task, spread as evenly as the bins allow.
/// Short pools are an error unless `allow_short`, in which case the whole
/// pool is kept and the shortfall recorded in the header.
pub fn assemble(items: &[QaItem], seed: u64, allow_short: bool, cfg: &BenchConfig) -> Result<Benchmark> {
    let mut by_task: BTreeMap<Task, Vec<QaItem>> = BTreeMap::new();
    for item in items {
        by_task.entry(item.task).or_default().push(item.clone());
    }
    let mut shortfalls = Vec::new();
    for &task in &cfg.tasks {
        let n = by_task.get(&task).map_or(0, Vec::len);
        if n < cfg.quota {
            shortfalls.push((task.to_string(), cfg.quota - n));
        }
    }
    if !shortfalls.is_empty() && !allow_short {
        return Err(Error::PoolUnderflow(shortfalls));
    }
    let mut header = BenchHeader::new("assemble", seed);
    for (task, short) in &shortfalls {
        let w = format!("{task}: {} of {} items (short by {short})", cfg.quota - short, cfg.quota);
        warn!("{w}");
        header.warnings.push(w);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &task in &cfg.tasks {
        header.quotas.insert(task, cfg.quota);
        let Some(pool) = by_task.get(&task) else {
            continue;
        };
        let bins: Vec<Vec<&QaItem>> = group_by_bin(pool, cfg).into_values().collect();
        let sizes: Vec<usize> = bins.iter().map(Vec::len).collect();
        let alloc = water_fill(&sizes, cfg.quota, &mut rng);
        for (members, take) in bins.iter().zip(alloc) {
            let mut picked = index::sample(&mut rng, members.len(), take).into_vec();
            picked.sort_unstable();
            out.extend(picked.into_iter().map(|i| members[i].clone()));
        }
    }
    sort_items(&mut out);
    header.counts = task_counts(&out);
    Ok(Benchmark { header, items: out })
}
