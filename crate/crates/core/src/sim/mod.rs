//! Monte Carlo campaigns: round-robin scheduling, per-slot channel draws, scheme
//! policies, and comparison with the closed forms.
//!
//! Every slot draws its randomness from its own ChaCha stream keyed by
//! `(seed, campaign_id)` with the slot index as stream number, so slots can be split
//! over any number of threads without changing a single bit of the result. UE
//! positions depend on the seed alone and are therefore shared by all campaigns of
//! a sweep.

mod accum;
pub mod checks;

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{
    path_loss, sample_link, scalar_channel, AngleConstraint, Geometry, IrsId, IrsLink, Point,
    UeChannel,
};
use crate::error::{invalid, Error, Result};
use crate::irs::{
    choose_overall_phases, configure_inband, detect_alignment, detect_alignment_pair,
    multi_operator_phases, time_share_owner, wrap_phase, EffectiveChannelTerms, EventLabel,
    IrsSetting, SchemeKind, SchemePolicy,
};
use crate::rates::{
    log2_1p, theorem1_sum_se, theorem3_multi_mo_rate, ue_event_se, MultiMoBudget, SideBudget,
};
use crate::specfun::check_paths;

pub use accum::{CrossMoments, Moments};

/// Slots per work unit. Part of the reduction order, so changing it changes the
/// last bits of every average.
const CHUNK: u64 = 512;

/// Everything a campaign needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub num_operators: usize,
    /// `N_p` of IRS `p`; IRS `p` belongs to operator `p`.
    pub elements_per_irs: Vec<usize>,
    pub ues_per_operator: Vec<usize>,
    /// `paths[op][ue][irs]`: resolvable cascaded paths from that IRS to that UE.
    pub paths: Vec<Vec<Vec<usize>>>,
    /// Transmit SNR `P/σ²`, linear.
    pub snr: f64,
    pub scheme: SchemePolicy,
    pub geometry: Geometry,
    pub slots: u64,
    pub seed: u64,
    /// Selects the slot streams; UE placement ignores it.
    pub campaign_id: u64,
    /// Two operators only: draw every slot conditioned on this alignment event.
    pub condition: Option<EventLabel>,
}

impl SystemConfig {
    /// Expands per-operator path counts `[op][irs]` to every UE of that operator.
    pub fn uniform_paths(per_operator: &[Vec<usize>], ues: &[usize]) -> Vec<Vec<Vec<usize>>> {
        per_operator
            .iter()
            .zip(ues)
            .map(|(row, &k)| vec![row.clone(); k])
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.num_operators;
        if m < 2 {
            return Err(invalid("num_operators", format!("need at least 2, got {m}")));
        }
        for (name, len) in [
            ("elements_per_irs", self.elements_per_irs.len()),
            ("ues_per_operator", self.ues_per_operator.len()),
            ("paths", self.paths.len()),
            ("geometry.bs_positions", self.geometry.bs_positions.len()),
        ] {
            if len != m {
                return Err(invalid(name, format!("expected {m} entries, got {len}")));
            }
        }
        self.geometry.validate()?;
        if let Some(&n) = self.elements_per_irs.iter().find(|&&n| n == 0) {
            return Err(Error::ZeroCount(n));
        }
        for (op, rows) in self.paths.iter().enumerate() {
            let k = self.ues_per_operator[op];
            if k == 0 {
                return Err(Error::EmptyUeList);
            }
            if rows.len() != k {
                return Err(invalid(
                    "paths",
                    format!("operator {op} has {k} UEs but {} path rows", rows.len()),
                ));
            }
            for row in rows {
                if row.len() != m {
                    return Err(invalid("paths", format!("expected {m} IRSs per UE, got {}", row.len())));
                }
                for (&l, &n) in row.iter().zip(&self.elements_per_irs) {
                    check_paths(l, n)?;
                }
            }
        }
        if self.slots == 0 {
            return Err(invalid("slots", "must be at least 1"));
        }
        if !(self.snr.is_finite() && self.snr >= 0.0) {
            return Err(invalid("snr", format!("must be finite and non-negative, got {}", self.snr)));
        }
        let s = &self.scheme;
        if !(0.0..=1.0).contains(&s.zeta) {
            return Err(invalid("zeta", format!("must lie in [0, 1], got {}", s.zeta)));
        }
        if !(s.weights.0 >= 0.0 && s.weights.1 >= 0.0 && s.weights.0 + s.weights.1 > 0.0) {
            return Err(invalid("weights", "must be non-negative with a positive sum"));
        }
        if m > 2 && s.kind == SchemeKind::JointOpt {
            return Err(Error::Unsupported(
                "joint optimization needs exactly two operators".into(),
            ));
        }
        if let Some(ev) = self.condition {
            if m != 2 || matches!(ev, EventLabel::Multi(_)) {
                return Err(Error::Unsupported(format!(
                    "conditioning on event {} with {m} operators",
                    ev.name()
                )));
            }
            let (k_aligned, q_aligned) = pair_flags(ev);
            for (op, aligned) in [(0, k_aligned), (1, q_aligned)] {
                let oob = 1 - op;
                let n = self.elements_per_irs[oob];
                if !aligned && self.paths[op].iter().any(|row| row[oob] >= n) {
                    return Err(invalid(
                        "condition",
                        format!("event {} needs L < N at IRS {oob}", ev.name()),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn pair_flags(ev: EventLabel) -> (bool, bool) {
    match ev {
        EventLabel::A => (true, true),
        EventLabel::B => (false, true),
        EventLabel::C => (true, false),
        _ => (false, false),
    }
}

/// What one scheduled UE saw in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct UeSlot {
    pub op: usize,
    pub ue: usize,
    /// `log₂(1 + snr|h|²)`.
    pub se: f64,
    /// SE with every OOB IRS removed.
    pub no_oob_se: f64,
    /// `|h|²`.
    pub gain: f64,
    pub event: EventLabel,
    /// Magnitude of the in-band IRS contribution.
    pub inband_mag: f64,
    /// Aligned OOB IRS id → magnitude of its contribution.
    pub oob_mags: BTreeMap<IrsId, f64>,
    /// Aligned OOB IRS id → phase offset relative to the in-band path.
    pub offsets: BTreeMap<IrsId, f64>,
    /// Whether the aligned OOB reflections were phased onto this UE.
    pub coherent: bool,
}

/// Outcome of one slot, indexed by operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    pub t: u64,
    /// Phase owner under time sharing.
    pub owner: Option<usize>,
    pub ues: Vec<UeSlot>,
}

impl SlotOutcome {
    pub fn se(&self) -> Vec<f64> {
        self.ues.iter().map(|u| u.se).collect()
    }
}

/// Statistics cell key: one UE, one event, one phase owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub op: usize,
    pub ue: usize,
    pub event: EventLabel,
    pub owner: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellStats {
    pub se: Moments,
    pub no_oob_se: Moments,
    pub gain: Moments,
    pub cross: CrossMoments,
    /// Slots in which the aligned OOB reflections were phased onto the UE.
    pub coherent_slots: u64,
}

impl CellStats {
    fn merge(&mut self, o: &CellStats) {
        self.se.merge(&o.se);
        self.no_oob_se.merge(&o.no_oob_se);
        self.gain.merge(&o.gain);
        self.cross.merge(&o.cross);
        self.coherent_slots += o.coherent_slots;
    }
}

#[derive(Debug, Clone, Default)]
struct Accumulator {
    cells: BTreeMap<CellKey, CellStats>,
}

impl Accumulator {
    fn push(&mut self, slot: &SlotOutcome) {
        for u in &slot.ues {
            let key = CellKey {
                op: u.op,
                ue: u.ue,
                event: u.event,
                owner: slot.owner,
            };
            let c = self.cells.entry(key).or_default();
            c.se.push(u.se);
            c.no_oob_se.push(u.no_oob_se);
            c.gain.push(u.gain);
            let g: f64 = u.oob_mags.values().sum();
            let g_sq: f64 = u.oob_mags.values().map(|v| v * v).sum();
            c.cross.push(u.inband_mag, g, u.gain - u.inband_mag * u.inband_mag - g_sq);
            c.coherent_slots += u.coherent as u64;
        }
    }

    fn merge(&mut self, o: Accumulator) {
        for (k, v) in o.cells {
            self.cells.entry(k).or_default().merge(&v);
        }
    }
}

/// Per-cell comparison of simulation against closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellComparison {
    pub key: CellKey,
    pub count: u64,
    /// Mean SE over the cell's slots.
    pub se: f64,
    /// `log₂(1 + snr·mean|h|²)`: the simulated value after the Jensen step.
    pub jensen_se: f64,
    /// Matching closed form, when one exists.
    pub closed_form_se: Option<f64>,
    /// `x̄ − 2c ā ḡ` and its standard error, for cells with at most one aligned OOB IRS.
    pub factorization: Option<(f64, f64)>,
}

/// Campaign result. Vectors are indexed by operator.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub slots: u64,
    pub per_operator_se: Vec<f64>,
    pub per_operator_se_stderr: Vec<f64>,
    /// Same slots and UEs with every OOB IRS removed.
    pub per_operator_no_oob_se: Vec<f64>,
    /// Mean over cells of `log₂(1 + snr·mean|h|²)`, weighted by cell size.
    pub per_operator_jensen_se: Vec<f64>,
    pub per_event_counts: Vec<BTreeMap<EventLabel, u64>>,
    pub analytic_se: Vec<f64>,
    pub analytic_no_oob_se: Vec<f64>,
    pub rel_error: Vec<f64>,
    pub cells: BTreeMap<CellKey, CellStats>,
    pub comparisons: Vec<CellComparison>,
}

impl RateReport {
    /// Relative event frequencies of one operator's scheduled UEs.
    pub fn event_frequencies(&self, op: usize) -> BTreeMap<EventLabel, f64> {
        let counts = &self.per_event_counts[op];
        let total: u64 = counts.values().sum();
        counts
            .iter()
            .map(|(&e, &c)| (e, c as f64 / total.max(1) as f64))
            .collect()
    }

    pub fn total_event_count(&self) -> u64 {
        self.per_event_counts.iter().flat_map(|m| m.values()).sum()
    }
}

/// A validated configuration with UEs placed and path losses fixed.
#[derive(Debug, Clone)]
pub struct Campaign {
    cfg: SystemConfig,
    ue_positions: Vec<Vec<Point>>,
    /// `betas[op][ue][irs]`: cascaded path loss BS-op → IRS → UE.
    betas: Vec<Vec<Vec<f64>>>,
    stream: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn keyed_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = splitmix64(seed) ^ splitmix64(tag.rotate_left(17) ^ 0x5ca1_ab1e);
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Tag reserved for UE placement; campaign ids never reach it.
const PLACEMENT_TAG: u64 = u64::MAX;

impl Campaign {
    pub fn new(cfg: SystemConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.campaign_id == PLACEMENT_TAG {
            return Err(invalid("campaign_id", "value is reserved"));
        }
        let mut place = keyed_rng(cfg.seed, PLACEMENT_TAG);
        let g = &cfg.geometry;
        let ue_positions: Vec<Vec<Point>> = cfg
            .ues_per_operator
            .iter()
            .map(|&k| (0..k).map(|_| g.ue_region.sample(&mut place)).collect())
            .collect();
        let mut betas = Vec::with_capacity(cfg.num_operators);
        for (op, ues) in ue_positions.iter().enumerate() {
            let bs = g.bs_positions[op];
            let mut rows = Vec::with_capacity(ues.len());
            for &ue in ues {
                let row = g
                    .irs_positions
                    .iter()
                    .map(|&irs| Ok(path_loss(g, bs, irs)? * path_loss(g, irs, ue)?))
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
            }
            betas.push(rows);
        }
        let stream = keyed_rng(cfg.seed, cfg.campaign_id);
        Ok(Self {
            cfg,
            ue_positions,
            betas,
            stream,
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn ue_positions(&self) -> &[Vec<Point>] {
        &self.ue_positions
    }

    pub fn betas(&self) -> &[Vec<Vec<f64>>] {
        &self.betas
    }

    fn slot_rng(&self, t: u64) -> ChaCha8Rng {
        let mut rng = self.stream.clone();
        rng.set_stream(t);
        rng
    }

    /// Per-UE budgets of a two-operator campaign, `[op][ue]`.
    pub fn side_budgets(&self) -> Result<Vec<Vec<SideBudget>>> {
        if self.cfg.num_operators != 2 {
            return Err(Error::Unsupported("side budgets need two operators".into()));
        }
        let n = &self.cfg.elements_per_irs;
        Ok((0..2)
            .map(|op| {
                let oob = 1 - op;
                self.betas[op]
                    .iter()
                    .zip(&self.cfg.paths[op])
                    .map(|(b, l)| SideBudget {
                        snr: self.cfg.snr,
                        n_in: n[op],
                        n_oob: n[oob],
                        l_in: l[op],
                        l_oob: l[oob],
                        beta_in: b[op],
                        beta_oob: b[oob],
                    })
                    .collect()
            })
            .collect())
    }

    fn scheduled(&self, t: u64) -> Vec<usize> {
        self.cfg
            .ues_per_operator
            .iter()
            .map(|&k| (t % k as u64) as usize)
            .collect()
    }

    /// Draws the channels of every scheduled UE for slot `t`.
    fn draw_channels(&self, t: u64, ues: &[usize]) -> Result<Vec<UeChannel>> {
        let cfg = &self.cfg;
        let m = cfg.num_operators;
        let mut rng = self.slot_rng(t);
        let mut inband = Vec::with_capacity(m);
        for (op, &ue) in ues.iter().enumerate() {
            let link = sample_link(
                &mut rng,
                cfg.elements_per_irs[op],
                cfg.paths[op][ue][op],
                self.betas[op][ue][op],
                AngleConstraint::Free,
            )?;
            inband.push(link);
        }
        let aligned_angle: Vec<usize> = inband
            .iter()
            .map(|l: &IrsLink| l.paths[l.strongest()].angle_index)
            .collect();
        let flags = cfg.condition.map(pair_flags);
        let mut channels = Vec::with_capacity(m);
        for (op, (&ue, own)) in ues.iter().zip(inband).enumerate() {
            let mut own = Some(own);
            let mut links = Vec::with_capacity(m);
            for (p, &angle) in aligned_angle.iter().enumerate() {
                if p == op {
                    links.push(own.take().expect("in-band link used once"));
                    continue;
                }
                let constraint = match flags {
                    Some((k, q)) => {
                        let want = if op == 0 { k } else { q };
                        if want {
                            AngleConstraint::Include(angle)
                        } else {
                            AngleConstraint::Exclude(angle)
                        }
                    }
                    None => AngleConstraint::Free,
                };
                links.push(sample_link(
                    &mut rng,
                    cfg.elements_per_irs[p],
                    cfg.paths[op][ue][p],
                    self.betas[op][ue][p],
                    constraint,
                )?);
            }
            channels.push(UeChannel::new(links, op)?);
        }
        Ok(channels)
    }

    /// Runs slot `t`: schedules, draws, aligns, picks overall phases, measures SE.
    pub fn run_slot(&self, t: u64) -> Result<SlotOutcome> {
        let ues = self.scheduled(t);
        let channels = self.draw_channels(t, &ues)?;
        let mut settings = channels
            .iter()
            .enumerate()
            .map(|(op, ch)| configure_inband(ch, op, 0.0))
            .collect::<Result<Vec<IrsSetting>>>()?;
        let m = self.cfg.num_operators;
        let policy = &self.cfg.scheme;
        let owner = (policy.kind == SchemeKind::TimeShare)
            .then(|| time_share_owner(policy.zeta, t, m));

        let outcomes = if m == 2 {
            let (ok, oq) =
                detect_alignment_pair(&channels[0], &channels[1], &settings[0], &settings[1]);
            let mag = |ch: &UeChannel, irs: IrsId, idx: usize| {
                ch.links[irs].amplitude() * ch.links[irs].paths[idx].product().norm()
            };
            let alpha = mag(&channels[0], 0, channels[0].dominant);
            let delta = mag(&channels[1], 1, channels[1].dominant);
            let gamma = ok.aligned_oob.get(&1).map_or(0.0, |&i| mag(&channels[0], 1, i));
            let beta = oq.aligned_oob.get(&0).map_or(0.0, |&i| mag(&channels[1], 0, i));
            let terms = EffectiveChannelTerms::new(
                alpha,
                gamma,
                beta,
                delta,
                ok.offset(1).unwrap_or(0.0),
                oq.offset(0).unwrap_or(0.0),
                self.cfg.snr,
            )?;
            let (phi1, phi2) =
                choose_overall_phases(policy, ok.event_label, &terms, owner.unwrap_or(0))?;
            settings[0].overall_phase = phi1;
            settings[1].overall_phase = phi2;
            vec![ok, oq]
        } else {
            let outcomes: Vec<_> = channels
                .iter()
                .map(|ch| detect_alignment(ch, &settings))
                .collect();
            let o = owner.unwrap_or(0);
            let offsets: Vec<Option<f64>> = (0..m).map(|p| outcomes[o].offset(p)).collect();
            let phases = multi_operator_phases(policy, o, &offsets)?;
            for (s, phi) in settings.iter_mut().zip(phases) {
                s.overall_phase = phi;
            }
            outcomes
        };

        let snr = self.cfg.snr;
        let mut out = Vec::with_capacity(m);
        for (op, (ch, al)) in channels.iter().zip(&outcomes).enumerate() {
            let h = scalar_channel(ch, &settings)?;
            let link = &ch.links[op];
            let inband_mag = link.amplitude() * ch.dominant_path().product().norm();
            let oob_mags: BTreeMap<IrsId, f64> = al
                .aligned_oob
                .iter()
                .map(|(&p, &i)| (p, ch.links[p].amplitude() * ch.links[p].paths[i].product().norm()))
                .collect();
            let coherent = !oob_mags.is_empty()
                && al.phase_offsets.iter().all(|(&p, &off)| {
                    let rel = settings[p].overall_phase + off - settings[op].overall_phase;
                    wrap_phase(rel).abs() < 1e-9
                });
            let gain = h.norm_sqr();
            if !gain.is_finite() {
                return Err(Error::NonFinite);
            }
            out.push(UeSlot {
                op,
                ue: ues[op],
                se: log2_1p(snr * gain),
                no_oob_se: log2_1p(snr * inband_mag * inband_mag),
                gain,
                event: al.event_label,
                inband_mag,
                oob_mags,
                offsets: al.phase_offsets.clone(),
                coherent,
            });
        }
        Ok(SlotOutcome { t, owner, ues: out })
    }

    /// Runs every slot and assembles the report.
    pub fn run(&self) -> Result<RateReport> {
        let slots = self.cfg.slots;
        let chunks = slots.div_ceil(CHUNK);
        let parts = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = Accumulator::default();
                for t in c * CHUNK..((c + 1) * CHUNK).min(slots) {
                    acc.push(&self.run_slot(t)?);
                }
                Ok(acc)
            })
            .collect::<Result<Vec<Accumulator>>>()?;
        let mut acc = Accumulator::default();
        for p in parts {
            acc.merge(p);
        }
        self.report(acc)
    }

    fn report(&self, acc: Accumulator) -> Result<RateReport> {
        let m = self.cfg.num_operators;
        let slots = self.cfg.slots;
        let snr = self.cfg.snr;
        let mut se = vec![Moments::default(); m];
        let mut no_oob = vec![0.0; m];
        let mut jensen = vec![0.0; m];
        let mut events = vec![BTreeMap::new(); m];
        let mut comparisons = Vec::with_capacity(acc.cells.len());
        let sides = if m == 2 { Some(self.side_budgets()?) } else { None };
        for (key, c) in &acc.cells {
            se[key.op].merge(&c.se);
            no_oob[key.op] += c.no_oob_se.sum;
            let j = log2_1p(snr * c.gain.mean());
            jensen[key.op] += j * c.gain.count as f64;
            *events[key.op].entry(key.event).or_insert(0) += c.se.count;
            let closed_form_se = match &sides {
                Some(s) => self.cell_closed_form(&s[key.op][key.ue], key)?,
                None => None,
            };
            // Joint optimization under event A phases neither UE fully, so the cross
            // term has no factorized form there.
            let single_oob = !matches!(key.event, EventLabel::Multi(k) if k > 1)
                && !(self.cfg.scheme.kind == SchemeKind::JointOpt && key.event == EventLabel::A);
            let full = c.coherent_slots == c.se.count;
            let factorization = (single_oob && (full || c.coherent_slots == 0))
                .then(|| c.cross.factorization_residual(full));
            comparisons.push(CellComparison {
                key: *key,
                count: c.se.count,
                se: c.se.mean(),
                jensen_se: j,
                closed_form_se,
                factorization,
            });
        }
        let n = slots as f64;
        let (analytic_se, analytic_no_oob_se) = self.analytic()?;
        let per_operator_se: Vec<f64> = se.iter().map(|s| s.mean()).collect();
        let rel_error = per_operator_se
            .iter()
            .zip(&analytic_se)
            .map(|(e, a)| if *a > 0.0 { (e - a).abs() / a } else { (e - a).abs() })
            .collect();
        Ok(RateReport {
            slots,
            per_operator_se_stderr: se.iter().map(|s| s.std_error()).collect(),
            per_operator_se,
            per_operator_no_oob_se: no_oob.iter().map(|s| s / n).collect(),
            per_operator_jensen_se: jensen.iter().map(|s| s / n).collect(),
            per_event_counts: events,
            analytic_se,
            analytic_no_oob_se,
            rel_error,
            cells: acc.cells,
            comparisons,
        })
    }

    /// Closed-form conditional SE of one two-operator cell, if the scheme has one.
    fn cell_closed_form(&self, side: &SideBudget, key: &CellKey) -> Result<Option<f64>> {
        if self.cfg.snr == 0.0 {
            return Ok(Some(0.0));
        }
        let (k_aligned, q_aligned) = pair_flags(key.event);
        let aligned = if key.op == 0 { k_aligned } else { q_aligned };
        let kind = self.cfg.scheme.kind;
        if kind == SchemeKind::JointOpt && key.event == EventLabel::A {
            return Ok(None);
        }
        let own_share = match key.owner {
            Some(o) if o == key.op => 1.0,
            Some(_) => 0.0,
            None => 1.0,
        };
        Ok(Some(ue_event_se(side, aligned, kind, own_share)?))
    }

    /// Closed-form operator SEs with and without the OOB IRSs for the placed UEs.
    fn analytic(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let cfg = &self.cfg;
        let m = cfg.num_operators;
        if cfg.snr == 0.0 {
            return Ok((vec![0.0; m], vec![0.0; m]));
        }
        let kind = cfg.scheme.kind;
        let zeta = cfg.scheme.zeta;
        if m == 2 {
            let sides = self.side_budgets()?;
            let no_oob = sides
                .iter()
                .map(|s| crate::rates::operator_no_oob_se(s))
                .collect::<Result<Vec<_>>>()?;
            let se = match cfg.condition {
                None => {
                    let (x, y) = theorem1_sum_se(&cfg.scheme, &sides[0], &sides[1])?;
                    vec![x, y]
                }
                Some(ev) => {
                    let (k_aligned, q_aligned) = pair_flags(ev);
                    let share = match kind {
                        SchemeKind::TimeShare => [zeta, 1.0 - zeta],
                        SchemeKind::JointOpt => [1.0, 1.0],
                        SchemeKind::NoCoop => [0.0, 0.0],
                    };
                    let mut v = Vec::with_capacity(2);
                    for (op, aligned) in [(0, k_aligned), (1, q_aligned)] {
                        let mut acc = 0.0;
                        for s in &sides[op] {
                            acc += ue_event_se(s, aligned, kind, share[op])?;
                        }
                        v.push(acc / sides[op].len() as f64);
                    }
                    v
                }
            };
            return Ok((se, no_oob));
        }
        let co = kind != SchemeKind::NoCoop;
        let mut se = Vec::with_capacity(m);
        let mut no_oob = Vec::with_capacity(m);
        for op in 0..m {
            let share = match kind {
                SchemeKind::TimeShare if op == 0 => zeta,
                SchemeKind::TimeShare => (1.0 - zeta) / (m - 1) as f64,
                _ => 0.0,
            };
            let (mut a, mut b) = (0.0, 0.0);
            for (ue, beta) in self.betas[op].iter().enumerate() {
                let budget = MultiMoBudget {
                    m_ops: m,
                    n: cfg.elements_per_irs[op],
                    l: cfg.paths[op][ue][op],
                    beta: beta[op],
                    snr: cfg.snr,
                    zeta1: share,
                    co,
                };
                a += theorem3_multi_mo_rate(&budget)?;
                b += crate::rates::multi_mo_no_oob_rate(&budget)?;
            }
            let k = self.betas[op].len() as f64;
            se.push(a / k);
            no_oob.push(b / k);
        }
        Ok((se, no_oob))
    }
}

/// Validates, places UEs, and runs every slot of `cfg`.
pub fn run_campaign(cfg: &SystemConfig) -> Result<RateReport> {
    Campaign::new(cfg.clone())?.run()
}

/// Sweepable configuration field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Elements of every IRS.
    N,
    /// Elements of IRS 1; path counts through it are clamped to the new size.
    N2,
    /// Linear transmit SNR.
    Snr,
    Zeta,
    /// Joint-optimization weight `w_k`, with `w_q = 1 − w_k`.
    Weights,
    /// Number of operators; the template's lists are truncated.
    M,
    /// Every path count.
    L,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            Self::N => "N",
            Self::N2 => "N2",
            Self::Snr => "snr",
            Self::Zeta => "zeta",
            Self::Weights => "weights",
            Self::M => "M",
            Self::L => "L",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "N" => Self::N,
            "N2" => Self::N2,
            "snr" => Self::Snr,
            "zeta" => Self::Zeta,
            "weights" => Self::Weights,
            "M" => Self::M,
            "L" => Self::L,
            _ => {
                return Err(invalid(
                    "axis",
                    format!("unknown axis `{s}`; expected one of N, N2, snr, zeta, weights, M, L"),
                ))
            }
        })
    }
}

fn as_count(axis: SweepAxis, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(invalid("sweep", format!("axis {} needs a positive integer, got {v}", axis.name())))
    }
}

/// The template with one field set to `value`.
pub fn apply_axis(template: &SystemConfig, axis: SweepAxis, value: f64) -> Result<SystemConfig> {
    let mut c = template.clone();
    match axis {
        SweepAxis::N => {
            let n = as_count(axis, value)?;
            c.elements_per_irs.iter_mut().for_each(|e| *e = n);
        }
        SweepAxis::N2 => {
            let n = as_count(axis, value)?;
            c.elements_per_irs[1] = n;
            for row in c.paths.iter_mut().flatten() {
                row[1] = row[1].min(n);
            }
        }
        SweepAxis::Snr => c.snr = value,
        SweepAxis::Zeta => {
            if c.scheme.kind != SchemeKind::TimeShare {
                return Err(invalid("sweep", "zeta axis needs the time-sharing scheme"));
            }
            c.scheme.zeta = value;
        }
        SweepAxis::Weights => {
            if c.scheme.kind != SchemeKind::JointOpt {
                return Err(invalid("sweep", "weights axis needs the joint-optimization scheme"));
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(invalid("weights", format!("w_k must lie in [0, 1], got {value}")));
            }
            c.scheme.weights = (value, 1.0 - value);
        }
        SweepAxis::M => {
            let m = as_count(axis, value)?;
            if m > template.num_operators {
                return Err(invalid(
                    "sweep",
                    format!("template describes {} operators, cannot grow to {m}", template.num_operators),
                ));
            }
            c.num_operators = m;
            c.elements_per_irs.truncate(m);
            c.ues_per_operator.truncate(m);
            c.paths.truncate(m);
            c.paths.iter_mut().flatten().for_each(|row| row.truncate(m));
            c.geometry.bs_positions.truncate(m);
            c.geometry.irs_positions.truncate(m);
        }
        SweepAxis::L => {
            let l = as_count(axis, value)?;
            c.paths.iter_mut().flatten().flatten().for_each(|x| *x = l);
        }
    }
    Ok(c)
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub config: SystemConfig,
    pub report: RateReport,
}

/// Runs one campaign per value; value `i` uses campaign id `template.campaign_id + i`.
pub fn sweep(template: &SystemConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepPoint>> {
    let configs = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut c = apply_axis(template, axis, v)?;
            c.campaign_id = template.campaign_id.wrapping_add(i as u64);
            c.validate()?;
            Ok((v, c))
        })
        .collect::<Result<Vec<_>>>()?;
    configs
        .into_par_iter()
        .map(|(value, config)| {
            let report = run_campaign(&config)?;
            Ok(SweepPoint {
                value,
                config,
                report,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests;
