//! Sparse cascaded BS→IRS→UE channels on the discrete resolvable anglebook.
//!
//! Every cascaded path angle lives on the `N`-point grid `{−1 + 2i/N}` of the IRS, so
//! an IRS steered to grid angle `ω` reflects energy only into the path at `ω`. The
//! simulator therefore never forms `N`-element vectors: [`scalar_channel`] evaluates
//! the array inner products through exact grid orthogonality.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::irs::IrsSetting;
use crate::specfun::check_paths;

/// Index of an IRS; IRS `m` is owned by operator `m`.
pub type IrsId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(
            rng.random_range(self.min.x..self.max.x),
            rng.random_range(self.min.y..self.max.y),
        )
    }
}

/// Deployment geometry and the path-loss law `β = C₀ (d₀/d)^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub bs_positions: Vec<Point>,
    pub irs_positions: Vec<Point>,
    pub ue_region: Rect,
    pub c0_db: f64,
    pub d0: f64,
    pub alpha: f64,
}

impl Geometry {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // negated so NaN is rejected
    pub fn validate(&self) -> Result<()> {
        if !(self.d0 > 0.0) {
            return Err(Error::Geometry(format!("d0 must be positive, got {}", self.d0)));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::Geometry(format!("alpha must be non-negative, got {}", self.alpha)));
        }
        let r = &self.ue_region;
        if !(r.max.x > r.min.x && r.max.y > r.min.y) {
            return Err(Error::Geometry("ue_region is degenerate".into()));
        }
        if !self.c0_db.is_finite() {
            return Err(Error::Geometry("c0_db must be finite".into()));
        }
        if self.bs_positions.len() != self.irs_positions.len() {
            return Err(Error::Geometry(format!(
                "{} BS positions but {} IRS positions",
                self.bs_positions.len(),
                self.irs_positions.len()
            )));
        }
        Ok(())
    }
}

/// Linear path loss between two points.
pub fn path_loss(g: &Geometry, from: Point, to: Point) -> Result<f64> {
    let d = from.distance(&to);
    if d == 0.0 {
        return Err(Error::ZeroDistance);
    }
    Ok(10f64.powf(g.c0_db / 10.0) * (g.d0 / d).powf(g.alpha))
}

/// The `N` resolvable normalized angles of an `N`-element ULA.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anglebook {
    n: usize,
}

impl Anglebook {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("elements", "IRS must have at least one element"));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn angle(&self, i: usize) -> f64 {
        -1.0 + 2.0 * i as f64 / self.n as f64
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.angle(i)).collect()
    }

    /// Grid index of a normalized angle, if it lies on the grid.
    pub fn index_of(&self, omega: f64) -> Option<usize> {
        let pos = (omega + 1.0) * self.n as f64 / 2.0;
        let i = pos.round();
        ((pos - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < self.n).then_some(i as usize)
    }
}

/// Wraps `phi + psi` into `[−1, 1)`.
pub fn cascade_angle(phi: f64, psi: f64) -> f64 {
    let s = phi + psi;
    if s >= 1.0 {
        s - 2.0
    } else if s < -1.0 {
        s + 2.0
    } else {
        s
    }
}

/// Scaled array response `ȧ_N(ω) = a_N(ω)/√N`, entries `e^{−jπiω}/N`.
pub fn scaled_steering(n: usize, omega: f64) -> Vec<Complex64> {
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|i| Complex64::from_polar(scale, -PI * i as f64 * omega))
        .collect()
}

/// `N · ȧᴴ(ω) ȧ(ω′)` evaluated element by element.
pub fn grid_inner_product(n: usize, omega: f64, omega_prime: f64) -> Complex64 {
    let a = scaled_steering(n, omega);
    let b = scaled_steering(n, omega_prime);
    a.iter().zip(&b).map(|(u, v)| u.conj() * v).sum::<Complex64>() * n as f64
}

/// One resolvable cascaded path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadedPath {
    pub angle_index: usize,
    pub gain_bs_irs: Complex64,
    pub gain_irs_ue: Complex64,
}

impl CascadedPath {
    pub fn product(&self) -> Complex64 {
        self.gain_bs_irs * self.gain_irs_ue
    }
}

/// A UE's cascaded paths through one IRS.
#[derive(Debug, Clone, PartialEq)]
pub struct IrsLink {
    pub elements: usize,
    pub paths: Vec<CascadedPath>,
    pub pathloss: f64,
}

impl IrsLink {
    /// Amplitude scale `√β · N/√L` applied to every path product.
    pub fn amplitude(&self) -> f64 {
        self.pathloss.sqrt() * self.elements as f64 / (self.paths.len() as f64).sqrt()
    }

    pub fn find_angle(&self, angle_index: usize) -> Option<usize> {
        self.paths.iter().position(|p| p.angle_index == angle_index)
    }

    /// Index of the path maximizing `|γ_bs γ_ue|`.
    pub fn strongest(&self) -> usize {
        let mut best = 0;
        let mut best_mag = f64::NEG_INFINITY;
        for (i, p) in self.paths.iter().enumerate() {
            let m = p.product().norm_sqr();
            if m > best_mag {
                best_mag = m;
                best = i;
            }
        }
        best
    }
}

/// Cascaded channel of one UE through every IRS, indexed by IRS id.
#[derive(Debug, Clone, PartialEq)]
pub struct UeChannel {
    pub links: Vec<IrsLink>,
    pub in_band: IrsId,
    /// Path index of the strongest in-band cascaded path.
    pub dominant: usize,
}

impl UeChannel {
    /// Builds a channel and labels its dominant in-band path.
    pub fn new(links: Vec<IrsLink>, in_band: IrsId) -> Result<Self> {
        let link = links.get(in_band).ok_or(Error::UnknownIrs(in_band))?;
        for l in &links {
            check_paths(l.paths.len(), l.elements)?;
        }
        let dominant = link.strongest();
        Ok(Self {
            links,
            in_band,
            dominant,
        })
    }

    pub fn dominant_path(&self) -> &CascadedPath {
        &self.links[self.in_band].paths[self.dominant]
    }
}

/// Restriction on the angle set drawn for one IRS link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleConstraint {
    Free,
    /// The set must contain this grid index.
    Include(usize),
    /// The set must not contain this grid index.
    Exclude(usize),
}

/// Unit-variance circularly-symmetric complex Gaussian draw.
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Draws `l` distinct grid angles and i.i.d. `CN(0,1)` hop gains for one IRS.
///
/// The constraint conditions the angle set: with `Include(i)` the remaining `l − 1`
/// angles are uniform over the other `n − 1`, which is the exact conditional law
/// given that `i` is hit.
pub fn sample_link<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    l: usize,
    beta: f64,
    constraint: AngleConstraint,
) -> Result<IrsLink> {
    check_paths(l, n)?;
    let skip = |i: usize, hole: usize| if i >= hole { i + 1 } else { i };
    let angles: Vec<usize> = match constraint {
        AngleConstraint::Free => index::sample(rng, n, l).into_vec(),
        AngleConstraint::Include(hole) => {
            let mut v = vec![hole];
            v.extend(index::sample(rng, n - 1, l - 1).iter().map(|i| skip(i, hole)));
            v
        }
        AngleConstraint::Exclude(hole) => {
            if l > n - 1 {
                return Err(Error::Unsupported(format!(
                    "cannot avoid angle {hole} with {l} paths on {n} elements"
                )));
            }
            index::sample(rng, n - 1, l).iter().map(|i| skip(i, hole)).collect()
        }
    };
    let paths = angles
        .into_iter()
        .map(|angle_index| CascadedPath {
            angle_index,
            gain_bs_irs: sample_cn(rng),
            gain_irs_ue: sample_cn(rng),
        })
        .collect();
    Ok(IrsLink {
        elements: n,
        paths,
        pathloss: beta,
    })
}

/// Samples a UE's full cascaded channel through every IRS without constraints.
pub fn sample_ue_channel<R: Rng + ?Sized>(
    rng: &mut R,
    elements: &[usize],
    paths: &[usize],
    betas: &[f64],
    in_band: IrsId,
) -> Result<UeChannel> {
    if elements.len() != paths.len() || elements.len() != betas.len() {
        return Err(invalid("paths", "per-IRS lists must have equal length"));
    }
    let links = elements
        .iter()
        .zip(paths)
        .zip(betas)
        .map(|((&n, &l), &b)| sample_link(rng, n, l, b, AngleConstraint::Free))
        .collect::<Result<Vec<_>>>()?;
    UeChannel::new(links, in_band)
}

/// Effective scalar channel `h` of a UE given every IRS's phase state.
///
/// Each IRS contributes `√β_p (N_p/√L_p) γ_bs γ_ue e^{j(conj + φ)}` for the path whose
/// angle equals the IRS's aligned angle, and nothing otherwise.
pub fn scalar_channel(ue: &UeChannel, settings: &[IrsSetting]) -> Result<Complex64> {
    if settings.len() != ue.links.len() {
        return Err(Error::UnknownIrs(settings.len().min(ue.links.len())));
    }
    let mut h = Complex64::new(0.0, 0.0);
    for (p, (link, s)) in ue.links.iter().zip(settings).enumerate() {
        if s.irs_id != p {
            return Err(Error::UnknownIrs(s.irs_id));
        }
        if let Some(l) = link.find_angle(s.aligned_angle_index) {
            let phase = Complex64::from_polar(1.0, s.conj_phase + s.overall_phase);
            h += link.paths[l].product() * phase * link.amplitude();
        }
    }
    Ok(h)
}
