//! Surface data model, closed-form cone and cusp geometry, degenerating
//! families and the Hecke family generator.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order of a cone point; `Infinite` stands for the cusp obtained in the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeOrder {
    Finite(u64),
    Infinite,
}

impl fmt::Display for ConeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeOrder::Finite(q) => write!(f, "{q}"),
            ConeOrder::Infinite => write!(f, "inf"),
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("eps must be positive, got {eps}")))
    }
}

/// Area of the cone neighbourhood of parameter ε.
pub fn cone_volume(q: ConeOrder, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    match q {
        ConeOrder::Finite(q) if q < 2 => Err(Error::domain(format!("cone order must be >= 2, got {q}"))),
        ConeOrder::Finite(_) => Ok(eps),
        ConeOrder::Infinite => Ok(eps / 2.0),
    }
}

/// Length of the boundary circle of the cone neighbourhood.
pub fn cone_boundary_length(q: ConeOrder, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    match q {
        ConeOrder::Finite(0) => Err(Error::domain("cone order must be positive")),
        ConeOrder::Finite(q) => Ok((4.0 * PI * eps / q as f64 + eps * eps).sqrt()),
        ConeOrder::Infinite => Ok(eps / 2.0),
    }
}

/// Hyperbolic distance between the boundaries of two nested cone
/// neighbourhoods. The order is taken formally, so q = 1 is accepted.
pub fn cone_annulus_distance(q: ConeOrder, eps1: f64, eps2: f64) -> Result<f64> {
    check_eps(eps1)?;
    check_eps(eps2)?;
    if eps1 > eps2 {
        return Err(Error::domain(format!("need eps1 <= eps2, got {eps1} > {eps2}")));
    }
    if eps1 == eps2 {
        return Ok(0.0);
    }
    match q {
        ConeOrder::Finite(0) => Err(Error::domain("cone order must be positive")),
        ConeOrder::Finite(q) => {
            let q = q as f64;
            let arg = |e: f64| e * q + 2.0 * PI + (e * q * (4.0 * PI + e * q)).sqrt();
            Ok((arg(eps2) / arg(eps1)).ln())
        }
        ConeOrder::Infinite => Ok((eps2 / eps1).ln()),
    }
}

/// 2g − 2 + p + Σ(1 − 1/q).
pub fn euler_characteristic_defect(genus: u32, cusps: u32, orders: &[u64]) -> f64 {
    let mut chi = 2.0 * genus as f64 - 2.0 + cusps as f64;
    for &q in orders {
        chi += 1.0 - 1.0 / q as f64;
    }
    chi
}

/// Orbifold Gauss–Bonnet area.
pub fn gauss_bonnet_volume(genus: u32, cusps: u32, orders: &[u64]) -> Result<f64> {
    if let Some(&q) = orders.iter().find(|&&q| q < 2) {
        return Err(Error::invariant(format!("elliptic order {q} is below 2")));
    }
    let chi = euler_characteristic_defect(genus, cusps, orders);
    if chi <= 0.0 {
        return Err(Error::Signature(chi));
    }
    Ok(2.0 * PI * chi)
}

/// One conjugacy class of primitive closed geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    #[serde(rename = "l")]
    pub length: f64,
    #[serde(rename = "mult", default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

impl Geodesic {
    pub fn new(length: f64, multiplicity: u32) -> Self {
        Geodesic {
            length,
            multiplicity,
        }
    }
}

/// On-disk form of a surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub genus: u32,
    pub cusps: u32,
    #[serde(default)]
    pub elliptic_orders: Vec<u64>,
    #[serde(default)]
    pub degenerating: Vec<usize>,
    #[serde(default)]
    pub lengths: Vec<Geodesic>,
    #[serde(default)]
    pub small_eigenvalues: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cusp_widths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
}

/// A validated model surface: signature, length spectrum, small eigenvalues
/// and the subset of cone points that degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceData {
    genus: u32,
    cusps: u32,
    elliptic_orders: Vec<u64>,
    degenerating: Vec<usize>,
    lengths: Vec<Geodesic>,
    small_eigenvalues: Vec<f64>,
    cusp_widths: Option<Vec<f64>>,
    volume: f64,
}

impl SurfaceData {
    /// Validates and canonicalizes; lengths and small eigenvalues are sorted.
    pub fn new(
        genus: u32,
        cusps: u32,
        elliptic_orders: Vec<u64>,
        degenerating: Vec<usize>,
        lengths: Vec<Geodesic>,
        small_eigenvalues: Vec<f64>,
    ) -> Result<Self> {
        Self::from_file(SurfaceFile {
            genus,
            cusps,
            elliptic_orders,
            degenerating,
            lengths,
            small_eigenvalues,
            cusp_widths: None,
            volume: None,
        })
    }

    pub fn from_file(file: SurfaceFile) -> Result<Self> {
        let SurfaceFile {
            genus,
            cusps,
            elliptic_orders,
            mut degenerating,
            mut lengths,
            mut small_eigenvalues,
            cusp_widths,
            volume,
        } = file;
        for (i, &q) in elliptic_orders.iter().enumerate() {
            if q < 2 {
                return Err(Error::invariant(format!(
                    "elliptic_orders[{i}] = {q}: every order must be an integer >= 2"
                )));
            }
        }
        degenerating.sort_unstable();
        for w in degenerating.windows(2) {
            if w[0] == w[1] {
                return Err(Error::invariant(format!("degenerating index {} listed twice", w[0])));
            }
        }
        if let Some(&i) = degenerating.iter().find(|&&i| i >= elliptic_orders.len()) {
            return Err(Error::invariant(format!(
                "degenerating index {i} is not an index into elliptic_orders (len {})",
                elliptic_orders.len()
            )));
        }
        for (i, g) in lengths.iter().enumerate() {
            if !(g.length > 0.0 && g.length.is_finite()) {
                return Err(Error::invariant(format!("lengths[{i}].l = {} must be positive", g.length)));
            }
            if g.multiplicity == 0 {
                return Err(Error::invariant(format!("lengths[{i}].mult must be >= 1")));
            }
        }
        lengths.sort_by(|a, b| a.length.total_cmp(&b.length));
        for (i, &lam) in small_eigenvalues.iter().enumerate() {
            if !(0.0..0.25).contains(&lam) {
                return Err(Error::invariant(format!(
                    "small_eigenvalues[{i}] = {lam} must lie in [0, 1/4)"
                )));
            }
        }
        small_eigenvalues.sort_by(f64::total_cmp);
        if let Some(widths) = &cusp_widths {
            if let Some(w) = widths.iter().find(|w| !(**w > 0.0)) {
                return Err(Error::invariant(format!("cusp width {w} must be positive")));
            }
        }
        let computed = gauss_bonnet_volume(genus, cusps, &elliptic_orders)?;
        if let Some(v) = volume {
            if ((v - computed) / computed).abs() > 1e-9 {
                return Err(Error::invariant(format!(
                    "volume {v} disagrees with the Gauss-Bonnet value {computed}"
                )));
            }
        }
        Ok(SurfaceData {
            genus,
            cusps,
            elliptic_orders,
            degenerating,
            lengths,
            small_eigenvalues,
            cusp_widths,
            volume: computed,
        })
    }

    pub fn to_file(&self) -> SurfaceFile {
        SurfaceFile {
            genus: self.genus,
            cusps: self.cusps,
            elliptic_orders: self.elliptic_orders.clone(),
            degenerating: self.degenerating.clone(),
            lengths: self.lengths.clone(),
            small_eigenvalues: self.small_eigenvalues.clone(),
            cusp_widths: self.cusp_widths.clone(),
            volume: Some(self.volume),
        }
    }

    pub fn with_cusp_widths(mut self, widths: Vec<f64>) -> Result<Self> {
        if let Some(w) = widths.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::invariant(format!("cusp width {w} must be positive")));
        }
        self.cusp_widths = Some(widths);
        Ok(self)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }
    pub fn cusps(&self) -> u32 {
        self.cusps
    }
    pub fn elliptic_orders(&self) -> &[u64] {
        &self.elliptic_orders
    }
    pub fn degenerating_indices(&self) -> &[usize] {
        &self.degenerating
    }
    pub fn lengths(&self) -> &[Geodesic] {
        &self.lengths
    }
    pub fn small_eigenvalues(&self) -> &[f64] {
        &self.small_eigenvalues
    }
    pub fn cusp_widths(&self) -> Option<&[f64]> {
        self.cusp_widths.as_deref()
    }
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn degenerating_orders(&self) -> Vec<u64> {
        self.degenerating.iter().map(|&i| self.elliptic_orders[i]).collect()
    }

    pub fn fixed_orders(&self) -> Vec<u64> {
        self.elliptic_orders
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.degenerating.contains(i))
            .map(|(_, &q)| q)
            .collect()
    }

    /// log Π q over the degenerating cone points.
    pub fn log_q(&self) -> f64 {
        self.degenerating_orders().iter().map(|&q| (q as f64).ln()).sum()
    }

    /// κ = p + number of cone points.
    pub fn kappa(&self) -> usize {
        self.cusps as usize + self.elliptic_orders.len()
    }

    /// 2π(2g − 2 + κ), the area bound for the signature.
    pub fn volume_bound(&self) -> f64 {
        2.0 * PI * (2.0 * self.genus as f64 - 2.0 + self.kappa() as f64)
    }

    pub fn shortest_length(&self) -> Option<f64> {
        self.lengths.first().map(|g| g.length)
    }

    /// Copy with the degenerating cone points reassigned (in index order);
    /// the area is recomputed.
    pub fn with_degenerating_orders(&self, orders: &[u64]) -> Result<Self> {
        if orders.len() != self.degenerating.len() {
            return Err(Error::invariant(format!(
                "schedule entry has {} orders but the surface degenerates {} cone points",
                orders.len(),
                self.degenerating.len()
            )));
        }
        let mut file = self.to_file();
        file.volume = None;
        for (&i, &q) in self.degenerating.iter().zip(orders) {
            file.elliptic_orders[i] = q;
        }
        SurfaceData::from_file(file)
    }
}

/// A template surface with a schedule of orders for its degenerating cone
/// points.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneratingFamily {
    template: SurfaceData,
    schedule: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub template: SurfaceFile,
    pub schedule: Vec<Vec<u64>>,
}

impl DegeneratingFamily {
    pub fn new(template: SurfaceData, schedule: Vec<Vec<u64>>) -> Result<Self> {
        if schedule.is_empty() {
            return Err(Error::invariant("schedule is empty"));
        }
        let width = template.degenerating.len();
        for (k, entry) in schedule.iter().enumerate() {
            if entry.len() != width {
                return Err(Error::invariant(format!(
                    "schedule[{k}] has {} orders, expected {width}",
                    entry.len()
                )));
            }
            if let Some(&q) = entry.iter().find(|&&q| q < 2) {
                return Err(Error::invariant(format!("schedule[{k}] contains order {q} < 2")));
            }
            if k > 0 && entry.iter().zip(&schedule[k - 1]).any(|(a, b)| a < b) {
                return Err(Error::invariant(format!(
                    "schedule[{k}] = {entry:?} does not dominate schedule[{}] = {:?}",
                    k - 1,
                    schedule[k - 1]
                )));
            }
        }
        Ok(DegeneratingFamily { template, schedule })
    }

    /// Single degenerating cone with orders `qs` on top of `template`, which
    /// must degenerate exactly one cone point.
    pub fn single_cone(template: SurfaceData, qs: &[u64]) -> Result<Self> {
        Self::new(template, qs.iter().map(|&q| vec![q]).collect())
    }

    pub fn template(&self) -> &SurfaceData {
        &self.template
    }
    pub fn schedule(&self) -> &[Vec<u64>] {
        &self.schedule
    }
    pub fn len(&self) -> usize {
        self.schedule.len()
    }
    pub fn is_empty(&self) -> bool {
        self.schedule.is_empty()
    }

    pub fn member(&self, k: usize) -> Result<SurfaceData> {
        self.template.with_degenerating_orders(&self.schedule[k])
    }

    pub fn members(&self) -> Result<Vec<SurfaceData>> {
        (0..self.len()).map(|k| self.member(k)).collect()
    }

    /// log Π q for every schedule entry.
    pub fn log_q(&self) -> Vec<f64> {
        self.schedule
            .iter()
            .map(|e| e.iter().map(|&q| (q as f64).ln()).sum())
            .collect()
    }

    pub fn from_file(file: FamilyFile) -> Result<Self> {
        Self::new(SurfaceData::from_file(file.template)?, file.schedule)
    }

    pub fn to_file(&self) -> FamilyFile {
        FamilyFile {
            template: self.template.to_file(),
            schedule: self.schedule.clone(),
        }
    }
}

/// Which elliptic signature the Hecke generator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum HeckeSignature {
    /// Cone points of orders 2, 3 and N plus one cusp, as the family is
    /// commonly described in the degeneration literature.
    #[default]
    TwoThreeN,
    /// The triangle-group signature: orders 2 and N plus one cusp.
    TwoN,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeckeFamily {
    pub family: DegeneratingFamily,
    /// True for N ∈ {3, 4, 6}, where the group is arithmetic.
    pub arithmetic: Vec<bool>,
}

pub fn hecke_is_arithmetic(n: u64) -> bool {
    matches!(n, 3 | 4 | 6)
}

/// Genus zero, one cusp, degenerating cone of order N for each N in the list.
pub fn hecke_family(n_list: &[u64], signature: HeckeSignature) -> Result<HeckeFamily> {
    if n_list.is_empty() {
        return Err(Error::domain("N list is empty"));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n < 3) {
        return Err(Error::domain(format!("Hecke index N must be >= 3, got {n}")));
    }
    let first = n_list[0];
    let (orders, index) = match signature {
        HeckeSignature::TwoThreeN => (vec![2, 3, first], 2),
        HeckeSignature::TwoN => (vec![2, first], 1),
    };
    let template = SurfaceData::new(0, 1, orders, vec![index], vec![], vec![])?;
    let family = DegeneratingFamily::single_cone(template, n_list)?;
    Ok(HeckeFamily {
        family,
        arithmetic: n_list.iter().map(|&n| hecke_is_arithmetic(n)).collect(),
    })
}

fn io_err(path: &Path, e: impl fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn parse_err(path: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{path}: line {}, column {}: {e}", e.line(), e.column()))
}

pub fn parse_surface(text: &str) -> Result<SurfaceData> {
    let file: SurfaceFile = serde_json::from_str(text).map_err(|e| parse_err("<input>", e))?;
    SurfaceData::from_file(file)
}

pub fn load_surface(path: impl AsRef<Path>) -> Result<SurfaceData> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: SurfaceFile =
        serde_json::from_str(&text).map_err(|e| parse_err(&path.display().to_string(), e))?;
    SurfaceData::from_file(file)
}

pub fn surface_to_json(surface: &SurfaceData) -> String {
    serde_json::to_string_pretty(&surface.to_file()).expect("surface data is always serializable")
}

pub fn save_surface(surface: &SurfaceData, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, surface_to_json(surface) + "\n").map_err(|e| io_err(path, e))
}

pub fn parse_family(text: &str) -> Result<DegeneratingFamily> {
    let file: FamilyFile = serde_json::from_str(text).map_err(|e| parse_err("<input>", e))?;
    DegeneratingFamily::from_file(file)
}

pub fn load_family(path: impl AsRef<Path>) -> Result<DegeneratingFamily> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: FamilyFile =
        serde_json::from_str(&text).map_err(|e| parse_err(&path.display().to_string(), e))?;
    DegeneratingFamily::from_file(file)
}

pub fn save_family(family: &DegeneratingFamily, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&family.to_file()).expect("family data is always serializable");
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}
