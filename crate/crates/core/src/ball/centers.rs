use crate::error::{Error, Result};
use crate::geom::{affine_circumcenter, Point3, Tolerance};

/// Labeled centers of the unit balls generating a ball-polyhedron.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSet {
    centers: Vec<Point3>,
    labels: Vec<String>,
    tol: Tolerance,
}

impl CenterSet {
    pub fn new(centers: Vec<Point3>, labels: Option<Vec<String>>, tol: Tolerance) -> Result<Self> {
        tol.validate()?;
        if centers.is_empty() {
            return Err(Error::InvalidCenterSet("no centers".into()));
        }
        if let Some((i, _)) = centers
            .iter()
            .enumerate()
            .find(|(_, c)| !c.iter().all(|x| x.is_finite()))
        {
            return Err(Error::InvalidCenterSet(format!("center {i} has a non-finite coordinate")));
        }
        let labels = match labels {
            Some(l) if l.len() != centers.len() => {
                return Err(Error::InvalidCenterSet(format!(
                    "{} labels for {} centers",
                    l.len(),
                    centers.len()
                )))
            }
            Some(l) => l,
            None => (0..centers.len()).map(|i| format!("c{i}")).collect(),
        };
        let mut sorted = labels.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidCenterSet(format!("duplicate label {:?}", w[0])));
        }
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                if (centers[i] - centers[j]).norm() <= tol.eps_geom {
                    return Err(Error::InvalidCenterSet(format!(
                        "centers {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(Self { centers, labels, tol })
    }

    pub fn from_points(centers: Vec<Point3>) -> Result<Self> {
        Self::new(centers, None, Tolerance::default())
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Point3] {
        &self.centers
    }

    pub fn center(&self, i: usize) -> &Point3 {
        &self.centers[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Result<Self> {
        tol.validate()?;
        self.tol = tol;
        Ok(self)
    }

    /// Sub-family keeping the given indices in the given order.
    pub fn subset(&self, keep: &[usize]) -> CenterSet {
        CenterSet {
            centers: keep.iter().map(|&i| self.centers[i]).collect(),
            labels: keep.iter().map(|&i| self.labels[i].clone()).collect(),
            tol: self.tol,
        }
    }

    /// Copy with every center mapped through `f`; labels and tolerance kept.
    pub fn map_points(&self, f: impl Fn(&Point3) -> Point3) -> Result<CenterSet> {
        CenterSet::new(self.centers.iter().map(f).collect(), Some(self.labels.clone()), self.tol)
    }

    /// Copy with new positions; labels and tolerance kept.
    pub fn with_points(&self, centers: Vec<Point3>) -> Result<CenterSet> {
        CenterSet::new(centers, Some(self.labels.clone()), self.tol)
    }

    /// Largest distance from `x` to any center.
    pub fn max_distance(&self, x: &Point3) -> f64 {
        self.centers.iter().map(|c| (x - c).norm()).fold(0.0, f64::max)
    }

    /// Whether `x` lies in every ball, allowing `slack` beyond the unit radius.
    pub fn contains(&self, x: &Point3, slack: f64) -> bool {
        self.centers.iter().all(|c| (x - c).norm() <= 1.0 + slack)
    }

    /// Whether B(C) contains an open ball of radius `eps_geom`.
    ///
    /// The best interior point is the center of the minimum enclosing ball of
    /// the centers; its clearance is `1 − radius`.
    pub fn has_interior(&self) -> bool {
        let (_, r) = min_enclosing_ball(&self.centers);
        1.0 - r > self.tol.eps_geom
    }
}

/// Minimum enclosing ball of a small point set, by enumerating every support
/// set of one to four points.
pub fn min_enclosing_ball(points: &[Point3]) -> (Point3, f64) {
    let n = points.len();
    let fits = |c: &Point3, r: f64| points.iter().all(|p| (p - c).norm() <= r * (1.0 + 1e-12) + 1e-15);
    let mut best: Option<(Point3, f64)> = None;
    let mut consider = |support: &[Point3]| {
        if let Some((c, r)) = affine_circumcenter(support) {
            if best.as_ref().is_none_or(|b| r < b.1) && fits(&c, r) {
                best = Some((c, r));
            }
        }
    };
    for a in 0..n {
        consider(&[points[a]]);
        for b in a + 1..n {
            consider(&[points[a], points[b]]);
            for c in b + 1..n {
                consider(&[points[a], points[b], points[c]]);
                for d in c + 1..n {
                    consider(&[points[a], points[b], points[c], points[d]]);
                }
            }
        }
    }
    best.unwrap_or((Point3::zeros(), 0.0))
}
