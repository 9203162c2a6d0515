//! Finite point samples of varieties and their CSV form.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, LabError, Result};
use crate::linalg::dist;

/// Closed ball in C^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<Complex64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<Complex64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(LabError::input(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    pub fn origin(n: usize, radius: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n], radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, z: &[Complex64]) -> bool {
        dist(z, &self.center) <= self.radius
    }
}

/// Where a cloud came from and the membership tolerance its residuals obey.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceTag {
    pub description: String,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Vec<Complex64>>,
    residuals: Vec<f64>,
    pub source: SourceTag,
}

impl PointCloud {
    pub fn new(
        points: Vec<Vec<Complex64>>,
        residuals: Vec<f64>,
        source: SourceTag,
    ) -> Result<Self> {
        if points.len() != residuals.len() {
            return Err(LabError::input("points and residuals must align"));
        }
        if let Some(first) = points.first() {
            let n = first.len();
            for p in &points {
                check_dim(n, p.len())?;
            }
        }
        if let Some(r) = residuals
            .iter()
            .find(|r| !(**r >= 0.0) || **r > source.tolerance)
        {
            return Err(LabError::input(format!(
                "residual {r:e} violates the cloud tolerance {:e}",
                source.tolerance
            )));
        }
        Ok(PointCloud {
            points,
            residuals,
            source,
        })
    }

    /// Cloud of exact points (all residuals zero).
    pub fn exact(points: Vec<Vec<Complex64>>, description: impl Into<String>) -> Result<Self> {
        let residuals = vec![0.0; points.len()];
        Self::new(
            points,
            residuals,
            SourceTag {
                description: description.into(),
                tolerance: 0.0,
            },
        )
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient complex dimension (0 for an empty cloud).
    pub fn dim(&self) -> usize {
        self.points.first().map(Vec::len).unwrap_or(0)
    }

    /// Points inside `ball`, residuals carried along.
    pub fn intersect(&self, ball: &Ball) -> PointCloud {
        let (points, residuals) = self
            .points
            .iter()
            .zip(&self.residuals)
            .filter(|(p, _)| ball.contains(p))
            .map(|(p, r)| (p.clone(), *r))
            .unzip();
        PointCloud {
            points,
            residuals,
            source: self.source.clone(),
        }
    }

    /// Image under a map applied pointwise; residuals are kept as is.
    pub fn map_points(&self, f: impl Fn(&[Complex64]) -> Vec<Complex64>) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| f(p)).collect(),
            residuals: self.residuals.clone(),
            source: self.source.clone(),
        }
    }

    /// Header `re_0,im_0,...,re_{n-1},im_{n-1},residual`, one row per point.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let n = self.dim();
        let mut wtr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..n)
            .flat_map(|j| [format!("re_{j}"), format!("im_{j}")])
            .collect();
        header.push("residual".into());
        wtr.write_record(&header).map_err(csv_err)?;
        for (p, r) in self.points.iter().zip(&self.residuals) {
            let mut row: Vec<String> = p
                .iter()
                .flat_map(|c| [format!("{:?}", c.re), format!("{:?}", c.im)])
                .collect();
            row.push(format!("{r:?}"));
            wtr.write_record(&row).map_err(csv_err)?;
        }
        wtr.flush().map_err(|e| LabError::input(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, source: SourceTag) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(csv_err)?.clone();
        let cols = header.len();
        if cols < 3 || cols % 2 == 0 || header.get(cols - 1) != Some("residual") {
            return Err(LabError::input(
                "point cloud CSV needs re_j,im_j pairs and a residual column",
            ));
        }
        for j in 0..(cols - 1) / 2 {
            if header.get(2 * j) != Some(format!("re_{j}").as_str())
                || header.get(2 * j + 1) != Some(format!("im_{j}").as_str())
            {
                return Err(LabError::input(format!(
                    "unexpected CSV header for coordinate {j}"
                )));
            }
        }
        let mut points = Vec::new();
        let mut residuals = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| LabError::input(format!("CSV row {}: {e}", line + 2)))?;
            if vals.len() != cols {
                return Err(LabError::input(format!(
                    "CSV row {} has {} fields",
                    line + 2,
                    vals.len()
                )));
            }
            points.push(
                vals[..cols - 1]
                    .chunks(2)
                    .map(|c| Complex64::new(c[0], c[1]))
                    .collect(),
            );
            residuals.push(vals[cols - 1]);
        }
        let tol = residuals.iter().copied().fold(source.tolerance, f64::max);
        PointCloud::new(
            points,
            residuals,
            SourceTag {
                tolerance: tol,
                ..source
            },
        )
    }
}

fn csv_err(e: csv::Error) -> LabError {
    LabError::input(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_round_trip(pts in prop::collection::vec(prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2), 0..20)) {
            let points: Vec<Vec<Complex64>> = pts.iter().map(|p| p.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).collect();
            let cloud = PointCloud::exact(points, "test").unwrap();
            let mut buf = Vec::new();
            cloud.write_csv(&mut buf).unwrap();
            if cloud.is_empty() {
                return Ok(());
            }
            let back = PointCloud::read_csv(&buf[..], cloud.source.clone()).unwrap();
            prop_assert_eq!(back.points(), cloud.points());
        }
    }

    #[test]
    fn header_is_mandatory() {
        let data = "1.0,2.0,0.0\n";
        assert!(PointCloud::read_csv(
            data.as_bytes(),
            SourceTag {
                description: "x".into(),
                tolerance: 0.0
            }
        )
        .is_err());
    }

    #[test]
    fn residual_above_tolerance_rejected() {
        let r = PointCloud::new(
            vec![vec![Complex64::new(0.0, 0.0)]],
            vec![1e-3],
            SourceTag {
                description: "x".into(),
                tolerance: 1e-9,
            },
        );
        assert!(r.is_err());
    }
}
