//! Named domains and the verification corpus.
//!
//! Builtin names: `square`, `disk` (unit area), `disk:<radius>`,
//! `mgon:<m>` (regular, unit area), `rect:<a>` (sides `a` and `1/a`),
//! `box:<a1,...>` and `poly:<x y; x y; ...>`.

use std::fs;
use std::path::Path;

use shapelab_core::fem::fem_spectrum;
use shapelab_core::geometry::{
    box_summary, disk_summary, polygon_summary, regular_mgon, BoxDomain, ConvexPolygon, DiskDomain, GeometrySummary,
    Point,
};
use shapelab_core::spectrum::{box_spectrum, disk_spectrum, equilateral_side_for_area, equilateral_triangle_spectrum};
use shapelab_core::Spectrum;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Box(BoxDomain),
    Disk(DiskDomain),
    /// Equilateral triangle with the given side; closed-form spectrum.
    Equilateral(ConvexPolygon, f64),
    Polygon(ConvexPolygon),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedDomain {
    pub id: String,
    pub shape: Shape,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("bad {what} `{}`", s.trim())))
}

/// Resolves a builtin name.
pub fn builtin(name: &str) -> Result<NamedDomain, CliError> {
    let name = name.trim();
    let (kind, arg) = match name.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (name, None),
    };
    let shape = match (kind, arg) {
        ("square", None) => Shape::Box(BoxDomain::new(vec![1.0, 1.0])?),
        ("disk", None) => Shape::Disk(DiskDomain::with_area(1.0)?),
        ("disk", Some(r)) => Shape::Disk(DiskDomain::new(number(r, "radius")?)?),
        ("mgon", Some(m)) => {
            let m: usize = number(m, "vertex count")?;
            let p = regular_mgon(m, 1.0)?;
            match m {
                3 => Shape::Equilateral(p, equilateral_side_for_area(1.0)),
                4 => Shape::Box(BoxDomain::new(vec![1.0, 1.0])?),
                _ => Shape::Polygon(p),
            }
        }
        ("rect", Some(a)) => {
            let a: f64 = number(a, "aspect")?;
            if !(a > 0.0) {
                return Err(usage("rect aspect must be positive"));
            }
            Shape::Box(BoxDomain::new(vec![a, 1.0 / a])?)
        }
        ("box", Some(sides)) => Shape::Box(BoxDomain::new(
            sides
                .split(',')
                .map(|s| number(s, "side"))
                .collect::<Result<Vec<f64>, _>>()?,
        )?),
        ("poly", Some(pts)) => {
            let v = pts
                .split(';')
                .map(|pair| {
                    let xy: Vec<&str> = pair.split_whitespace().collect();
                    match xy.as_slice() {
                        [x, y] => Ok(Point::new(number(x, "coordinate")?, number(y, "coordinate")?)),
                        _ => Err(usage(format!("bad vertex `{}`", pair.trim()))),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            Shape::Polygon(ConvexPolygon::new_reoriented(v)?)
        }
        _ => return Err(usage(format!("unknown builtin domain `{name}`"))),
    };
    Ok(NamedDomain {
        id: name.to_string(),
        shape,
    })
}

/// A polygon file in the `shapelab-polygon v1` format.
pub fn polygon_file(path: &Path) -> Result<NamedDomain, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })?;
    Ok(NamedDomain {
        id: path.display().to_string(),
        shape: Shape::Polygon(ConvexPolygon::parse(&text)?),
    })
}

/// A builtin name, or else a polygon file path.
pub fn resolve(spec: &str) -> Result<NamedDomain, CliError> {
    match builtin(spec) {
        Ok(d) => Ok(d),
        Err(e) if Path::new(spec.trim()).is_file() => polygon_file(Path::new(spec.trim())).map_err(|_| e),
        Err(e) => Err(e),
    }
}

impl NamedDomain {
    pub fn summary(&self) -> Result<GeometrySummary, CliError> {
        Ok(match &self.shape {
            Shape::Box(b) => box_summary(b),
            Shape::Disk(d) => disk_summary(d),
            Shape::Equilateral(p, _) | Shape::Polygon(p) => polygon_summary(p)?,
        })
    }

    /// Spectrum below `lambda`: closed form where available, FEM at
    /// relative tolerance `rel_tol` otherwise.
    pub fn spectrum(&self, lambda: f64, rel_tol: f64) -> Result<Spectrum, CliError> {
        Ok(match &self.shape {
            Shape::Box(b) => box_spectrum(b, lambda)?,
            Shape::Disk(d) => disk_spectrum(d, lambda)?,
            Shape::Equilateral(_, side) => equilateral_triangle_spectrum(*side, lambda)?,
            Shape::Polygon(p) => fem_spectrum(p, lambda, rel_tol)?,
        })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.shape, Shape::Polygon(_))
    }

    /// Outline for rendering; disks are sampled.
    pub fn outline(&self) -> Option<Vec<Point>> {
        match &self.shape {
            Shape::Box(b) if b.dim() == 2 => {
                let (a, c) = (b.sides()[0], b.sides()[1]);
                Some(vec![
                    Point::new(0.0, 0.0),
                    Point::new(a, 0.0),
                    Point::new(a, c),
                    Point::new(0.0, c),
                ])
            }
            Shape::Box(_) => None,
            Shape::Disk(d) => Some(
                (0..256)
                    .map(|k| {
                        let t = std::f64::consts::TAU * k as f64 / 256.0;
                        Point::new(d.radius() * t.cos(), d.radius() * t.sin())
                    })
                    .collect(),
            ),
            Shape::Equilateral(p, _) | Shape::Polygon(p) => Some(p.vertices().to_vec()),
        }
    }
}

/// Names of the builtin verification corpus.
pub fn builtin_corpus_names() -> Vec<String> {
    let mut v: Vec<String> = vec!["square".into()];
    for a in ["1.2", "1.5", "2", "3", "4", "5", "7", "10"] {
        v.push(format!("rect:{a}"));
    }
    for b in ["1,1,1", "2,1,0.5", "4,1,0.25", "2,2,0.25"] {
        v.push(format!("box:{b}"));
    }
    for m in 3..=12 {
        v.push(format!("mgon:{m}"));
    }
    for d in ["disk", "disk:0.5", "disk:2"] {
        v.push(d.into());
    }
    v.push("poly:0 0; 1 0; 0 1".into());
    v.push("poly:0 0; 2 0; 0 1.1547005383792515".into());
    v.push("poly:0 0; 3 0; 2 1; 1 1".into());
    v.push("poly:0 0; 2 -0.5; 3 0.5; 1.5 2; -0.5 1".into());
    v
}

/// Corpus from `builtin` or a file listing one domain per line.
pub fn corpus(spec: &str) -> Result<Vec<NamedDomain>, CliError> {
    if spec == "builtin" {
        return builtin_corpus_names().iter().map(|n| builtin(n)).collect();
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path).map_err(|source| CliError::File {
        path: spec.to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| match builtin(l) {
            Ok(d) => Ok(d),
            Err(_) => polygon_file(&base.join(l)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let s = builtin("square").unwrap();
        assert_eq!(s.summary().unwrap().area, 1.0);
        let r = builtin("rect:4").unwrap();
        match &r.shape {
            Shape::Box(b) => assert_eq!(b.sides(), &[4.0, 0.25]),
            other => panic!("{other:?}"),
        }
        assert!((builtin("disk").unwrap().summary().unwrap().area - 1.0).abs() < 1e-14);
        assert!((builtin("mgon:7").unwrap().summary().unwrap().area - 1.0).abs() < 1e-12);
        assert!(builtin("mgon:3").unwrap().is_exact());
        assert!(!builtin("mgon:5").unwrap().is_exact());
        assert_eq!(builtin("box:1,2,3").unwrap().summary().unwrap().dim, 3);
        let p = builtin("poly:0 0; 0 1; 1 0").unwrap();
        assert!((p.summary().unwrap().area - 0.5).abs() < 1e-15);
        for bad in ["mgon:2", "rect:-1", "hexagon", "poly:0 0; 1", "box:", "mgon"] {
            assert!(builtin(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn corpus_size_and_ids() {
        let c = corpus("builtin").unwrap();
        assert!(c.len() >= 30);
        let mut ids: Vec<&str> = c.iter().map(|d| d.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), c.len());
    }

    #[test]
    fn corpus_file() {
        let dir = tempfile::tempdir().unwrap();
        let poly = ConvexPolygon::unit_square().to_file_string();
        fs::write(dir.path().join("sq.poly"), poly).unwrap();
        fs::write(dir.path().join("list.txt"), "# two entries\nsq.poly\nmgon:5\n").unwrap();
        let c = corpus(dir.path().join("list.txt").to_str().unwrap()).unwrap();
        assert_eq!(c.len(), 2);
        assert!(matches!(c[0].shape, Shape::Polygon(_)));
        assert!(corpus("/nonexistent/list").is_err());
    }
}
