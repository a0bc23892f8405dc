//! Legacy VTK structured grid (ASCII) for midsurfaces.
//!
//! Coordinates are written with the shortest round-trip representation, so
//! reading a file back reproduces the nodal positions bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Result, ShellError};
use crate::geometry::grid::Grid;
use crate::linalg::Vec3;

fn bad(m: impl std::fmt::Display) -> ShellError {
    ShellError::Parse(format!("vtk: {m}"))
}

struct Tokens<'a>(Box<dyn Iterator<Item = &'a str> + 'a>);

impl<'a> Tokens<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        self.0.next().ok_or_else(|| bad(format!("unexpected end of file reading {what}")))
    }

    fn expect(&mut self, want: &str) -> Result<()> {
        let got = self.next(want)?;
        if got == want { Ok(()) } else { Err(bad(format!("expected {want}, got {got}"))) }
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let t = self.next(what)?;
        t.parse().map_err(|e| bad(format!("{what} '{t}': {e}")))
    }

    fn num(&mut self, what: &str) -> Result<f64> {
        let t = self.next(what)?;
        t.parse().map_err(|e| bad(format!("{what} '{t}': {e}")))
    }

    fn vec3(&mut self, what: &str) -> Result<Vec3<f64>> {
        Ok(Vec3([self.num(what)?, self.num(what)?, self.num(what)?]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VtkSurface {
    pub title: String,
    pub n1: usize,
    pub n2: usize,
    /// Row-major in `x₁`, matching [`Grid::index`].
    pub points: Vec<Vec3<f64>>,
    pub scalars: Vec<(String, Vec<f64>)>,
    pub vectors: Vec<(String, Vec<Vec3<f64>>)>,
}

impl VtkSurface {
    pub fn new(title: &str, grid: &Grid, points: Vec<Vec3<f64>>) -> Self {
        Self { title: title.to_string(), n1: grid.n1, n2: grid.n2, points, scalars: Vec::new(), vectors: Vec::new() }
    }

    pub fn with_scalars(mut self, name: &str, values: Vec<f64>) -> Self {
        self.scalars.push((name.to_string(), values));
        self
    }

    pub fn with_vectors(mut self, name: &str, values: Vec<Vec3<f64>>) -> Self {
        self.vectors.push((name.to_string(), values));
        self
    }

    pub fn to_vtk_string(&self) -> String {
        let mut s = String::new();
        let n = self.points.len();
        // title line must not contain newlines
        let title: String = self.title.chars().map(|c| if c == '\n' { ' ' } else { c }).collect();
        let _ = writeln!(s, "# vtk DataFile Version 3.0");
        let _ = writeln!(s, "{title}");
        let _ = writeln!(s, "ASCII");
        let _ = writeln!(s, "DATASET STRUCTURED_GRID");
        let _ = writeln!(s, "DIMENSIONS {} {} 1", self.n1, self.n2);
        let _ = writeln!(s, "POINTS {n} double");
        for p in &self.points {
            let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
        }
        if !self.scalars.is_empty() || !self.vectors.is_empty() {
            let _ = writeln!(s, "POINT_DATA {n}");
        }
        for (name, v) in &self.scalars {
            let _ = writeln!(s, "SCALARS {name} double 1");
            let _ = writeln!(s, "LOOKUP_TABLE default");
            for x in v {
                let _ = writeln!(s, "{x}");
            }
        }
        for (name, v) in &self.vectors {
            let _ = writeln!(s, "VECTORS {name} double");
            for p in v {
                let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
            }
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_vtk_string())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        if !header.starts_with("# vtk DataFile") {
            return Err(bad(format!("unexpected header '{header}'")));
        }
        let title = lines.next().unwrap_or("").to_string();
        if lines.next().map(str::trim) != Some("ASCII") {
            return Err(bad("only ASCII files are supported"));
        }
        let mut t = Tokens(Box::new(lines.flat_map(str::split_whitespace)));
        t.expect("DATASET")?;
        t.expect("STRUCTURED_GRID")?;
        t.expect("DIMENSIONS")?;
        let dims = [t.count("dimensions")?, t.count("dimensions")?, t.count("dimensions")?];
        if dims[2] != 1 {
            return Err(bad(format!("expected a surface grid, got third dimension {}", dims[2])));
        }
        t.expect("POINTS")?;
        let n = t.count("point count")?;
        if n != dims[0] * dims[1] {
            return Err(bad(format!("{n} points for dimensions {}x{}", dims[0], dims[1])));
        }
        t.next("point type")?;
        let points = (0..n).map(|_| t.vec3("coordinate")).collect::<Result<Vec<_>>>()?;
        let mut out = Self { title, n1: dims[0], n2: dims[1], points, scalars: Vec::new(), vectors: Vec::new() };
        // optional point data
        while let Some(tok) = t.0.next() {
            match tok {
                "POINT_DATA" => {
                    t.count("count")?;
                }
                "SCALARS" => {
                    let name = t.next("name")?.to_string();
                    t.next("type")?;
                    // optional component count before LOOKUP_TABLE
                    let mut tok = t.next("LOOKUP_TABLE")?;
                    if tok != "LOOKUP_TABLE" {
                        tok = t.next("LOOKUP_TABLE")?;
                    }
                    if tok != "LOOKUP_TABLE" {
                        return Err(bad(format!("expected LOOKUP_TABLE, got {tok}")));
                    }
                    t.next("table")?;
                    let v = (0..n).map(|_| t.num("scalar")).collect::<Result<_>>()?;
                    out.scalars.push((name, v));
                }
                "VECTORS" => {
                    let name = t.next("name")?.to_string();
                    t.next("type")?;
                    let v = (0..n).map(|_| t.vec3("vector")).collect::<Result<_>>()?;
                    out.vectors.push((name, v));
                }
                other => return Err(bad(format!("unsupported section '{other}'"))),
            }
        }
        Ok(out)
    }

    /// Positions checked against a grid's shape.
    pub fn into_points(self, grid: &Grid) -> Result<Vec<Vec3<f64>>> {
        if (self.n1, self.n2) != (grid.n1, grid.n2) {
            return Err(ShellError::ShapeMismatch(format!(
                "surface is {}x{}, grid is {}x{}",
                self.n1, self.n2, grid.n1, grid.n2
            )));
        }
        Ok(self.points)
    }
}
