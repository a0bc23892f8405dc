use std::path::Path;
use std::process::{Command, Output};

use cgshell::geometry::chart::Domain;
use cgshell::geometry::grid::Grid;
use cgshell::io::vtk::VtkSurface;
use cgshell::linalg::Vec3;

fn run(dir: &Path, cfg: &str, args: &[&str]) -> Output {
    let path = dir.join("run.cfg");
    std::fs::write(&path, cfg).unwrap();
    Command::new(env!("CARGO_BIN_EXE_cgshell"))
        .args(["--config", path.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap()])
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn bad_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    for cfg in ["chart = plate\nbogus = 1\n", "chart = plate\ngrid.n1 = 4\n", "thickness = -1\n", "chart = plate\nchart = plate\n"] {
        let out = run(dir.path(), cfg, &["check"]);
        assert_eq!(out.status.code(), Some(1), "{cfg}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn thick_sphere_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "chart = sphere-cap\nchart.radius = 1\nchart.half_angle = 0.5\ngrid.n1 = 9\ngrid.n2 = 9\nthickness = 1.5\n";
    assert_eq!(run(dir.path(), cfg, &["check"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), cfg, &["minimize"]).status.code(), Some(2));
    let csv = std::fs::read_to_string(dir.path().join("out/admissibility.csv")).unwrap();
    assert!(csv.starts_with("quantity,value\n"));
    assert!(csv.contains("model1.pass,false"));
}

#[test]
fn tightly_rolled_plate_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::new(Domain::unit(), 33, 33).unwrap();
    // radius 0.1 roll with h = 0.5 makes one face factor negative
    let r = 0.1;
    let pts: Vec<_> = (0..grid.len())
        .map(|p| {
            let (a, b) = grid.point(p);
            Vec3([r * (a / r).sin(), b, r * (1.0 - (a / r).cos())])
        })
        .collect();
    let vtk = dir.path().join("rolled.vtk");
    VtkSurface::new("rolled", &grid, pts).write(&vtk).unwrap();
    let out = run(dir.path(), "chart = plate\nthickness = 0.5\n", &["energy", "--deformation", vtk.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("orientation violated"));
}

#[test]
fn energy_round_trips_through_vtk() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "chart = cylinder-patch\nchart.radius = 1\nchart.height = 1\ngrid.n1 = 17\ngrid.n2 = 17\nthickness = 0.05\n";
    let out = run(dir.path(), cfg, &["energy", "--densities"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let vtk = dir.path().join("out/density.vtk");
    let surf = VtkSurface::read(&vtk).unwrap();
    assert_eq!((surf.n1, surf.n2), (17, 17));
    assert!(surf.scalars[0].1.iter().all(|d| d.abs() < 1e-10));
    // feeding the written surface back gives the same energy
    let again = run(dir.path(), cfg, &["energy", "--deformation", vtk.to_str().unwrap()]);
    assert_eq!(again.stdout.iter().filter(|c| **c == b'\n').count(), 7);
    let first = String::from_utf8_lossy(&out.stdout);
    assert_eq!(first, String::from_utf8_lossy(&again.stdout));
}

#[test]
fn compare_and_loads_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "chart = sphere-cap\nchart.radius = 1\nchart.half_angle = 0.5\ngrid.n1 = 17\ngrid.n2 = 17\n";
    let out = run(dir.path(), cfg, &["compare3d", "--h-list", "0.02,0.01"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/compare3d.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * 2 * 3);
    for r in rows.iter().filter(|r| &r[1] == "natural") {
        assert!(r[5].parse::<f64>().unwrap().abs() < 1e-12, "{r:?}");
    }

    let loads = "chart = plate\nthickness = 0.2\nloads.body = 0 0 1\nloads.face_plus = 0 0 0.5\nloads.face_minus = 0 0 -0.25\n";
    let out = run(dir.path(), loads, &["loads-reduce"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/resultants.csv")).unwrap();
    let force: Vec<f64> = csv.lines().nth(1).unwrap().split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    let moment: Vec<f64> = csv.lines().nth(2).unwrap().split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    // 0.2 + 0.5 - 0.25 and 0.1 * (0.5 + 0.25)
    assert!((force[2] - 0.45).abs() < 1e-14 && (moment[2] - 0.075).abs() < 1e-14, "{force:?} {moment:?}");
}

#[test]
fn literal_model_two_reports_standalone_gap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "chart = sphere-cap\nchart.radius = 1\nchart.half_angle = 0.5\ngrid.n1 = 17\ngrid.n2 = 17\nthickness = 0.05\n";
    let out = run(dir.path(), cfg, &["--model", "2", "--constants", "paper", "energy"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/energy.csv")).unwrap();
    let gap: f64 = csv.lines().find_map(|l| l.strip_prefix("standalone_gap,")).unwrap().parse().unwrap();
    assert!(gap > 0.0);
    let out = run(dir.path(), cfg, &["--model", "2", "energy"]);
    assert!(!String::from_utf8_lossy(&out.stdout).contains("standalone_gap"));
}
