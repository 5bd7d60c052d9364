use std::io::Write;

use casimir_cli::{run_with, EXIT_CHECK, EXIT_CONVERGENCE, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("casimir").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn data_lines(s: &str) -> Vec<&str> {
    s.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn pressure_table() {
    let args = [
        "pressure",
        "--preset",
        "gold-default",
        "--models",
        "drude,nonlocal,plasma",
        "--a-min",
        "3",
        "--a-max",
        "5",
        "--points",
        "2",
        "--temp",
        "300",
    ];
    let (code, out, err) = run(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    let lines = data_lines(&out);
    assert_eq!(
        lines[0],
        "a_um,P_drude_Pa,P_nonlocal_Pa,P_plasma_Pa,ratio_nl_drude,ratio_pl_drude"
    );
    assert_eq!(lines.len(), 3);
    for l in &lines[1..] {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1] < 0.0 && v[1].abs() < v[2].abs() && v[2].abs() < v[3].abs());
        assert!(v[4] > 1.0 && v[5] > v[4]);
        // 9 significant digits
        assert!(l
            .split(',')
            .all(|f| f.split('e').next().unwrap().trim_start_matches('-').len() == 10));
    }
    assert!(out.contains("# temperature_K: 300"));
    let (_, again, _) = run(&args);
    assert_eq!(out, again);
}

#[test]
fn pressure_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let p = path.to_str().unwrap();
    let (code, out, err) = run(&[
        "pressure", "--models", "perfect", "--a-min", "2", "--a-max", "2", "--points", "1",
        "--temp", "1", "--format", "json", "--out", p,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["columns"][1], "P_perfect_Pa");
    let p = v["rows"][0][1].as_f64().unwrap();
    assert!((p / -8.126e-5 - 1.0).abs() < 2e-3, "{p}");
}

#[test]
fn reflectance_table() {
    let (code, out, err) = run(&[
        "reflectance",
        "--preset",
        "gold-default",
        "--theta",
        "60deg",
        "--omega-min",
        "0.1",
        "--omega-max",
        "1.0",
        "--points",
        "50",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let lines = data_lines(&out);
    assert_eq!(lines[0], "omega_eV,R_TM,R_TE,dR_TM,dR_TE");
    assert_eq!(lines.len(), 51);
    for l in &lines[1..] {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[3].abs() < 1e-2 && v[4].abs() < 1e-2);
    }
    let (code, _, _) = run(&["reflectance", "--theta", "90deg"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, err) = run(&["reflectance", "--theta", "sixty"]);
    assert_eq!(code, EXIT_USAGE, "{err}");
}

#[test]
fn kk_verify_report() {
    let (code, out, err) = run(&[
        "kk-verify",
        "--preset",
        "gold-default",
        "--kperp",
        "0.2",
        "--relations",
        "all",
        "--points",
        "10",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(v.len(), 6);
    assert!(v.iter().all(|r| r["max_residual"].as_f64().unwrap() < 1e-4));

    let (code, _, err) = run(&[
        "kk-verify",
        "--kperp",
        "0.2",
        "--points",
        "5",
        "--threshold",
        "1e-15",
    ]);
    assert_eq!(code, EXIT_CHECK);
    assert!(err.contains("residual above threshold"));

    let (code, out, _) = run(&[
        "kk-verify",
        "--kperp",
        "0,1",
        "--relations",
        "longitudinal-imag-axis",
        "--points",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_OK);
    let lines = data_lines(&out);
    assert_eq!(lines[0], "relation,kperp_eV,freq_eV,lhs,rhs,residual");
    assert_eq!(lines.len(), 9);

    let (code, _, err) = run(&["kk-verify", "--relations", "eq31"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown relation"));
}

#[test]
fn kk_quadrature_failure_is_non_convergence() {
    let (code, _, err) = run(&[
        "kk-verify",
        "--kperp",
        "0.2",
        "--points",
        "2",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(code, EXIT_CONVERGENCE, "{err}");
    assert!(err.contains("kperp = 0.2"));
}

#[test]
fn gradient_against_measurements() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "a,Fprime,sigma\n0.6,1.0e-5,1e-8\n1.0,2.5e-6,1e-8\n3.0,1e-8,1e-9"
    )
    .unwrap();
    let path = f.path().to_str().unwrap();
    let (code, out, err) = run(&[
        "gradient",
        "--preset",
        "gold-default",
        "--radius",
        "50",
        "--a-min",
        "0.6",
        "--a-max",
        "2",
        "--points",
        "30",
        "--expt",
        path,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let lines = data_lines(&out);
    assert_eq!(lines[0], "a_um,Fprime_theor,Fprime_expt,diff");
    assert_eq!(lines.len(), 3);
    let v: Vec<f64> = lines[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(v[0], 1.0);
    assert!(v[1] > 0.0);
    assert!((v[3] - (v[2] - v[1])).abs() <= 1e-8 * v[1].abs().max(v[2].abs()));

    let (code, out, err) = run(&[
        "gradient", "--radius", "5", "--a-min", "1", "--a-max", "1", "--points", "1", "--model",
        "perfect",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(data_lines(&out)[0], "a_um,Fprime_theor");
    assert!(err.contains("warning: a/R"));

    let (code, _, _) = run(&["gradient", "--radius", "50"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&[
        "gradient",
        "--radius",
        "50",
        "--delta-s",
        "-1",
        "--a-min",
        "1",
        "--a-max",
        "2",
    ]);
    assert_eq!(code, EXIT_USAGE);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "0.6,oops,1").unwrap();
    let (code, _, err) = run(&[
        "gradient",
        "--radius",
        "50",
        "--expt",
        bad.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn epsilon_tables() {
    let (code, out, err) = run(&[
        "epsilon",
        "--kperp",
        "1",
        "--freq-min",
        "0.162433",
        "--freq-max",
        "1",
        "--points",
        "2",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let lines = data_lines(&out);
    assert_eq!(
        lines[0],
        "xi_eV,eps_T_drude,eps_L_drude,eps_T_nonlocal,eps_L_nonlocal,eps_T_plasma,eps_L_plasma"
    );
    let v: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((v[3] - 3027.8).abs() < 0.1);
    let (code, out, _) = run(&[
        "epsilon", "--axis", "real", "--models", "nonlocal", "--points", "3", "--log",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(data_lines(&out)[0].starts_with("omega_eV,re_eps_T_nonlocal,im_eps_T_nonlocal"));
    let (code, _, _) = run(&["epsilon", "--models", "perfect"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn optical_data_core() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# energy n k").unwrap();
    for i in 0..200 {
        let e = 0.1 + 0.1 * i as f64;
        // Drude-like metal plus a weak absorption band near 3 eV.
        let eps = num_eps(e);
        let n = ((eps.0.hypot(eps.1) + eps.0) / 2.0).sqrt();
        let k = ((eps.0.hypot(eps.1) - eps.0) / 2.0).sqrt();
        writeln!(f, "{e} {n} {k}").unwrap();
    }
    let path = f.path().to_str().unwrap();
    let plain = run(&[
        "pressure", "--models", "drude", "--a-min", "3", "--a-max", "3", "--points", "1",
    ]);
    let cored = run(&[
        "pressure",
        "--models",
        "drude",
        "--a-min",
        "3",
        "--a-max",
        "3",
        "--points",
        "1",
        "--optical-data",
        path,
    ]);
    assert_eq!(cored.0, EXIT_OK, "{}", cored.2);
    let value = |s: &str| {
        data_lines(s)[1]
            .split(',')
            .nth(1)
            .unwrap()
            .parse::<f64>()
            .unwrap()
    };
    let (p0, p1) = (value(&plain.1), value(&cored.1));
    assert!(
        p1.abs() > p0.abs() && (p1 / p0 - 1.0).abs() < 0.05,
        "{p0} {p1}"
    );
    let (code, _, err) = run(&["reflectance", "--theta", "0.5", "--optical-data", path]);
    assert_eq!(code, EXIT_USAGE, "{err}");
    let (code, _, _) = run(&["pressure", "--optical-data", "/nonexistent/table.txt"]);
    assert_eq!(code, 1);
}

/// Drude gold plus a Lorentz band at 3 eV, as (Re ε, Im ε).
fn num_eps(e: f64) -> (f64, f64) {
    let (wp, g) = (9.0f64, 0.035f64);
    let d = wp * wp / (e * (e * e + g * g));
    let (f, w0, gl) = (1.0, 3.0, 0.5);
    let den = (w0 * w0 - e * e).powi(2) + (gl * e).powi(2);
    (
        1.0 - wp * wp / (e * e + g * g) + f * (w0 * w0 - e * e) / den,
        d * g + f * gl * e / den,
    )
}

#[test]
fn usage_and_help() {
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    assert_eq!(run(&[]).0, EXIT_USAGE);
    assert_eq!(run(&["pressure", "--bogus"]).0, EXIT_USAGE);
    let (code, _, err) = run(&["pressure", "--preset", "silver"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown preset"));
    assert_eq!(
        run(&["pressure", "--a-min", "5", "--a-max", "1"]).0,
        EXIT_USAGE
    );
    assert_eq!(run(&["pressure", "--quad-tol", "0.1"]).0, EXIT_USAGE);
    assert_eq!(run(&["pressure", "--temp", "-3"]).0, EXIT_USAGE);
}
