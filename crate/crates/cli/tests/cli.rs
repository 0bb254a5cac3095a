use std::process::{Command, Output};

fn hypercox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercox")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn result_line(o: &Output) -> String {
    stdout(o).lines().rev().find(|l| l.starts_with("RESULT ")).unwrap_or_default().to_string()
}

#[test]
fn bundled_files_validate() {
    for name in ["tetrahedron", "cube_all2", "lambert_cube", "triangular_prism", "pyramid"] {
        let o = hypercox(&["validate", &format!("{name}.apoly")]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(result_line(&o).starts_with("RESULT validate valid"), "{name}");
    }
}

#[test]
fn exit_codes() {
    let cases: [(&[&str], i32); 8] = [
        (&["check", "lambert_cube.apoly"], 0),
        (&["check", "cube_all2.apoly"], 1),
        (&["realize", "cube_all2.apoly"], 1),
        (&["classify", "triangular_prism.apoly"], 3),
        (&["classify", "cube_all2.apoly"], 0),
        (&["volume", "triangular_prism.apoly"], 2),
        (&["validate", "no_such_file.apoly"], 2),
        (&["lob", "not-an-angle"], 2),
    ];
    for (args, code) in cases {
        let o = hypercox(args);
        assert_eq!(o.status.code(), Some(code), "{args:?}: {}", stdout(&o));
        assert!(result_line(&o).starts_with("RESULT "), "{args:?}");
    }
}

#[test]
fn rejects_bad_arguments() {
    for args in [
        &["volume", "lambert_cube.apoly", "--tol", "0"][..],
        &["volume", "lambert_cube.apoly", "--tol", "-1e-8"],
        &["circuits", "cube_all2.apoly", "--cap", "3"],
        &["pyramid-table", "--max-label", "2"],
    ] {
        let o = hypercox(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn malformed_file_is_an_input_error() {
    let dir = std::env::temp_dir().join(format!("hypercox-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.apoly");
    std::fs::write(&path, "this is not a polyhedron\n").unwrap();
    let o = hypercox(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(result_line(&o).contains("error"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["census", "cube_all2.apoly", "--max-label", "3"][..],
        &["realize", "lambert_cube.apoly"],
        &["three-threes"],
        &["circuits", "lambert_cube.apoly"],
    ] {
        let (a, b) = (hypercox(args), hypercox(args));
        assert_eq!(stdout(&a), stdout(&b), "{args:?}");
    }
}

#[test]
fn census_reports_orbits() {
    let o = hypercox(&["census", "cube_all2.apoly", "--max-label", "3", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let line = result_line(&o);
    assert!(line.contains("orbits=34"), "{line}");
    assert!(line.contains("labelings=978"), "{line}");
}

#[test]
fn angle_syntax() {
    let a = result_line(&hypercox(&["lob", "2pi/5"]));
    let b = result_line(&hypercox(&["lob", "1.2566370614359172"]));
    assert_eq!(a, b);
    let regular = hypercox(&["idealtet", "pi/3", "pi/3", "pi/3"]);
    assert!(stdout(&regular).starts_with("1.0149416"));
}
