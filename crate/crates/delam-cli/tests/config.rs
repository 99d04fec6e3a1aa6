use delam::mesh::Case;
use delam_cli::config::RunConfig;
use delam_cli::CliError;

fn key_of(e: CliError) -> String {
    match e {
        CliError::Config { key, .. } => key,
        other => panic!("expected a config error, got {other}"),
    }
}

#[test]
fn defaults_round_trip_through_toml() {
    for case in [Case::Dcb, Case::Enf, Case::Mmb, Case::Slb] {
        let c = RunConfig::defaults(case);
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        c.resolve().unwrap();
    }
}

#[test]
fn unknown_key_is_named() {
    let e = RunConfig::from_toml("case = \"dcb\"\nelement_size = 2.0\nelemnt_size = 1.0\n").unwrap_err();
    assert!(key_of(e).contains("elemnt_size"));
}

#[test]
fn unknown_material_is_named() {
    let mut c = RunConfig::new(Case::Dcb, 2.0);
    c.material = Some("unobtainium".into());
    assert_eq!(key_of(c.resolve().unwrap_err()), "material");
}

#[test]
fn invalid_material_block_is_named() {
    let mut text = RunConfig::defaults(Case::Enf).to_toml();
    text = text.replace("[materials.im7_8552]\ne11 = ", "[materials.im7_8552]\ne11 = -");
    let c = RunConfig::from_toml(&text).unwrap();
    assert_eq!(key_of(c.resolve().unwrap_err()), "materials.im7_8552");
}

#[test]
fn out_of_range_values_are_named() {
    let mut c = RunConfig::new(Case::Dcb, 2.0);
    c.strip_width = Some(100.0);
    assert_eq!(key_of(c.resolve().unwrap_err()), "strip_width");
    let mut c = RunConfig::new(Case::Dcb, -1.0);
    assert_eq!(key_of(c.resolve().unwrap_err()), "element_size");
    c.element_size = 2.0;
    c.target_displacement = Some(0.0);
    assert_eq!(key_of(c.resolve().unwrap_err()), "target_displacement");
}

#[test]
fn output_paths_follow_the_case_and_size() {
    let r = RunConfig::new(Case::Mmb, 2.5).resolve().unwrap();
    assert_eq!(r.curve_path.to_str(), Some("mmb_2.5mm.csv"));
    assert_eq!(r.meta_path.to_str(), Some("mmb_2.5mm.meta.toml"));
    assert_eq!(r.material, "im7_8552");
}
