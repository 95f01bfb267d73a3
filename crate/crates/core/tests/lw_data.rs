use rlw_core::group::{circle, GroupElement};
use rlw_core::lw_data::{
    closure, export_table, parse_family, validate, Family, Label, LwData, TableData, AXIOM_NAMES,
};
use rlw_core::Error;

fn fifths_and_sevenths() -> Vec<GroupElement> {
    vec![circle(1, 5), circle(2, 5), circle(1, 7)]
}

#[test]
fn labels_of_a_generic_degree() {
    let p = Family::p(3, 2.0);
    let ls = p.labels(&circle(1, 5)).unwrap();
    assert_eq!(ls, (0..3).map(|t| Label::new(circle(1, 5), t)).collect::<Vec<_>>());
    assert!(matches!(p.labels(&circle(1, 2)), Err(Error::Domain(_))));
}

#[test]
fn table_outside_its_slice_reports_missing_data() {
    let p = Family::p(2, 1.0);
    let table = TableData::from_file(&export_table(&p, &closure(&p, &[circle(1, 5)])).unwrap()).unwrap();
    assert!(table.has_degree(&circle(2, 5)));
    assert!(!table.has_degree(&circle(2, 7)));
    match table.labels(&circle(2, 7)) {
        Err(Error::MissingData(msg)) => assert!(msg.contains("2/7"), "{msg}"),
        other => panic!("expected missing data, got {other:?}"),
    }
}

#[test]
fn fusion_rule_of_pointed_families() {
    let degrees = [circle(1, 5), circle(2, 5), circle(3, 5), circle(4, 5), circle(1, 7)];
    for n in [1u32, 2, 3] {
        let p = Family::p(n, 2.0);
        for g1 in &degrees {
            for g2 in &degrees {
                for g3 in &degrees {
                    for (a1, a2, a3) in (0..n).flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))) {
                        let want = (&(g1 + g2) + g3).is_zero() && (a1 + a2 + a3) % n == 0;
                        let got = p
                            .delta(&Label::new(g1.clone(), a1), &Label::new(g2.clone(), a2), &Label::new(g3.clone(), a3))
                            .unwrap();
                        assert_eq!(got, u32::from(want));
                    }
                }
            }
        }
    }
    let unknown = Label::new(circle(1, 5), 7);
    let ok = Label::new(circle(1, 5), 0);
    assert!(matches!(Family::p(3, 2.0).delta(&unknown, &ok, &ok), Err(Error::MissingData(_))));
}

fn sixj_at(data: &Family, g: [GroupElement; 3]) -> (num_complex::Complex64, num_complex::Complex64) {
    // j1 + j2 = j3, j3 + j4 = j5, j6 = j2 + j4 at degree level; all tags zero.
    let l = |x: &GroupElement| Label::new(x.clone(), 0);
    let j1 = l(&g[0]);
    let j2 = l(&g[1]);
    let j3 = l(&(&g[0] + &g[1]));
    let j4 = l(&g[2]);
    let j5 = l(&(&(&g[0] + &g[1]) + &g[2]));
    let j6 = l(&(&g[1] + &g[2]));
    let inside = data.sixj([&j1, &j2, &j3, &j4, &j5, &j6], [1, 1, 1, 1]).unwrap();
    let outside = data.sixj([&j1, &j2, &j3, &j4, &j5, &j6], [2, 1, 1, 1]).unwrap();
    (inside, outside)
}

#[test]
fn sixj_values_of_the_families() {
    let g = [circle(1, 5), circle(1, 7), circle(2, 5)];
    let (p, p_out) = sixj_at(&Family::p(3, 2.0), g.clone());
    assert_eq!((p.re, p.im), (0.5, 0.0));
    assert_eq!(p_out.norm(), 0.0);
    let (m, m_out) = sixj_at(&Family::m(2, 4.0), g);
    assert_eq!((m.re, m.im), (-0.25, 0.0));
    assert_eq!(m_out.norm(), 0.0);
}

/// Right-hand side of the b recursion summed directly over I_{g1} × I_{g2}.
fn b_recursion_rhs(data: &dyn LwData, j: &Label, g1: &GroupElement, g2: &GroupElement) -> f64 {
    let jd = data.dual(j).unwrap();
    let mut s = 0.0;
    for j1 in data.labels(g1).unwrap() {
        for j2 in data.labels(g2).unwrap() {
            let d = data.delta(&jd, &j1, &j2).unwrap();
            s += data.scalars(&j1).unwrap().b * data.scalars(&j2).unwrap().b * f64::from(d);
        }
    }
    s
}

#[test]
fn scalars_satisfy_the_b_recursion() {
    let cases: [(Family, f64, f64); 2] = [(Family::p(3, 2.0), 2.0, 1.0 / 3.0), (Family::m(2, 1.0), -1.0, 0.5)];
    for (data, d, b) in cases {
        for j in data.labels(&circle(1, 5)).unwrap() {
            let s = data.scalars(&j).unwrap();
            assert_eq!((s.d, s.b, s.beta), (d, b, 1.0));
            // δ_{j* j1 j2} is nonzero only when g1 + g2 = g, here g = 1/5.
            for (g1, g2) in [(circle(1, 7), circle(2, 35)), (circle(2, 5), circle(4, 5))] {
                let rhs = b_recursion_rhs(&data, &j, &g1, &g2);
                assert!((rhs - s.b).abs() <= 1e-15, "b recursion: {rhs} vs {}", s.b);
            }
        }
    }
}

#[test]
fn gamma_and_theta_normalisation() {
    let f = Family::f(2, 1.0, 2.0);
    let (i, j) = (Label::new(circle(1, 5), 1), Label::new(circle(1, 7), 0));
    let k = Label::new((&circle(1, 5) + &circle(1, 7)).neg(), 1);
    assert_eq!(f.delta(&i, &j, &k).unwrap(), 1);
    assert_eq!(f.gamma(&i, &j, &k, 1).unwrap(), 2.0);
    let beta = f.scalars(&i).unwrap().beta;
    assert!((beta - 4f64.powf(-1.0 / 3.0)).abs() <= 1e-15);
    let (id, jd, kd) = (f.dual(&i).unwrap(), f.dual(&j).unwrap(), f.dual(&k).unwrap());
    let theta = f.gamma(&i, &j, &k, 1).unwrap()
        * f.gamma(&kd, &jd, &id, 1).unwrap()
        * [&i, &j, &k].iter().map(|x| f.scalars(x).unwrap().beta).product::<f64>();
    assert!((theta - 1.0).abs() <= 1e-15, "theta product {theta}");
    assert!(matches!(f.gamma(&i, &j, &k, 2), Err(Error::Index(_))));
    let k3 = Label::new(k.degree.clone(), 2);
    assert_eq!(Family::p(3, 2.0).gamma(&i, &j, &k3, 1).unwrap(), 1.0);
}

#[test]
fn validator_passes_a_consistent_family_exactly() {
    let p = Family::p(3, 2.0);
    let report = validate(&p, &fifths_and_sevenths(), 1e-12);
    assert!(report.passed());
    assert_eq!(report.checks.len(), AXIOM_NAMES.len());
    assert!(report.max_residual() <= 1e-15, "max residual {:e}", report.max_residual());
    assert!(report.checks.iter().all(|c| c.evaluated > 0));
}

#[test]
fn flipped_sixj_sign_breaks_the_pentagon() {
    let m = Family::m(2, 1.0);
    let slice = closure(&m, &fifths_and_sevenths());
    let mut file = export_table(&m, &slice).unwrap();
    for e in &mut file.sixj {
        e.re = e.re.abs();
    }
    let table = TableData::from_file(&file).unwrap();
    let report = validate(&table, &fifths_and_sevenths(), 1e-12);
    let pent = report.check("pentagon").unwrap();
    assert!(!pent.pass);
    let witness = pent.witness.as_deref().expect("witness");
    assert!(!witness.is_empty());
    assert!(pent.max_residual > 0.5);
}

#[test]
fn asymmetric_fusion_breaks_dihedral_symmetry() {
    let p = Family::p(2, 1.0);
    let slice = closure(&p, &[circle(1, 5)]);
    let mut file = export_table(&p, &slice).unwrap();
    let pos = file.delta.iter().position(|e| e.i != e.j).unwrap();
    file.delta.remove(pos);
    let table = TableData::from_file(&file).unwrap();
    let report = validate(&table, &[circle(1, 5)], 1e-12);
    assert!(!report.check("delta_symmetry").unwrap().pass);
    assert!(!report.passed());
}

#[test]
fn family_specs_parse() {
    assert_eq!(parse_family("P:3:2").unwrap().rank(), 3);
    assert!(parse_family("F:2:1:2").is_ok());
    for bad in ["Q:1:1", "P:0:1", "P:2", "F:2:1", "P:2:-1"] {
        assert!(parse_family(bad).is_err(), "{bad}");
    }
}
