use mtdc_core::grid::*;
use mtdc_core::numerics::Matrix;
use mtdc_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn defaults() -> SystemParams {
    SystemParams::default()
}

fn row(ss: &mtdc_core::lti::StateSpace, state: &str) -> usize {
    ss.state_index(state).unwrap()
}

#[test]
fn sg_swing_structure() {
    let p = defaults();
    let sg = build_sg(&p.grids[0].sg, p.base.omega_b()).unwrap();
    assert_eq!(sg.n_states(), 11);
    let (d, w) = (row(&sg, "ddelta"), row(&sg, "dwr"));
    assert!((sg.a[(d, w)] - p.base.omega_b()).abs() < 1e-12);
    assert_eq!(sg.a[(d, d)], 0.0);

    let mut heavy = p.grids[0].sg.clone();
    heavy.h *= 2.0;
    let sg2 = build_sg(&heavy, p.base.omega_b()).unwrap();
    for j in 0..11 {
        assert!((sg2.a[(w, j)] * 2.0 - sg.a[(w, j)]).abs() < 1e-12);
    }
}

#[test]
fn electromechanical_mode_in_band() {
    let p = defaults();
    for k in 0..3 {
        let g = assemble_grid(k + 1, &p.grids[k], &p.base, 0.0).unwrap();
        let ev = g.ss.spectrum().unwrap();
        let band = ev.eigenvalues.iter().any(|l| {
            let f = l.im.abs() / (2.0 * std::f64::consts::PI);
            l.re < 0.0 && (0.1..=3.0).contains(&f)
        });
        assert!(band, "grid {} has no oscillatory mode in 0.1-3 Hz", k + 1);
    }
}

#[test]
fn load_increase_depresses_frequency() {
    let p = defaults();
    for k in 0..3 {
        let g = assemble_grid(k + 1, &p.grids[k], &p.base, 0.0).unwrap();
        let dc = g.ss.dc_gain().unwrap();
        let f = g.ss.output_index(&format!("df{}", k + 1)).unwrap();
        let pl = g.ss.input_index(&format!("dPL{}", k + 1)).unwrap();
        assert!(dc[(f, pl)] < 0.0);
    }
}

#[test]
fn vsc_droop_slope_at_steady_state() {
    let p = defaults();
    let g = assemble_grid(1, &p.grids[0], &p.base, 0.0).unwrap();
    let dc = g.ss.dc_gain().unwrap();
    let idc = g.ss.input_index("dIdc1").unwrap();
    let dp = dc[(g.ss.output_index("dP1").unwrap(), idc)];
    let dv = dc[(g.ss.output_index("dVdc1").unwrap(), idc)];
    let ConverterParams::Gsvsc(v) = &p.grids[0].converter else { unreachable!() };
    assert!((dp / dv - v.r_droop).abs() < 1e-9, "slope {}", dp / dv);
}

#[test]
fn lcc_tracks_power_reference() {
    let p = defaults();
    let g = assemble_grid(3, &p.grids[2], &p.base, 0.0).unwrap();
    let dc = g.ss.dc_gain().unwrap();
    let gain = dc[(g.ss.output_index("dP3").unwrap(), g.ss.input_index("dP_ref3").unwrap())];
    assert!((gain - 1.0).abs() < 1e-9);
    assert_eq!(g.ss.n_states() - 14, 9);
}

#[test]
fn owf_is_stable_in_isolation() {
    let p = defaults();
    let owf = build_wfvsc(&p.owf, &p.base, 0.0).unwrap();
    assert_eq!(owf.n_states(), 8);
    assert!(owf.is_stable().unwrap());
}

#[test]
fn dc_network_line_states_and_equal_potential() {
    let p = defaults();
    let dc = build_dc_network(&p.dc, &p.base).unwrap();
    assert_eq!(dc.states, vec!["dIdc12", "dIdc13", "dIdc23", "dIdc34"]);
    let g = dc.dc_gain().unwrap();
    let ones = Matrix::from_element(4, 1, 1.0);
    assert!((g * ones).amax() < 1e-12);
}

#[test]
fn single_line_settles_to_ohmic_current() {
    let base = SystemBase::default();
    let net = DcNetworkParams { n_buses: 2, lines: vec![DcLine { from: 1, to: 2, length_km: 100.0 }], ..Default::default() };
    let dc = build_dc_network(&net, &base).unwrap();
    let r_pu = net.r_ohm_km * 100.0 / base.z_dc();
    let g = dc.dc_gain().unwrap();
    // net current leaving bus 1 for a unit voltage difference
    assert!((g[(0, 0)] - 1.0 / r_pu).abs() < 1e-9 / r_pu);
    assert!((g[(1, 0)] + 1.0 / r_pu).abs() < 1e-9 / r_pu);
}

#[test]
fn disconnected_dc_network_is_rejected() {
    let base = SystemBase::default();
    let net = DcNetworkParams { n_buses: 3, lines: vec![DcLine { from: 1, to: 2, length_km: 10.0 }], ..Default::default() };
    assert!(matches!(build_dc_network(&net, &base), Err(Error::Topology(_))));
}

#[test]
fn invalid_parameter_names_the_field() {
    let mut p = defaults();
    p.grids[0].sg.h = -1.0;
    match CompositePlant::build(&p) {
        Err(Error::Validation { field, .. }) => assert!(field.contains("h"), "{field}"),
        other => panic!("expected validation error, got {other:?}"),
    }
    let mut p = defaults();
    p.grids[1].sg.fhp = 1.5;
    assert!(matches!(CompositePlant::build(&p), Err(Error::Validation { .. })));
}

#[test]
fn converter_kind_mismatch_is_rejected() {
    let p = defaults();
    assert!(build_lcc(&p.grids[0].converter, &p.base, 0.0).is_err());
    assert!(build_vsc(&p.grids[2].converter, &p.base, 0.0).is_err());
}

#[test]
fn grid_channel_sets() {
    let p = defaults();
    for (k, n_r) in [(1, 3), (2, 3), (3, 2)] {
        let g = assemble_grid(k, &p.grids[k - 1], &p.base, 0.0).unwrap();
        assert_eq!(g.n_r, n_r);
        assert_eq!(g.ss.outputs, y_names(k));
        assert_eq!(&g.ss.inputs[..n_r], &r_names(k, &p.grids[k - 1].converter)[..]);
    }
    let g1 = assemble_grid(1, &p.grids[0], &p.base, 0.0).unwrap();
    assert_eq!(g1.ss.inputs[..3], ["dPg_ref1", "dP_ref1", "dVdc_ref1"]);
}

#[test]
fn composite_is_hurwitz_and_dimensioned() {
    let p = defaults();
    let plant = CompositePlant::build(&p).unwrap();
    let spec = plant.ss.spectrum().unwrap();
    assert!(spec.max_real() < 0.0, "max real part {}", spec.max_real());
    let shunt = bus_shunt_seconds(&p.dc, &p.base);
    let mut n = build_dc_network(&p.dc, &p.base).unwrap().n_states();
    n += build_wfvsc(&p.owf, &p.base, shunt[3]).unwrap().n_states();
    for k in 0..3 {
        n += assemble_grid(k + 1, &p.grids[k], &p.base, shunt[k]).unwrap().ss.n_states();
    }
    assert_eq!(plant.n_states(), n);
}

#[test]
fn input_partition_identity() {
    let plant = CompositePlant::build(&defaults()).unwrap();
    let b = plant.b_r_all();
    let sizes: Vec<usize> = plant.r_idx.iter().map(|r| r.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let r: Vec<f64> = (0..b.ncols()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let full = &b * Matrix::from_column_slice(r.len(), 1, &r);
        let mut sum = Matrix::zeros(b.nrows(), 1);
        let mut off = 0;
        for (k, &m) in sizes.iter().enumerate() {
            sum += plant.b_r(k) * Matrix::from_column_slice(m, 1, &r[off..off + m]);
            off += m;
        }
        assert_eq!(full, sum);
    }
}

#[test]
fn measurement_selectors_pick_local_and_remote_pairs() {
    let plant = CompositePlant::build(&defaults()).unwrap();
    for k in 0..3 {
        let names = plant.t_names(k);
        assert_eq!(names.len(), 6 + 2 * 2);
        assert_eq!(&names[..6], &y_names(k + 1)[..]);
        for n in &names[6..] {
            let j: usize = n[n.len() - 1..].parse().unwrap();
            assert_ne!(j, k + 1);
            assert!(n.starts_with("df") || n.starts_with("dVdc"));
        }
        let c = plant.c_t(k);
        assert_eq!(c.nrows(), 10);
        // measured outputs carry no direct feedthrough
        let d = plant.ss.d.select_rows(&plant.t_idx(k));
        assert!(d.amax() < 1e-12);
        // B_drk = [B_w, remote r]
        let bdr = plant.b_dr(k);
        assert_eq!(bdr.ncols(), 4 + (8 - plant.r_idx[k].len()));
        assert_eq!(bdr.columns(0, 4), plant.b_w());
    }
}

#[test]
fn channel_registry_is_bijective() {
    let plant = CompositePlant::build(&defaults()).unwrap();
    for names in [&plant.ss.inputs, &plant.ss.states, &plant.ss.outputs] {
        let set: std::collections::HashSet<_> = names.iter().collect();
        assert_eq!(set.len(), names.len());
    }
    for (i, n) in plant.ss.states.iter().enumerate() {
        assert_eq!(plant.ss.state_index(n), Some(i));
    }
}

#[test]
fn rebuild_is_deterministic() {
    let p = defaults();
    let a = CompositePlant::build(&p).unwrap();
    let b = CompositePlant::build(&p).unwrap();
    assert_eq!(a.ss, b.ss);
}

#[test]
fn perturbation_zero_seed_and_determinism() {
    let plant = CompositePlant::build(&defaults()).unwrap();
    let zero = perturb(&plant, &UncertaintySpec { level: 0.0, seed: 9, ..Default::default() }).unwrap();
    assert_eq!(zero.ss, plant.ss);
    let spec = UncertaintySpec { level: 0.3, seed: 11, ..Default::default() };
    let a = perturb(&plant, &spec).unwrap();
    let b = perturb(&plant, &spec).unwrap();
    assert_eq!(a.ss, b.ss);
    assert_ne!(a.ss.a, plant.ss.a);
    let c = perturb(&plant, &UncertaintySpec { seed: 12, ..spec.clone() }).unwrap();
    assert_ne!(a.ss.a, c.ss.a);
    assert!(perturb(&plant, &UncertaintySpec { level: 1.5, ..spec }).is_err());
}

#[test]
fn perturbation_groups_limit_the_affected_blocks() {
    let plant = CompositePlant::build(&defaults()).unwrap();
    let spec = UncertaintySpec { level: 0.3, seed: 3, groups: vec![UncertaintyGroup::A] };
    let p = perturb(&plant, &spec).unwrap();
    assert_ne!(p.ss.a, plant.ss.a);
    assert_eq!(p.ss.b, plant.ss.b);
    assert_eq!(p.ss.c, plant.ss.c);
}
