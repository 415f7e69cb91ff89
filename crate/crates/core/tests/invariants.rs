//! Property tests: every admissible configuration keeps the discrete
//! invariants, and the audit/sweep examples behave as documented.

use miscible::config::{parse_config, InitialSpec, ScalarField, SimConfig};
use miscible::presets;
use miscible::sim;
use miscible::verify::{self, audit_run};
use proptest::prelude::*;

fn small_config(n: usize, m: f64, dl: f64, eps_cells: f64, c0: Vec<f64>, phi: [f64; 2], gravity: bool) -> SimConfig {
    let text = format!(
        "[grid]\nnx = {n}\nny = {n}\n[time]\nfinal_time = 0.05\ndt = 0.01\n\
         [fluid]\nmobility_ratio = {m}\nrho1 = 1.3\ngravity = {gravity}\n\
         [dispersion]\ndm = 1e-3\ndl = {dl}\ndt = 1e-3\n\
         [wells]\nepsilon = {}\n\
         [[wells.atoms]]\nx = 0.1\ny = 0.2\nrole = \"inject\"\nrate = 2.0\n\
         [[wells.atoms]]\nx = 0.9\ny = 0.7\nrole = \"produce\"\nrate = 1.0\nweight = 2.0\n",
        eps_cells / n as f64
    );
    let mut cfg: SimConfig = toml::from_str(&text).unwrap();
    cfg.rock.porosity = ScalarField::Checkerboard { values: phi };
    cfg.initial = InitialSpec::Table { values: c0 };
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn admissible_runs_keep_invariants(
        m in 0.5f64..20.0,
        dl in 1e-3f64..0.1,
        eps_cells in prop_oneof![Just(0.0), 2.0f64..4.0],
        seed in prop::collection::vec(0.0f64..=1.0, 36),
        phi in (0.1f64..1.0, 0.1f64..1.0),
        gravity in any::<bool>(),
    ) {
        let cfg = small_config(6, m, dl, eps_cells, seed, [phi.0, phi.1], gravity);
        let (problem, c0) = cfg.build().unwrap();
        let out = sim::run(&problem, c0, cfg.time.final_time, cfg.time.dt, &mut |_, _| {}).unwrap();
        let audit = audit_run(&problem, &out.history);
        for c in &audit.checks {
            prop_assert!(c.passed, "{} failed: worst {} tolerance {}", c.name, c.worst, c.tolerance);
        }
        // the energy bound never uses solution data
        let rhs0 = audit.rows[0].energy_rhs;
        prop_assert_eq!(rhs0, out.history[0].energy_lhs);
    }
}

#[test]
fn equilibrium_energy_is_constant() {
    let cfg = presets::preset("equilibrium").unwrap();
    let (_, _, out) = verify::run_config(&cfg).unwrap();
    let (problem, _) = cfg.build().unwrap();
    let audit = audit_run(&problem, &out.history);
    assert!(audit.passed());
    let e0 = out.history[0].energy_lhs;
    assert!(out.history.iter().all(|r| (r.energy_lhs - e0).abs() <= 1e-14 * e0));
    assert!(audit.rows.iter().all(|r| r.energy_rhs == e0));
}

#[test]
fn five_spot_mass_residual_is_small() {
    let cfg = presets::preset("quarter-five-spot-16").unwrap();
    let (problem, _, out) = verify::run_config(&cfg).unwrap();
    assert!(out.history.iter().all(|r| r.mass_residual <= 1e-10));
    assert!(audit_run(&problem, &out.history).passed());
}

#[test]
fn regularization_sweep_without_wells_is_flat() {
    let mut cfg = presets::preset("equilibrium").unwrap();
    cfg.time.final_time = 0.05;
    let h = cfg.grid().unwrap().h();
    let r = verify::regularization_sweep(&cfg, &[8.0 * h, 4.0 * h, 2.0 * h, 0.0], 2).unwrap();
    assert!(r.rows[1..].iter().all(|row| row.c_l2 == 0.0 && row.grad_p_l2 == 0.0));
    assert!(r.passed);
}

#[test]
fn regularization_sweep_rejects_bad_lists() {
    let cfg = presets::preset("quarter-five-spot-16").unwrap();
    let h = cfg.grid().unwrap().h();
    assert!(verify::regularization_sweep(&cfg, &[8.0 * h, 4.0 * h], 1).is_err());
    assert!(verify::regularization_sweep(&cfg, &[4.0 * h, 8.0 * h, 0.0], 1).is_err());
    let err = verify::regularization_sweep(&cfg, &[8.0 * h, h, 0.0], 1).unwrap_err();
    assert!(err.to_string().contains("under-resolved"));
}

#[test]
fn truncation_without_flow_has_no_effect() {
    let mut cfg = presets::preset("equilibrium").unwrap();
    cfg.fluid.gravity = false;
    cfg.time.final_time = 0.05;
    cfg.initial = InitialSpec::LeftHalf { value: 1.0 };
    let r = verify::truncation_sweep(&cfg, &[1e-6, 1e-3, 1.0], 2).unwrap();
    assert!(r.identical.iter().all(|&s| s));
    assert!(r.rows.iter().all(|row| row.c_l2 == 0.0));
}

#[test]
fn huge_cap_is_bitwise_untruncated() {
    let cfg = presets::preset("quarter-five-spot-16").unwrap();
    let r = verify::truncation_sweep(&cfg, &[1e6], 1).unwrap();
    assert!(r.rows[0].max_speed <= 10.0);
    assert_eq!(r.identical, vec![true]);
}

#[test]
fn parallel_and_serial_sweeps_agree() {
    let cfg = presets::preset("quarter-five-spot-16").unwrap();
    let a = verify::truncation_sweep(&cfg, &[0.5, 5.0], 1).unwrap();
    let b = verify::truncation_sweep(&cfg, &[0.5, 5.0], 3).unwrap();
    // rows hold NaN placeholders, so compare bit patterns
    assert_eq!(a.snapshots, b.snapshots);
    assert_eq!(a.identical, b.identical);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.c_l2.to_bits(), y.c_l2.to_bits());
        assert_eq!(x.max_speed.to_bits(), y.max_speed.to_bits());
    }
}

#[test]
fn config_round_trips_through_toml() {
    for name in presets::names() {
        let cfg = presets::preset(name).unwrap();
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }
}
