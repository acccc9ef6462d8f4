use cfs_core::problem::describe;
use cfs_core::{builtin_examples, make_grid, BuiltinExample, Error, ExactSolution, ProblemSpec, ScalarField};
use proptest::prelude::*;

fn residual(spec: &ProblemSpec, exact: &ExactSolution, x: f64) -> f64 {
    spec.apply_operator(exact, x) + spec.reaction().eval(x) * exact.value(x) - spec.source().eval(x)
}

#[test]
fn exact_solutions_satisfy_their_problems() {
    for eps in [1e-1, 1e-2, 1e-3] {
        for spec in BuiltinExample::ALL.iter().map(|ex| ex.spec(eps).unwrap()) {
            let exact = spec.exact().unwrap();
            for k in 1..=50 {
                let x = k as f64 / 51.0;
                let scale = 1.0 + exact.second_derivative(x).abs() * spec.effective_diffusion(x);
                let r = residual(&spec, exact, x);
                assert!(r.abs() <= 1e-10 * scale, "{} eps={eps} x={x}: {r}", spec.name());
            }
            assert!((exact.value(0.0) - spec.phi_left()).abs() <= 1e-12 * spec.phi_left().abs().max(1.0));
            assert!((exact.value(1.0) - spec.phi_right()).abs() <= 1e-12 * spec.phi_right().abs().max(1.0));
        }
    }
}

#[test]
fn finite_difference_residual_is_small() {
    for spec in BuiltinExample::ALL.iter().map(|ex| ex.spec(0.1).unwrap()) {
        let exact = spec.exact().unwrap();
        let value_only = ExactSolution::new(ScalarField::from_fn({
            let exact = exact.clone();
            move |x| exact.value(x)
        }));
        for k in 1..=50 {
            let x = k as f64 / 51.0;
            let r = residual(&spec, &value_only, x);
            assert!(r.abs() <= 1e-3, "{} x={x}: {r}", spec.name());
        }
    }
}

#[test]
fn library_is_ordered_and_described() {
    let specs = builtin_examples();
    let names: Vec<&str> = specs.iter().map(|s| s.name()).collect();
    assert_eq!(names, ["ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7"]);
    for spec in &specs {
        assert!(describe(spec).contains(spec.name()));
    }
    assert_eq!(BuiltinExample::from_name("ex4"), Some(BuiltinExample::Ex4));
    assert_eq!(BuiltinExample::from_name("ex8"), None);
}

#[test]
fn shift_changes_effective_diffusion() {
    let spec = BuiltinExample::Ex3.spec(0.01).unwrap();
    assert!((spec.effective_diffusion(0.3) - 0.008).abs() < 1e-15);
    let spec = BuiltinExample::Ex1.spec(0.01).unwrap();
    assert!((spec.effective_diffusion(0.3) - 0.011).abs() < 1e-15);
}

#[test]
fn builder_rejects_nonpositive_diffusion() {
    let err = ProblemSpec::builder("bad", 0.01).mu(0.02).advection(-1.0).build().unwrap_err();
    assert!(matches!(err, Error::NonPositiveDiffusion { .. }));
    assert!(ProblemSpec::builder("bad", 0.0).build().is_err());
    assert!(ProblemSpec::builder("bad", 0.1).mu(-1.0).build().is_err());
    assert!(ProblemSpec::builder("bad", 0.1).boundary(f64::NAN, 0.0).build().is_err());
}

proptest! {
    #[test]
    fn grids_are_uniform(n in 3usize..5000) {
        let grid = make_grid(n).unwrap();
        prop_assert_eq!(grid.nodes().len(), n);
        prop_assert_eq!(grid.interfaces().len(), n - 1);
        prop_assert_eq!(grid.nodes()[0], 0.0);
        prop_assert_eq!(grid.nodes()[n - 1], 1.0);
        for (k, w) in grid.nodes().windows(2).enumerate() {
            prop_assert!((w[1] - w[0] - grid.h()).abs() <= 1e-14);
            prop_assert!((grid.interfaces()[k] - 0.5 * (w[0] + w[1])).abs() <= 1e-15);
        }
    }

    #[test]
    fn builtin_specs_valid_for_any_epsilon(idx in 0usize..7, le in -8.0f64..0.0) {
        let eps = 10f64.powf(le);
        let spec = BuiltinExample::ALL[idx].spec(eps).unwrap();
        for k in 0..=20 {
            prop_assert!(spec.effective_diffusion(k as f64 / 20.0) > 0.0);
        }
        prop_assert!(spec.phi_left().is_finite() && spec.phi_right().is_finite());
    }
}
