use super::*;
use crate::estimators::{geodesic_js, ShrinkageSpec, Target, Variance};
use crate::samplers::sample_gaussian;
use crate::spaces::euclidean::{Euclidean, EuclideanPoint};

fn gaussian_setup(n: usize) -> (ProductSpace<Euclidean>, ProductPoint<EuclideanPoint>) {
    let spaces = ProductSpace::uniform(Euclidean::new(1), n).unwrap();
    let theta = ProductPoint(
        (0..n)
            .map(|i| EuclideanPoint(vec![i as f64 * 0.1]))
            .collect(),
    );
    (spaces, theta)
}

fn gaussian_conditional(
    sd: f64,
) -> impl Fn(&ProductPoint<EuclideanPoint>, &mut RngStream) -> Result<ProductPoint<EuclideanPoint>> + Sync
{
    move |theta, rng| {
        theta
            .iter()
            .map(|t| sample_gaussian(t, sd, rng))
            .collect::<Result<Vec<_>>>()
            .map(ProductPoint)
    }
}

#[test]
fn compensated_sum_recovers_small_terms() {
    let xs = [1e16, 1.0, -1e16, 1.0];
    assert_eq!(compensated_sum(&xs), 2.0);
    let (m, se) = mean_and_se(&[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(m, 2.0);
    assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!(mean_and_se(&[]).is_err());
}

#[test]
fn identity_risk_is_variance() {
    let (spaces, theta) = gaussian_setup(5);
    let runner = Runner::new(2).unwrap();
    let r = mc_frequentist_risk(
        &runner,
        &spaces,
        &theta,
        gaussian_conditional(1.5),
        |x| Ok(x.clone()),
        20_000,
        3,
        "id",
    )
    .unwrap();
    assert!((r.mean_loss - 2.25).abs() < 4.0 * r.std_error, "{r:?}");
}

#[test]
fn classical_js_at_psi_has_risk_two_over_n() {
    // theta = psi = 0: risk of positive-part JS is at most 2 sigma^2 / n.
    let n = 10;
    let spaces = ProductSpace::uniform(Euclidean::new(1), n).unwrap();
    let zero = ProductPoint::replicate(&EuclideanPoint(vec![0.0]), n);
    let spec = ShrinkageSpec::james_stein(Variance::Common(1.0), Target::Fixed(zero.clone()));
    let runner = Runner::new(1).unwrap();
    let r = mc_frequentist_risk(
        &runner,
        &spaces,
        &zero,
        gaussian_conditional(1.0),
        |x| Ok(geodesic_js(&spaces, x, &spec)?.points),
        20_000,
        9,
        "js",
    )
    .unwrap();
    assert!(r.mean_loss < 0.2 + 4.0 * r.std_error, "{r:?}");
    assert!(r.mean_loss < 0.5);
}

#[test]
fn degenerate_estimator_has_zero_risk() {
    let (spaces, theta) = gaussian_setup(3);
    let runner = Runner::new(1).unwrap();
    let t = theta.clone();
    let r = mc_frequentist_risk(
        &runner,
        &spaces,
        &theta,
        gaussian_conditional(1.0),
        move |_| Ok(t.clone()),
        50,
        1,
        "z",
    )
    .unwrap();
    assert_eq!(r.mean_loss, 0.0);
    assert_eq!(r.std_error, 0.0);
}

#[test]
fn bayes_risk_of_shrinking_to_prior_mean() {
    // theta ~ N(0, 1), X | theta ~ N(theta, 1): posterior mean X / 2 has risk 1/2.
    let n = 4;
    let spaces = ProductSpace::uniform(Euclidean::new(1), n).unwrap();
    let zero = EuclideanPoint(vec![0.0]);
    let prior = |rng: &mut RngStream| {
        (0..n)
            .map(|_| sample_gaussian(&zero, 1.0, rng))
            .collect::<Result<Vec<_>>>()
            .map(ProductPoint)
    };
    let runner = Runner::new(2).unwrap();
    let half = |x: &ProductPoint<EuclideanPoint>| {
        Ok(ProductPoint(
            x.iter()
                .map(|p| EuclideanPoint(vec![p.0[0] / 2.0]))
                .collect(),
        ))
    };
    let r = mc_bayes_risk(
        &runner,
        &spaces,
        prior,
        gaussian_conditional(1.0),
        half,
        20_000,
        4,
        "b",
    )
    .unwrap();
    assert!((r.mean_loss - 0.5).abs() < 4.0 * r.std_error, "{r:?}");
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let (spaces, theta) = gaussian_setup(3);
    let run = |w| {
        let runner = Runner::new(w).unwrap();
        mc_frequentist_risk(
            &runner,
            &spaces,
            &theta,
            gaussian_conditional(1.0),
            |x| Ok(x.clone()),
            1000,
            7,
            "w",
        )
        .unwrap()
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.mean_loss.to_bits(), b.mean_loss.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
}

#[test]
fn table1_small_run_is_ordered() {
    let config = Table1Config {
        k_sigma2: vec![10],
        k_tau2: 15,
        distances: vec![0, 32],
        reps: 2000,
        seed: 11,
    };
    let runner = Runner::new(1).unwrap();
    let cells = run_table1(&config, &runner).unwrap();
    let get = |c: Table1Column| cells.iter().find(|x| x.column == c).unwrap().ratio;
    assert!(get(Table1Column::Distance(0)) < get(Table1Column::Distance(32)));
    assert!(get(Table1Column::Oracle) < get(Table1Column::Distance(0)));
    assert!((get(Table1Column::Identity) - 1.0).abs() < 0.1);
}

#[test]
fn experiment_spec_runs_tripod() {
    let spec: ExperimentSpec = serde_json::from_str(r#"{"experiment":"demo_tripod"}"#).unwrap();
    let out = spec.run(&Runner::new(1).unwrap()).unwrap();
    assert!(out.passed);
    let csv = render_csv(&out).unwrap();
    assert!(csv.starts_with("# experiment: demo_tripod"));
    assert!(csv.contains("tower_gap"));
}

#[test]
fn experiment_spec_rejects_unknown_fields() {
    assert!(
        serde_json::from_str::<ExperimentSpec>(r#"{"experiment":"table1","bogus":1}"#).is_err()
    );
    assert!(serde_json::from_str::<ExperimentSpec>(r#"{"experiment":"nope"}"#).is_err());
}
