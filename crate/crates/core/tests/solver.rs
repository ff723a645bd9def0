use limbsynth_core::objectives::Bounds;
use limbsynth_core::rng::{substream, Purpose};
use limbsynth_core::solver::{
    convergence_iteration, init_population, pair_distance, pareto_dominates, partition, partition_sizes,
    run, run_baseline_fa, run_random_search, Evaluation, InitScheme, Individual, Problem, SolverParams, Subpop,
    Swarm, Synthetic,
};
use limbsynth_core::Error;
use proptest::prelude::*;
use rand::Rng;

/// Objectives are the coordinates themselves; cost is their sum.
struct Identity {
    bounds: Bounds,
}

impl Identity {
    fn new() -> Self {
        Identity {
            bounds: Bounds {
                lower: vec![0.0, 0.0],
                upper: vec![1.0, 1.0],
            },
        }
    }
}

impl Problem for Identity {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn objective_count(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        Evaluation {
            objectives: x.to_vec(),
            phi: x.iter().sum(),
            failed: false,
        }
    }
}

/// Shifted sphere in three dimensions, single objective.
struct Sphere {
    bounds: Bounds,
}

impl Sphere {
    fn new() -> Self {
        Sphere {
            bounds: Bounds {
                lower: vec![-1.0, -2.0, 0.0],
                upper: vec![1.0, 2.0, 3.0],
            },
        }
    }
}

impl Problem for Sphere {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn objective_count(&self) -> usize {
        1
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        let phi = (x[0] - 0.3).powi(2) + (x[1] + 0.5).powi(2) + (x[2] - 1.0).powi(2);
        Evaluation {
            objectives: vec![phi],
            phi,
            failed: false,
        }
    }
}

fn member(x: [f64; 2]) -> Individual {
    Individual {
        x: x.to_vec(),
        objectives: x.to_vec(),
        phi: x[0] + x[1],
        subpop: None,
        dominated: false,
        failed: false,
    }
}

fn small(pop: usize, max_iter: usize) -> SolverParams {
    SolverParams {
        pop,
        max_iter,
        ..SolverParams::default()
    }
}

fn objective_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop::sample::select(vec![0.0, 0.5, 1.0, 2.0]), 3)
}

proptest! {
    #[test]
    fn dominance_is_a_strict_partial_order(a in objective_vec(), b in objective_vec(), c in objective_vec()) {
        prop_assert!(!pareto_dominates(&a, &a).unwrap());
        let ab = pareto_dominates(&a, &b).unwrap();
        let ba = pareto_dominates(&b, &a).unwrap();
        prop_assert!(!(ab && ba));
        if ab && pareto_dominates(&b, &c).unwrap() {
            prop_assert!(pareto_dominates(&a, &c).unwrap());
        }
    }

    #[test]
    fn attraction_and_repulsion_decay(r1 in 0.0f64..3.0, dr in 1e-3f64..3.0) {
        let p = SolverParams::default();
        let r2 = r1 + dr;
        prop_assert!(p.attraction(r2) <= p.attraction(r1));
        prop_assert!(p.repulsion(r2) <= p.repulsion(r1));
        // Strict while the exponential term is still visible next to the floor.
        if r2 < 1.0 {
            prop_assert!(p.attraction(r2) < p.attraction(r1));
            prop_assert!(p.repulsion(r2) < p.repulsion(r1));
        }
        prop_assert!(p.attraction(r2) >= p.i_min && p.attraction(r1) <= p.i0 + p.i_min);
        prop_assert!(p.repulsion(r2) >= p.beta_min && p.repulsion(r1) <= p.beta0 + p.beta_min);
    }

    #[test]
    fn partition_is_balanced(phi in prop::collection::vec(0.0f64..10.0, 1..120)) {
        let best = phi.iter().cloned().fold(f64::INFINITY, f64::min);
        let groups = partition(&phi, best);
        let count = |g| groups.iter().filter(|&&x| x == g).count();
        let sizes = [count(Subpop::High), count(Subpop::Medium), count(Subpop::Low)];
        prop_assert_eq!(sizes, partition_sizes(phi.len()));
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let first_best = phi.iter().position(|&v| v == best).unwrap();
        prop_assert_eq!(groups[first_best], Subpop::High);
    }

    #[test]
    fn pair_distance_matches_components(a in prop::collection::vec(-5.0f64..5.0, 5), b in prop::collection::vec(-5.0f64..5.0, 5)) {
        let mut sum = 0.0;
        for k in 0..5 {
            sum += (a[k] - b[k]).powi(2);
        }
        prop_assert!((pair_distance(&a, &b) - sum.sqrt()).abs() < 1e-12);
        prop_assert_eq!(pair_distance(&a, &b), pair_distance(&b, &a));
    }

    #[test]
    fn members_stay_in_bounds(seed in 0u64..1000) {
        let problem = Sphere::new();
        let mut swarm = Swarm::new(&problem, &small(15, 20), seed).unwrap();
        for _ in 0..8 {
            swarm.step();
            for m in &swarm.members {
                prop_assert!(problem.bounds().contains(&m.x));
            }
        }
    }
}

#[test]
fn dominance_rejects_length_mismatch() {
    assert_eq!(pareto_dominates(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch(2, 1)));
}

#[test]
fn partition_ties_go_by_index() {
    let groups = partition(&[1.0; 7], 1.0);
    use Subpop::*;
    assert_eq!(groups, [High, High, High, Medium, Medium, Low, Low]);
}

#[test]
fn initial_population_is_inside_and_seeded() {
    let b = Bounds::srl();
    for scheme in [InitScheme::Stratified, InitScheme::Uniform] {
        let p = init_population(scheme, 81, &b, 5);
        assert_eq!(p.len(), 81);
        assert!(p.iter().all(|x| b.contains(x)));
        assert_eq!(p, init_population(scheme, 81, &b, 5));
        assert_ne!(p, init_population(scheme, 81, &b, 6));
    }
}

#[test]
fn no_dominance_means_no_replacement() {
    let problem = Identity::new();
    let mut swarm = Swarm::new(&problem, &small(3, 5), 0).unwrap();
    swarm.members = vec![member([0.1, 0.9]), member([0.5, 0.5]), member([0.9, 0.1])];
    let before = swarm.members.clone();
    swarm.replace_dominated();
    assert_eq!(swarm.members, before);
    assert!(swarm.centers.is_empty());
}

#[test]
fn zero_spread_replacement_copies_the_dominator() {
    let problem = Identity::new();
    let params = SolverParams {
        k_replace: 0.0,
        ..small(4, 5)
    };
    let mut swarm = Swarm::new(&problem, &params, 0).unwrap();
    swarm.members = vec![member([0.1, 0.1]), member([0.5, 0.5]), member([0.2, 0.9]), member([0.9, 0.2])];
    swarm.replace_dominated();
    assert_eq!(swarm.members[0], member([0.1, 0.1]));
    for m in &swarm.members[1..] {
        assert_eq!(m.x, vec![0.1, 0.1]);
        assert_eq!(m.objectives, vec![0.1, 0.1]);
        assert!(m.dominated);
    }
    assert_eq!(swarm.centers, vec![vec![0.5, 0.5], vec![0.2, 0.9], vec![0.9, 0.2]]);
}

#[test]
fn replacement_stays_in_bounds() {
    let problem = Identity::new();
    let params = SolverParams {
        k_replace: 5.0,
        ..small(4, 5)
    };
    for seed in 0..20 {
        let mut swarm = Swarm::new(&problem, &params, seed).unwrap();
        swarm.members = vec![member([0.0, 0.0]), member([0.5, 0.5]), member([1.0, 0.3]), member([0.2, 1.0])];
        swarm.replace_dominated();
        assert!(swarm.members.iter().all(|m| problem.bounds().contains(&m.x)));
    }
}

#[test]
fn zero_perturbation_keeps_a_collapsed_swarm_in_place() {
    let problem = Sphere::new();
    let params = SolverParams {
        alpha: 0.0,
        alpha_final: 0.0,
        ..small(4, 10)
    };
    let mut swarm = Swarm::new(&problem, &params, 9).unwrap();
    let lone = swarm.best.clone();
    swarm.members = vec![lone.clone(); 4];
    for _ in 0..5 {
        swarm.step();
    }
    assert!(swarm.members.iter().all(|m| m.x == lone.x));
}

/// One step without replacement, repulsion or groups must be the textbook
/// firefly move toward the brightest individual.
#[test]
fn step_reduces_to_plain_firefly() {
    let problem = Sphere::new();
    let params = SolverParams {
        beta0: 0.0,
        replacement: false,
        subpopulations: false,
        ..small(20, 50)
    };
    let seed = 17;
    let mut swarm = Swarm::new(&problem, &params, seed).unwrap();
    let start: Vec<Vec<f64>> = swarm.members.iter().map(|m| m.x.clone()).collect();
    let phi: Vec<f64> = swarm.members.iter().map(|m| m.phi).collect();
    let bright = (0..phi.len()).fold(0, |b, i| if phi[i] < phi[b] { i } else { b });
    swarm.step();

    let bounds = problem.bounds();
    let alpha = params.alpha_at(1);
    for (i, x) in start.iter().enumerate() {
        let mut rng = substream(seed, Purpose::Perturb, 1, i as u64);
        let beta = if i == bright {
            0.0
        } else {
            params.attraction(pair_distance(x, &start[bright]))
        };
        let mut expect: Vec<f64> = (0..3)
            .map(|d| {
                x[d] + beta * (start[bright][d] - x[d]) + alpha * (rng.gen::<f64>() - 0.5) * bounds.width(d)
            })
            .collect();
        bounds.project(&mut expect);
        for d in 0..3 {
            assert!((swarm.members[i].x[d] - expect[d]).abs() < 1e-15, "member {i} dim {d}");
        }
    }
}

#[test]
fn traces_never_increase() {
    let problem = Synthetic::default();
    let params = small(20, 40);
    let budget = params.pop * (params.max_iter + 1);
    for seed in 0..5 {
        let results = [
            run(&problem, &params, seed).unwrap(),
            run_baseline_fa(&problem, &params, seed).unwrap(),
            run_random_search(&problem, &params, budget, seed).unwrap(),
        ];
        for r in &results {
            assert_eq!(r.trace.iterations(), params.max_iter);
            assert!(r.trace.best_phi[0] <= r.trace.initial_best_phi);
            assert!(r.trace.best_phi.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*r.trace.best_phi.last().unwrap(), r.best.phi);
        }
        assert_eq!(results[2].trace.evaluations, budget);
    }
}

#[test]
fn runs_are_deterministic() {
    let problem = Sphere::new();
    let params = small(15, 25);
    assert_eq!(run(&problem, &params, 3).unwrap(), run(&problem, &params, 3).unwrap());
    assert_eq!(run_baseline_fa(&problem, &params, 3).unwrap(), run_baseline_fa(&problem, &params, 3).unwrap());
    assert_eq!(
        run_random_search(&problem, &params, 400, 3).unwrap(),
        run_random_search(&problem, &params, 400, 3).unwrap()
    );
    assert_ne!(run(&problem, &params, 3).unwrap().best.x, run(&problem, &params, 4).unwrap().best.x);
}

#[test]
fn convergence_iteration_examples() {
    assert_eq!(convergence_iteration(&[1.0, 0.5, 0.1, 0.1, 0.1], 0.2, 3), Some(3));
    assert_eq!(convergence_iteration(&[1.0, 0.5, 0.1, 0.1], 0.2, 3), None);
    assert_eq!(convergence_iteration(&[0.1; 4], 0.2, 10), None);
    assert_eq!(convergence_iteration(&[0.1, 0.3, 0.1], 0.2, 1), Some(1));
}

#[test]
fn synthetic_problem_is_solved() {
    let problem = Synthetic::default();
    let params = SolverParams {
        conv_threshold: 0.05,
        ..small(30, 100)
    };
    let budget = params.pop * (params.max_iter + 1);
    let mut ms = Vec::new();
    let mut fa = Vec::new();
    let mut rs = Vec::new();
    for seed in 0..10 {
        ms.push(run(&problem, &params, seed).unwrap().best.phi);
        fa.push(run_baseline_fa(&problem, &params, seed).unwrap().best.phi);
        rs.push(run_random_search(&problem, &params, budget, seed).unwrap().best.phi);
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        (v[4] + v[5]) / 2.0
    };
    assert!(ms.iter().all(|&p| p <= 0.05));
    let (m, f, r) = (median(&mut ms), median(&mut fa), median(&mut rs));
    assert!(m <= f && m <= r, "{m} {f} {r}");
}

#[test]
fn invalid_parameters_are_rejected() {
    let problem = Sphere::new();
    for bad in [
        SolverParams { pop: 0, ..SolverParams::default() },
        SolverParams { gamma: 0.0, ..SolverParams::default() },
        SolverParams { alpha: -0.1, ..SolverParams::default() },
        SolverParams { beta_min: f64::NAN, ..SolverParams::default() },
    ] {
        assert!(Swarm::new(&problem, &bad, 0).is_err());
    }
}
