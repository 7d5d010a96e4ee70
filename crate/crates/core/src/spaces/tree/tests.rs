use super::tripod::{A, B, C, CENTER};
use super::*;
use crate::geometry::{cat0_slack, frechet_functional, GeodesicSpace, SampleMean, WeightedDataset};
use proptest::prelude::*;

fn w(s: &str) -> TreeWord {
    s.parse().unwrap()
}

fn wp(s: &str) -> WordPoint {
    WordPoint::vertex(w(s))
}

#[test]
fn tripod_distances() {
    let t = WeightedTree::tripod();
    let v = TreePoint::Vertex;
    assert_eq!(tree_distance(&t, &v(A), &v(B)).unwrap(), 3.0);
    assert_eq!(tree_distance(&t, &v(A), &v(C)).unwrap(), 2.0);
    let on_a = TreePoint::Edge {
        edge: 0,
        offset: 0.5,
    };
    // Half a unit in from B, so 1.5 from the centre.
    let on_b = TreePoint::Edge {
        edge: 1,
        offset: 1.5,
    };
    assert_eq!(tree_distance(&t, &on_a, &on_a).unwrap(), 0.0);
    assert_eq!(tree_distance(&t, &on_a, &on_b).unwrap(), 2.0);
}

#[test]
fn foreign_points_are_rejected() {
    let t = WeightedTree::tripod();
    assert!(tree_distance(&t, &TreePoint::Vertex(9), &TreePoint::Vertex(0)).is_err());
    assert!(tree_distance(
        &t,
        &TreePoint::Edge {
            edge: 5,
            offset: 0.1
        },
        &TreePoint::Vertex(0)
    )
    .is_err());
    assert!(tree_distance(
        &t,
        &TreePoint::Edge {
            edge: 0,
            offset: 1.5
        },
        &TreePoint::Vertex(0)
    )
    .is_err());
}

#[test]
fn invalid_trees_are_rejected() {
    assert!(WeightedTree::new(3, vec![(0, 1, 1.0).into(), (1, 0, 1.0).into()]).is_err());
    assert!(WeightedTree::new(
        4,
        vec![(0, 1, 1.0).into(), (1, 2, 1.0).into(), (2, 0, 1.0).into()]
    )
    .is_err());
    assert!(WeightedTree::new(2, vec![(0, 1, 0.0).into()]).is_err());
    assert_eq!(WeightedTree::tripod().max_degree(), 3);
}

#[test]
fn tripod_interpolation() {
    let t = WeightedTree::tripod();
    let (a, b) = (TreePoint::Vertex(A), TreePoint::Vertex(B));
    assert_eq!(tree_interpolate(&t, &a, &b, 0.0).unwrap(), a);
    assert_eq!(tree_interpolate(&t, &a, &b, 1.0).unwrap(), b);
    assert_eq!(
        tree_interpolate(&t, &a, &b, 1.0 / 3.0).unwrap(),
        TreePoint::Vertex(CENTER)
    );
    let p = tree_interpolate(&t, &a, &b, 0.5).unwrap();
    assert_eq!(
        p,
        TreePoint::Edge {
            edge: 1,
            offset: 0.5
        }
    );
}

#[test]
fn endpoint_offsets_canonicalise() {
    let t = WeightedTree::tripod();
    assert_eq!(
        t.canonicalize(TreePoint::Edge {
            edge: 1,
            offset: 2.0
        }),
        TreePoint::Vertex(B)
    );
    assert_eq!(
        t.canonicalize(TreePoint::Edge {
            edge: 1,
            offset: 0.0
        }),
        TreePoint::Vertex(CENTER)
    );
}

#[test]
fn tripod_means() {
    let t = WeightedTree::tripod();
    let v = TreePoint::Vertex;
    let data = WeightedDataset::uniform(vec![v(A), v(B), v(C)]).unwrap();
    assert_eq!(tree_frechet_mean(&t, &data).unwrap(), v(CENTER));

    let data = WeightedDataset::new(vec![v(CENTER), v(B)], vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
    let m = tree_frechet_mean(&t, &data).unwrap();
    assert!((tree_distance(&t, &m, &v(CENTER)).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((tree_distance(&t, &m, &v(B)).unwrap() - 4.0 / 3.0).abs() < 1e-12);

    let data = WeightedDataset::uniform(vec![v(C); 3]).unwrap();
    assert_eq!(tree_frechet_mean(&t, &data).unwrap(), v(C));
}

#[test]
fn fixture_parsing() {
    let (tree, pts) = TreeFixture::from_json(
        r#"{"edges": [[0, 1, 1.0], [1, 2, 0.5]], "points": [{"vertex": 2}, {"edge": {"edge": 0, "offset": 0.25}}]}"#,
    )
    .unwrap();
    assert_eq!(tree.n_vertices(), 3);
    assert_eq!(
        pts[1],
        TreePoint::Edge {
            edge: 0,
            offset: 0.25
        }
    );
    assert!(TreeFixture::from_json(r#"{"edges": [[0, 1, -1.0]]}"#).is_err());
    assert!(TreeFixture::from_json(r#"{"edges": [], "extra": 1}"#).is_err());
}

#[test]
fn word_examples() {
    assert_eq!(word_distance(&w(""), &w("")), 0);
    assert_eq!(word_distance(&w("0"), &w("1")), 2);
    assert_eq!(word_distance(&w("01"), &w("0")), 1);
    assert!("3".parse::<TreeWord>().is_err());
    assert!("02".parse::<TreeWord>().is_err());
    assert_eq!(w("201").to_string(), "201");
}

#[test]
fn word_interpolation_examples() {
    let (u, v) = (wp("01"), wp("1"));
    assert_eq!(word_distance(&u.below, &v.below), 3);
    assert_eq!(word_interpolate(&u, &v, 0.0).unwrap(), u);
    assert_eq!(word_interpolate(&u, &v, 1.0).unwrap(), v);
    let mid = word_interpolate(&u, &v, 0.5).unwrap();
    assert_eq!(
        mid,
        WordPoint {
            below: w("0"),
            up: 0.5
        }
    );
    assert!((point_distance(&u, &mid) - 1.5).abs() < 1e-15);

    let even = word_interpolate(&wp("000"), &wp("2"), 0.5).unwrap();
    assert!(even.is_vertex());
    assert_eq!(even.below, w("0"));
}

#[test]
fn spanning_subtree_examples() {
    let s = materialize_spanning_subtree(&[w("01")]).unwrap();
    assert_eq!(s.tree.n_vertices(), 1);

    let s = materialize_spanning_subtree(&[w("0"), w("1")]).unwrap();
    assert_eq!(s.tree.n_vertices(), 3);
    assert_eq!(
        tree_distance(&s.tree, &s.points[0], &s.points[1]).unwrap(),
        2.0
    );

    let s = materialize_spanning_subtree(&[w(""), w("000")]).unwrap();
    assert_eq!(s.tree.n_vertices(), 4);
    assert_eq!(s.tree.edges().len(), 3);
    assert!(s.tree.edges().iter().all(|e| e.weight == 1.0));
}

#[test]
fn two_point_mean_on_regular_tree_is_midpoint() {
    let data = WeightedDataset::uniform(vec![wp("011"), wp("20")]).unwrap();
    let mean = RegularTree.sample_mean(&data).unwrap();
    let mid = word_interpolate(&wp("011"), &wp("20"), 0.5).unwrap();
    assert!(point_distance(&mean, &mid) < 1e-12);
}

fn arb_word() -> impl Strategy<Value = TreeWord> {
    (0u8..3, prop::collection::vec(0u8..2, 0..8)).prop_flat_map(|(first, rest)| {
        (Just(first), Just(rest), 0usize..2).prop_map(|(first, rest, empty)| {
            if empty == 0 {
                TreeWord::origin()
            } else {
                let mut l = vec![first];
                l.extend(rest);
                TreeWord::new(l).unwrap()
            }
        })
    })
}

fn arb_word_point() -> impl Strategy<Value = WordPoint> {
    (arb_word(), 0.0f64..1.0).prop_map(|(w, up)| {
        if w.is_origin() {
            WordPoint::vertex(w)
        } else {
            WordPoint::new(w, up).unwrap()
        }
    })
}

proptest! {
    #[test]
    fn regular_tree_cat0(x in arb_word_point(), y in arb_word_point(), z in arb_word_point(), t in 0.0f64..1.0) {
        let s = cat0_slack(&RegularTree, &x, &y, &z, t).unwrap();
        prop_assert!(s >= -1e-9);
    }

    #[test]
    fn regular_tree_speed(x in arb_word_point(), y in arb_word_point(), t in 0.0f64..1.0) {
        let d = point_distance(&x, &y);
        let p = word_interpolate(&x, &y, t).unwrap();
        prop_assert!((point_distance(&x, &p) - t * d).abs() < 1e-9);
        prop_assert!((point_distance(&p, &y) - (1.0 - t) * d).abs() < 1e-9);
    }

    #[test]
    fn word_distance_matches_point_distance(a in arb_word(), b in arb_word()) {
        prop_assert_eq!(word_distance(&a, &b) as f64, point_distance(&a.clone().into(), &b.clone().into()));
    }

    #[test]
    fn spanning_subtree_preserves_distances(words in prop::collection::vec(arb_word(), 1..6)) {
        let s = materialize_spanning_subtree(&words).unwrap();
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                let d = tree_distance(&s.tree, &s.points[i], &s.points[j]).unwrap();
                prop_assert_eq!(d, word_distance(a, b) as f64);
            }
        }
    }

    #[test]
    fn regular_tree_mean_is_optimal(points in prop::collection::vec(arb_word_point(), 1..6)) {
        let data = WeightedDataset::uniform(points.clone()).unwrap();
        let mean = RegularTree.sample_mean(&data).unwrap();
        let f = frechet_functional(&RegularTree, &data, &mean).unwrap();
        for p in &points {
            prop_assert!(f <= frechet_functional(&RegularTree, &data, p).unwrap() + 1e-9);
        }
        // First-order optimality along every direction at the mean.
        for q in &points {
            if RegularTree.distance(&mean, q) > 1e-6 {
                let moved = RegularTree.interpolate(&mean, q, 1e-6 / RegularTree.distance(&mean, q));
                prop_assert!(frechet_functional(&RegularTree, &data, &moved).unwrap() >= f - 1e-12);
            }
        }
    }
}
