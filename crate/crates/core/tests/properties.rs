use lengthen::asymptotics;
use lengthen::degenerate;
use lengthen::farey::{self, Slope};
use lengthen::markoff::{self, HalfTraceCoords, MarkoffMap, MarkoffTriple};
use lengthen::polygon::{self, Chart, LocalFrame};
use lengthen::real::{self, Real};
use proptest::prelude::*;
use rug::{Float, Integer};

const BITS: u32 = 256;

fn triple() -> impl Strategy<Value = MarkoffTriple> {
    (2.05f64..20.0, 2.05f64..20.0, 2.05f64..20.0)
        .prop_map(|(a, b, c)| MarkoffTriple::from_f64(BITS, a, b, c).unwrap())
        .prop_filter("K < 2", |t| t.commutator_trace() < 2)
}

fn coords() -> impl Strategy<Value = HalfTraceCoords> {
    (0.3f64..1.5, -1.0f64..1.0, 1.1f64..3.0).prop_map(|(l, x, y)| HalfTraceCoords::from_f64(BITS, l, x, y).unwrap())
}

fn slope_at(depth: usize) -> impl Strategy<Value = Slope> {
    let all = farey::enumerate(depth);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn rel(a: &Real, b: &Real) -> f64 {
    real::rel_err(a, b, 1.0).to_f64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn slopes_round_trip_through_text(p in -10_000i64..10_000, q in 0i64..10_000) {
        prop_assume!(Integer::from(p).gcd(&Integer::from(q)) == 1);
        let s = Slope::new(p, q).unwrap();
        prop_assert_eq!(s.to_string().parse::<Slope>().unwrap(), s);
    }

    #[test]
    fn mediants_neighbor_their_parents(s in slope_at(6)) {
        prop_assume!(!s.is_base());
        let (u, v) = farey::parents(&s).unwrap();
        prop_assert!(farey::is_neighbor(&u, &v));
        prop_assert!(farey::is_neighbor(&s, &u) && farey::is_neighbor(&s, &v));
        prop_assert_eq!(farey::det(&u, &v).abs(), 1);
    }

    #[test]
    fn neighbor_sequences_are_neighbors(s in slope_at(5), n in -6i64..6) {
        let (r0, _) = farey::neighbor_frame(&s);
        let a = farey::neighbor_sequence(&s, &r0, n).unwrap();
        let b = farey::neighbor_sequence(&s, &r0, n + 1).unwrap();
        prop_assert!(farey::is_neighbor(&s, &a) && farey::is_neighbor(&a, &b));
    }

    #[test]
    fn k_is_constant_on_the_tree(t in triple()) {
        let dev = markoff::k_constancy_check(&t, 5).unwrap();
        prop_assert!(dev.max_rel < 1e-60);
    }

    #[test]
    fn markoff_vertex_relation_holds(t in triple(), s in slope_at(5)) {
        prop_assume!(!s.is_base());
        let mut map = MarkoffMap::new(&t);
        let (u, v) = farey::parents(&s).unwrap();
        let w = farey::opposite(&u, &v, &s).unwrap();
        let lhs = map.value(&s).unwrap() + map.value(&w).unwrap();
        let rhs = map.value(&u).unwrap() * map.value(&v).unwrap();
        prop_assert!(rel(&lhs, &rhs) < 1e-60);
    }

    #[test]
    fn half_trace_coords_round_trip(c in coords()) {
        let t = c.triple().unwrap();
        let back = markoff::half_trace_coords(&t, &Slope::infinity(), &Slope::integer(0)).unwrap();
        prop_assert!(rel(&back.ell, &c.ell) < 1e-60);
        prop_assert!(rel(&back.x, &c.x) < 1e-60);
        prop_assert!(rel(&back.y, &c.y) < 1e-60);
    }

    #[test]
    fn y_exceeds_one(t in triple()) {
        for region in farey::base_slopes() {
            let index0 = farey::neighbor_frame(&region).0;
            let c = markoff::half_trace_coords(&t, &region, &index0).unwrap();
            prop_assert!(c.y > 1);
        }
    }

    #[test]
    fn basis_change_inverts(c in coords(), v in prop::array::uniform3(-5.0f64..5.0)) {
        let b = markoff::basis_change(&c).unwrap();
        let v = real::vec3(BITS, v);
        let back = b.to_lyx(&b.to_local(&v));
        let d = real::norm(&real::sub(&back, &v));
        prop_assert!(d < 1e-60);
    }

    #[test]
    fn closed_form_matches_solver(c in coords(), n in -6i64..6) {
        let t = c.triple().unwrap();
        let frame = LocalFrame::new(&t, &Slope::infinity()).unwrap();
        let closed = polygon::edge_closed_form(&c, n).unwrap();
        let solved = polygon::edge_global(&t, &c.neighbor(n)).unwrap();
        prop_assert!(real::projective_distance(&frame.to_global(&closed.lyx_minus()), solved.p_minus.coords()) < 1e-40);
        prop_assert!(real::projective_distance(&frame.to_global(&closed.lyx_plus()), solved.p_plus.coords()) < 1e-40);
    }

    #[test]
    fn endpoints_lie_on_their_line(t in triple(), s in slope_at(4)) {
        let e = polygon::edge_global(&t, &s).unwrap();
        for p in [&e.p_minus, &e.p_plus] {
            let f = real::dot(&e.line, p.coords());
            let scale = real::norm(&e.line) * real::norm(p.coords());
            prop_assert!(f.abs() <= scale * 1e-60);
        }
        prop_assert!(e.certificate < 1e-60);
    }

    #[test]
    fn polygon_is_strictly_convex(t in triple()) {
        let p = polygon::assemble(&t, 3, Chart::Octant).unwrap();
        prop_assert!(p.convexity.strictly_convex);
        prop_assert_eq!(p.edges.len(), 24);
    }

    #[test]
    fn axis_intercept_is_n(c in coords(), n in -15i64..15) {
        let v = asymptotics::axis_intercept(&c, n).unwrap();
        prop_assert!((v - n).abs() < 1e-40);
    }

    #[test]
    fn flat_lengths_obey_parallelogram_law(e in 0.5f64..3.0, f in -0.4f64..0.4, g in 0.5f64..3.0) {
        let form = degenerate::FlatTorusForm::new(real::real(BITS, e), real::real(BITS, f), real::real(BITS, g)).unwrap();
        for level in farey::crossings(4) {
            for c in level {
                let l = |s: &Slope| degenerate::flat_length(&form, s);
                let lhs = l(&c.new) + l(&c.old);
                let rhs = (l(&c.left) + l(&c.right)) * 2u32;
                prop_assert!((lhs - rhs).abs() < 1e-60);
            }
        }
    }

    #[test]
    fn neighbor_lightlike_vectors_pair_to_two(s in slope_at(7)) {
        let (u, v) = farey::neighbor_frame(&s);
        for t in [u, v] {
            prop_assert_eq!(degenerate::lightlike_vector(&s).pairing(&degenerate::lightlike_vector(&t)), 2);
        }
    }

    #[test]
    fn discriminant_is_minkowski_norm(h in prop::array::uniform3(-3.0f64..3.0)) {
        let h = real::vec3(BITS, h);
        let eta = degenerate::eta_from_values(&h[0], &h[1], &h[2]);
        let norm = Float::with_val(BITS, eta[0].square_ref()) - Float::with_val(BITS, eta[1].square_ref()) - Float::with_val(BITS, eta[2].square_ref());
        let disc = degenerate::discriminant(&h[0], &h[1], &h[2]);
        prop_assert!((disc + norm * 4u32).abs() < 1e-60);
    }

    #[test]
    fn one_pinch_sides_touch_the_parabola(y in 1.01f64..5.0) {
        let rep = degenerate::parabola_certificates(&real::real(BITS, y), -10, 10).unwrap();
        prop_assert!(rep.passes(&real::real(BITS, 1e-50)));
    }
}
