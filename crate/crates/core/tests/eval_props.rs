use proptest::prelude::*;

use cmtext::eval::{match_detections, polygon_iou, prf};
use cmtext::geometry::TextPolygon;

fn quad() -> impl Strategy<Value = TextPolygon> {
    (0.0..80.0f64, 0.0..80.0f64, 2.0..40.0f64, 2.0..40.0f64, -0.6..0.6f64).prop_map(|(x, y, w, h, a)| {
        let (s, c) = a.sin_cos();
        let pts: Vec<(f64, f64)> = [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)]
            .iter()
            .map(|&(u, v)| (x + c * u - s * v, y + s * u + c * v))
            .collect();
        TextPolygon::from_coords(&pts).unwrap()
    })
}

/// Ground truths in separate 100×100 cells so none can overlap.
fn disjoint_gts() -> impl Strategy<Value = Vec<TextPolygon>> {
    proptest::collection::vec((10.0..60.0f64, 10.0..60.0f64, 5.0..35.0f64, 5.0..35.0f64), 0..6).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (x, y, w, h))| {
                let (ox, oy) = ((i % 3) as f64 * 100.0, (i / 3) as f64 * 100.0);
                TextPolygon::rect(ox + x, oy + y, ox + x + w, oy + y + h).unwrap()
            })
            .collect()
    })
}

fn jittered(gts: &[TextPolygon]) -> impl Strategy<Value = Vec<TextPolygon>> {
    let n = gts.len();
    let gts = gts.to_vec();
    (
        proptest::collection::vec((0..n.max(1), -8.0..8.0f64, -8.0..8.0f64, 0.6..1.4f64), 0..8),
        proptest::collection::vec(quad(), 0..3),
    )
        .prop_map(move |(picks, extra)| {
            let mut dets: Vec<TextPolygon> = picks
                .into_iter()
                .filter(|_| n > 0)
                .map(|(i, dx, dy, k)| {
                    let b = gts[i].bbox();
                    let (w, h) = ((b.max_x - b.min_x) * k, (b.max_y - b.min_y) * k);
                    TextPolygon::rect(b.min_x + dx, b.min_y + dy, b.min_x + dx + w, b.min_y + dy + h).unwrap()
                })
                .collect();
            dets.extend(extra);
            dets
        })
}

fn max_matching(ok: &[Vec<bool>], d: usize, used: &mut [bool]) -> usize {
    if d == ok.len() {
        return 0;
    }
    let mut best = max_matching(ok, d + 1, used);
    for g in 0..used.len() {
        if ok[d][g] && !used[g] {
            used[g] = true;
            best = best.max(1 + max_matching(ok, d + 1, used));
            used[g] = false;
        }
    }
    best
}

proptest! {
    #[test]
    /// Boolean ops round intersection vertices, so identities hold to 1e-6.
    fn iou_is_symmetric_and_bounded_by_the_area_ratio(a in quad(), b in quad()) {
        let (ab, ba) = (polygon_iou(&a, &b), polygon_iou(&b, &a));
        prop_assert!((ab - ba).abs() <= 1e-6, "{ab} vs {ba}");
        prop_assert!((0.0..=1.0).contains(&ab));
        let (sa, sb) = (a.area(), b.area());
        prop_assert!(ab <= sa.min(sb) / sa.max(sb) + 1e-6);
        prop_assert!((polygon_iou(&a, &a) - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn counts_and_scores_stay_in_range(gts in disjoint_gts(), extra in proptest::collection::vec(quad(), 0..6), t in 0.1..0.9f64) {
        let r = match_detections(&extra, &gts, t);
        prop_assert!(r.tp <= extra.len().min(gts.len()));
        prop_assert_eq!(r.tp + r.fp + r.ignored_dets, extra.len());
        prop_assert_eq!(r.tp + r.fn_ + r.ignored_gts, gts.len());
        for v in [r.precision, r.recall, r.f_measure] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert_eq!(prf(r.tp, r.fp, r.fn_), (r.precision, r.recall, r.f_measure));
    }

    #[test]
    fn greedy_is_optimal_when_gts_are_disjoint((gts, dets) in disjoint_gts().prop_flat_map(|g| (Just(g.clone()), jittered(&g)))) {
        let r = match_detections(&dets, &gts, 0.5);
        let ok: Vec<Vec<bool>> = dets.iter().map(|d| gts.iter().map(|g| polygon_iou(d, g) >= 0.5).collect()).collect();
        prop_assert_eq!(r.tp, max_matching(&ok, 0, &mut vec![false; gts.len()]));
        for m in &r.matches {
            prop_assert!(m.iou >= 0.5);
        }
    }
}
