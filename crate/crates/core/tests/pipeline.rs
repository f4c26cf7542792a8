use fillbound::corpus::*;
use fillbound::homology::{fills_exist, minimal_mass_filling, sample_cycles};
use fillbound::nerve::SkeletonMetric;
use fillbound::pipeline::*;
use fillbound::{Chain, Simplex};

fn ctx(ci: &CorpusInstance) -> FillContext<'_, f64> {
    FillContext::new(&ci.instance, PipelineConfig::default()).unwrap()
}

/// A loop from the parent's apex down into the child's collar and back.
fn crossing_loop(ci: &CorpusInstance) -> Chain {
    let tree = &ci.instance.tree;
    let parent = tree.region("B-1-1").unwrap();
    let child = tree.region("B-2-1").unwrap();
    let neck = tree.region("N-2-1").unwrap();
    let apex = *parent.vertices.difference(&neck.vertices).next().unwrap();
    let low: Vec<usize> = child.vertices.difference(&neck.vertices).copied().collect();
    let metric = SkeletonMetric::new(&ci.instance.complex);
    let (down, _) = metric.shortest_path(apex, low[0]).unwrap();
    let (across, _) = metric.shortest_path(low[0], low[low.len() / 2]).unwrap();
    let (up, _) = metric.shortest_path(low[low.len() / 2], apex).unwrap();
    let mut walk = down;
    walk.extend(&across[1..]);
    walk.extend(&up[1..]);
    Chain::from_walk(&walk).unwrap()
}

#[test]
fn decomposition_is_exact() {
    let ci = gen_two_scale_bubble(4.0, 2).unwrap();
    let cx = ctx(&ci);
    for z in sample_cycles(&ci.instance.complex, 20, 3).into_iter().chain([crossing_loop(&ci)]) {
        let pieces = decompose_cycle(&cx, &z).unwrap();
        let mut sum = Chain::zero(1);
        for p in &pieces {
            assert!(p.cycle.is_cycle());
            sum += &p.cycle;
        }
        assert_eq!(sum, z);
    }
}

#[test]
fn loop_through_the_neck_splits_in_two() {
    let ci = gen_two_scale_bubble(4.0, 3).unwrap();
    let cx = ctx(&ci);
    let z = crossing_loop(&ci);
    let pieces = decompose_cycle(&cx, &z).unwrap();
    let bodies: Vec<&str> = pieces.iter().map(|p| p.body.as_str()).collect();
    assert_eq!(bodies, ["B-1-1", "B-2-1"]);
    let r = cx.full_fill(&z).unwrap();
    assert_eq!(r.filling.boundary().unwrap(), z);
}

#[test]
fn single_ball_has_empty_graph_chain() {
    let ci = gen_tetra_boundary(1.0).unwrap();
    assert_eq!(ci.instance.ball_count(), 1);
    let z = Chain::from_walk(&[0, 1, 2, 3, 0]).unwrap();
    let r = full_fill(&ci.instance, &z, PipelineConfig::default()).unwrap();
    assert_eq!(r.filling.boundary().unwrap(), z);
    assert!(r.trace.iter().all(|t| t.graph_length == 0));
}

#[test]
fn triangle_boundary_fills_within_its_area() {
    for scale in [0.5, 1.0, 2.0] {
        let ci = gen_tetra_boundary(scale).unwrap();
        let sigma = Simplex::new(vec![0, 1, 2]).unwrap();
        let z = Chain::from_simplex(sigma.clone(), 1).boundary().unwrap();
        let r = full_fill(&ci.instance, &z, PipelineConfig::default()).unwrap();
        assert_eq!(r.filling.boundary().unwrap(), z);
        assert!(r.mass <= ci.instance.complex.volume(&sigma).unwrap() + 1e-12);
        assert!(r.bound_holds && r.all_checks_hold());
    }
}

#[test]
fn empty_cycle_gives_empty_filling() {
    let ci = gen_two_scale_bubble(4.0, 2).unwrap();
    let r = full_fill(&ci.instance, &Chain::zero(1), PipelineConfig::default()).unwrap();
    assert!(r.filling.is_empty());
    assert_eq!(r.mass, 0.0);
}

#[test]
fn neck_generator_takes_the_neck_branch() {
    for p in [2u64, 3] {
        let ci = gen_two_scale_bubble(8.0, p).unwrap();
        let cx = ctx(&ci);
        let g = ci.neck_generator_chain().unwrap();
        match classify_fill_branch(&cx, &g, "B-2-1").unwrap() {
            FillBranch::Neck { neck, representative } => {
                assert_eq!(neck, "N-2-1");
                // what is left bounds in the child's subtree
                let child = ci.instance.complex.induced(&ci.instance.tree.region("B-2-1").unwrap().vertices);
                assert!(fills_exist(&(&g - &representative), &child).unwrap());
            }
            FillBranch::Body => panic!("generator bounds in the child"),
        }
        // p times the generator bounds inside the neck
        let neck = ci.instance.complex.induced(&ci.instance.tree.region("N-2-1").unwrap().vertices);
        assert!(!fills_exist(&g, &neck).unwrap());
        assert!(fills_exist(&g.scale(p as i64), &neck).unwrap());
        let r = cx.full_fill(&g).unwrap();
        assert_eq!(r.filling.boundary().unwrap(), g);
        assert!(r.trace.iter().any(|t| t.branch == "neck"));
    }
}

#[test]
fn tiny_neck_loop_needs_a_large_filling() {
    let ci = gen_eh_thin_neck(0.01).unwrap();
    let g = ci.neck_generator_chain().unwrap();
    let m1 = ci.instance.complex.mass(&g);
    let r = full_fill(&ci.instance, &g, PipelineConfig::default()).unwrap();
    assert!(m1 < 0.05);
    assert!(r.mass > 1000.0 * m1);
}

#[test]
fn pipeline_never_beats_the_optimum() {
    let ci = gen_flat_ball(2, 4.0).unwrap();
    let cx = ctx(&ci);
    for z in sample_cycles(&ci.instance.complex, 15, 5) {
        let r = cx.full_fill(&z).unwrap();
        let opt = minimal_mass_filling(&z, &ci.instance.complex).unwrap();
        if opt.optimal {
            assert!(r.mass >= opt.mass - 1e-9, "{} < {}", r.mass, opt.mass);
        }
    }
}

#[test]
fn every_generator_is_deterministic_and_valid() {
    for spec in standard_corpus() {
        let a = generate(&spec, 4).unwrap();
        let b = generate(&spec, 4).unwrap();
        assert_eq!(a.instance.complex, b.instance.complex);
        assert_eq!(a.instance.tree, b.instance.tree);
        for ch in a.instance.charts.values() {
            assert!(fillbound::chart::validate_chart(ch).valid, "{}", a.name());
        }
        // scales strictly decrease down the tree
        let tree = &a.instance.tree;
        for e in &tree.edges {
            assert!(tree.scale(&e.child).unwrap() < tree.scale(&e.parent).unwrap());
        }
    }
}

#[test]
fn lens_necks_satisfy_the_thickness_inequality() {
    for (p, q) in [(2u64, 1u64), (3, 1), (5, 2), (7, 3)] {
        let ci = gen_lens_neck(p, q, 2).unwrap();
        let n = ci.instance.tree.region("N-2-1").unwrap();
        let g = neck_thickness_and_diameter(&ci.instance.complex, n, BoundParams::b_of_epsilon(ci.instance.epsilon)).unwrap();
        assert!(g.holds, "p={p}: diam {} thick {}", g.diam, g.thick);
    }
}

#[test]
fn full_fill_rejects_bad_input() {
    let ci = gen_lens_neck(2, 1, 1).unwrap();
    assert!(matches!(full_fill(&ci.instance, &Chain::zero(1), PipelineConfig::default()), Err(fillbound::Error::NontrivialH1)));
    let ci = gen_tetra_boundary(1.0).unwrap();
    let open = Chain::from_walk(&[0, 1]).unwrap();
    assert!(matches!(full_fill(&ci.instance, &open, PipelineConfig::default()), Err(fillbound::Error::NotACycle)));
}
