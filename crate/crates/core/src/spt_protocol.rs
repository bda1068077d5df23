//! Two-round protocol for the spanning-tree polytope.
//!
//! Alice (holding `U`) sends a uniformly random `u₀ ∈ U`. Bob (holding `T`)
//! orients his tree towards `u₀` and replies with one of its `n − 1`
//! oriented edges `(x, y)` uniformly. Alice claims `n − 1` when the edge
//! leaves `U` (`x ∈ U`, `y ∉ U`) and 0 otherwise. Every vertex of `U` other
//! than `u₀` has exactly one outgoing edge, so the average claim is
//! `|U| − 1 − |T ∩ E(U)|` whichever `u₀` was picked.

use std::collections::BTreeMap;

use crate::combi::{spanning_trees, Graph, SpanningTree, SubsetMask};
use crate::error::{out_of_range, Error, Result};
use crate::exactnum::{frac, Rational};
use crate::protocol::{Dist, LayeredBP, MarkovianProtocol, Party, ProtocolParts};
use crate::slack::{spt_rows, MAX_SPT_SLACK_N};

pub fn arc_label(x: usize, y: usize) -> String {
    format!("({x},{y})")
}

/// Vertex layer then arc layer (both orientations of every edge, in edge order).
pub fn spt_layers(g: &Graph) -> (Vec<String>, Vec<(usize, usize)>) {
    let vertices = (1..=g.n()).map(|v| v.to_string()).collect();
    let arcs = g.edges().iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
    (vertices, arcs)
}

pub fn build_spt_protocol(g: &Graph) -> Result<MarkovianProtocol> {
    let n = g.n();
    if !(3..=MAX_SPT_SLACK_N).contains(&n) {
        return Err(out_of_range("n", n, format!("3..={MAX_SPT_SLACK_N}")));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let sets = spt_rows(g)?;
    let trees = spanning_trees(g)?;
    let (vertices, arcs) = spt_layers(g);
    let arc_index: BTreeMap<(usize, usize), usize> = arcs.iter().enumerate().map(|(i, &a)| (a, i)).collect();

    let init = sets
        .iter()
        .map(|u| {
            let p = frac(1, u.len() as i64);
            u.elements().map(|v| (v - 1, p.clone())).collect::<Dist>()
        })
        .collect();

    let edge_prob = frac(1, n as i64 - 1);
    let mut kernel = BTreeMap::new();
    for (t, tree) in trees.iter().enumerate() {
        for root in 1..=n {
            let d: Dist = tree
                .orient_toward(root)?
                .into_iter()
                .map(|a| (arc_index[&a], edge_prob.clone()))
                .collect();
            kernel.insert((t, root - 1), d);
        }
    }

    let claim = Rational::from(n as i64 - 1);
    let outputs = sets
        .iter()
        .map(|u| {
            arcs.iter()
                .map(|&(x, y)| {
                    if u.contains(x) && !u.contains(y) {
                        claim.clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();

    MarkovianProtocol::new(ProtocolParts {
        bp: LayeredBP::new(vec![vertices, arcs.iter().map(|&(x, y)| arc_label(x, y)).collect()])?,
        x_domain: sets.iter().map(SubsetMask::label).collect(),
        y_domain: trees.iter().map(SpanningTree::label).collect(),
        first_speaker: Party::Alice,
        claimer: Party::Alice,
        init,
        kernels: vec![kernel],
        outputs,
    })
}

/// `n(n−1)(n−2)`: live paths `(u, (x, y))` with `u ∉ {x, y}` on `K_n`.
pub fn complete_graph_width(n: usize) -> usize {
    n * (n - 1) * (n - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use crate::slack::slack_spt;

    #[test]
    fn k3_hand_traces() {
        let p = build_spt_protocol(&Graph::complete(3)).unwrap();
        assert_eq!(p.expectation_by_label("{1,2}", "{{1,2},{2,3}}").unwrap(), int(0));
        assert_eq!(p.expectation_by_label("{1,3}", "{{1,2},{2,3}}").unwrap(), int(1));
    }

    #[test]
    fn correct_on_k4_with_width_24() {
        let g = Graph::complete(4);
        let p = build_spt_protocol(&g).unwrap();
        let s = slack_spt(&g, false).unwrap();
        assert!(p.check_correct(&s.matrix).unwrap().is_correct());
        let gw = p.gamma_width();
        assert_eq!(gw.width(), 24);
        for path in &gw.paths {
            let u = path[0] + 1;
            let label = &p.bp().layer(1)[path[1]];
            assert!(!label.ends_with(&format!(",{u})")) && !label.starts_with(&format!("({u},")));
        }
    }

    #[test]
    fn zeroed_outputs_give_counterexample() {
        let g = Graph::complete(3);
        let s = slack_spt(&g, false).unwrap();
        let zero = crate::slack::SlackMatrix {
            matrix: s.matrix.scale(&Rational::zero()),
            ..s
        };
        let p = build_spt_protocol(&g).unwrap();
        assert!(!p.check_correct(&zero.matrix).unwrap().is_correct());
    }

    #[test]
    fn rejects_small_or_disconnected_graphs() {
        assert!(build_spt_protocol(&Graph::complete(2)).is_err());
        let g = Graph::new(4, [(1, 2), (3, 4)]).unwrap();
        assert_eq!(build_spt_protocol(&g).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn width_on_a_path_graph() {
        let g = Graph::new(4, [(1, 2), (2, 3), (3, 4)]).unwrap();
        let p = build_spt_protocol(&g).unwrap();
        let s = slack_spt(&g, false).unwrap();
        assert!(p.check_correct(&s.matrix).unwrap().is_correct());
        assert!(p.gamma_width().width() <= 4 * g.edges().len() * 2);
    }
}
