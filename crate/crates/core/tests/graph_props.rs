mod common;

use covadj::graph::{
    ancestors, cut_incoming, cut_outgoing, descendants, latent_project, proper_causal_nodes,
};
use covadj::separation::d_separated;
use covadj::{parse_graph, NodeSet};
use proptest::prelude::*;

use common::{arb_admg, sets_from_roles};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ancestors_and_descendants_are_dual(g in arb_admg(7, 12)) {
        for v in g.nodes() {
            let de = descendants(&g, &NodeSet::from_names([v.as_str()])).unwrap();
            for w in g.nodes() {
                let an_w = ancestors(&g, &NodeSet::from_names([w.as_str()])).unwrap();
                prop_assert_eq!(de.contains(w.as_str()), an_w.contains(v.as_str()));
            }
            prop_assert!(de.contains(v.as_str()));
        }
    }

    #[test]
    fn cuts_are_idempotent_and_only_remove(g in arb_admg(7, 12), roles in prop::collection::vec(any::<bool>(), 7)) {
        let x: NodeSet = g.nodes().iter().zip(&roles).filter(|(_, &r)| r).map(|(n, _)| n.clone()).collect();
        let inc = cut_incoming(&g, &x).unwrap();
        prop_assert_eq!(&cut_incoming(&inc, &x).unwrap(), &inc);
        let out = cut_outgoing(&g, &x).unwrap();
        prop_assert_eq!(&cut_outgoing(&out, &x).unwrap(), &out);
        for (t, h) in inc.directed_edges() {
            prop_assert!(g.has_directed(t.as_str(), h.as_str()) && !x.contains(h.as_str()));
        }
        for (t, h) in out.directed_edges() {
            prop_assert!(g.has_directed(t.as_str(), h.as_str()) && !x.contains(t.as_str()));
        }
        for (a, b) in inc.bidirected_edges() {
            prop_assert!(!x.contains(a.as_str()) && !x.contains(b.as_str()));
        }
        prop_assert_eq!(out.num_bidirected(), g.num_bidirected());
    }

    #[test]
    fn projection_preserves_separation(
        g in arb_admg(7, 12),
        roles in prop::collection::vec(0u8..5, 7),
    ) {
        // role 4 marks a node to marginalize out
        let roles = &roles[..g.len()];
        let latent: NodeSet = g.nodes().iter().zip(roles).filter(|(_, &r)| r == 4).map(|(n, _)| n.clone()).collect();
        let Some((a, b, z)) = sets_from_roles(&g, roles) else { return Ok(()) };
        let p = latent_project(&g, &latent).unwrap();
        prop_assert_eq!(p.len(), g.len() - latent.len());
        prop_assert_eq!(
            d_separated(&g, &a, &b, &z).unwrap().separated,
            d_separated(&p, &a, &b, &z).unwrap().separated
        );
        // ancestral relations among observed nodes survive
        for v in p.nodes() {
            let an_g = ancestors(&g, &NodeSet::from_names([v.as_str()])).unwrap().difference(&latent);
            let an_p = ancestors(&p, &NodeSet::from_names([v.as_str()])).unwrap();
            prop_assert_eq!(an_g, an_p);
        }
    }

    #[test]
    fn proper_causal_nodes_lie_between(g in arb_admg(7, 12), roles in prop::collection::vec(0u8..3, 7)) {
        let roles = &roles[..g.len()];
        let Some((x, y, _)) = sets_from_roles(&g, roles) else { return Ok(()) };
        let pcn = proper_causal_nodes(&g, &x, &y).unwrap();
        let de_x = descendants(&g, &x).unwrap();
        let an_y = ancestors(&g, &y).unwrap();
        prop_assert!(pcn.is_subset(&de_x.intersection(&an_y)));
        // every outcome reachable from X by a directed path is included
        for v in y.iter() {
            if de_x.contains(v.as_str()) {
                prop_assert!(pcn.contains(v.as_str()));
            }
        }
    }

    #[test]
    fn text_round_trip(g in arb_admg(8, 14)) {
        prop_assert_eq!(parse_graph(&g.to_text()).unwrap(), g);
    }
}
