use crate::graph::{strongly_connected_components, AcceptingSet, CsrSnapshot, Edge, Orientation};

use super::Model;

/// Property locations from which an accepting cycle of the property
/// automaton is still reachable (guards ignored). Product states whose
/// property location is outside this set cannot lie on or lead to an
/// accepting cycle.
///
/// Returns `None` when the model has no property; every state is relevant.
pub fn property_relevance(model: &Model) -> Option<Vec<bool>> {
    let p = model.property_process()?;
    let n = p.states.len();
    let edges: Vec<Edge> = p
        .transitions
        .iter()
        .map(|t| (t.from as u32, t.to as u32))
        .collect();
    let snap = CsrSnapshot::from_edges(n, &edges, AcceptingSet::empty(n), Orientation::Forward);
    let (comp, count) = strongly_connected_components(&snap);

    let mut size = vec![0usize; count];
    let mut has_loop = vec![false; count];
    let mut has_accept = vec![false; count];
    for q in 0..n {
        let c = comp[q] as usize;
        size[c] += 1;
        has_loop[c] |= snap.has_self_loop(q);
        has_accept[c] |= p.accept[q];
    }

    let mut relevant: Vec<bool> = (0..n)
        .map(|q| {
            let c = comp[q] as usize;
            has_accept[c] && (size[c] > 1 || has_loop[c])
        })
        .collect();
    // backward closure over the reversed automaton
    let reverse = snap.transpose();
    let mut stack: Vec<usize> = (0..n).filter(|&q| relevant[q]).collect();
    while let Some(q) = stack.pop() {
        for &r in reverse.row(q) {
            if !relevant[r as usize] {
                relevant[r as usize] = true;
                stack.push(r as usize);
            }
        }
    }
    Some(relevant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    fn relevance(property: &str) -> Vec<bool> {
        let text = format!("process P {{ state s; init s; trans s -> s {{}} }}\n{property}\nproperty N;");
        property_relevance(&parse_model(&text).unwrap()).unwrap()
    }

    #[test]
    fn no_property_means_everything() {
        let m = parse_model("process P { state s; init s; }").unwrap();
        assert!(property_relevance(&m).is_none());
    }

    #[test]
    fn accepting_self_loop_and_its_ancestors() {
        let r = relevance(
            "process N { state a, b, acc, dead; init a; accept acc;
               trans a -> b {} trans b -> acc {} trans acc -> acc {} trans a -> dead {} trans dead -> dead {} }",
        );
        assert_eq!(r, vec![true, true, true, false]);
    }

    #[test]
    fn accepting_sink_is_irrelevant() {
        let r = relevance("process N { state a, acc; init a; accept acc; trans a -> a {} trans a -> acc {} }");
        assert_eq!(r, vec![false, false]);
    }

    #[test]
    fn accepting_location_on_a_larger_cycle() {
        let r = relevance(
            "process N { state a, b, c; init a; accept b; trans a -> b {} trans b -> c {} trans c -> b {} }",
        );
        assert_eq!(r, vec![true, true, true]);
    }
}
