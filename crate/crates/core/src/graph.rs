//! Strongly connected components of small directed graphs (Tarjan, iterative).

/// Strongly connected components of the graph given as adjacency lists.
///
/// Components come out in reverse topological order of the condensation
/// (sinks first); the vertices inside each component are sorted.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;
    // (vertex, position of next edge to explore)
    let mut call_stack: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call_stack.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge)) = call_stack.last_mut() {
            if let Some(&w) = adj[v].get(*edge) {
                *edge += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }
            call_stack.pop();
            if let Some(&(parent, _)) = call_stack.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

/// Components with no edge leaving them.
pub fn absorbing_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let components = strongly_connected_components(adj);
    let mut owner = vec![0; adj.len()];
    for (c, comp) in components.iter().enumerate() {
        for &v in comp {
            owner[v] = c;
        }
    }
    components
        .iter()
        .enumerate()
        .filter(|(c, comp)| {
            comp.iter()
                .all(|&v| adj[v].iter().all(|&w| owner[w] == *c))
        })
        .map(|(_, comp)| comp.clone())
        .collect()
}
