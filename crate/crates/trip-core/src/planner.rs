//! Exact solver over the compiled task.
//!
//! States are `(location, time slot, visited set)`; actions are Visit (stay
//! and pay the reversed utility), Move (spend travel slots, free), and a
//! terminal transition that pays the skip cost of every unvisited POI.
//! Best-first search on `f = g + h` with duplicate detection on the full
//! state keeps the minimum g; reopening makes the search optimal for any
//! admissible heuristic, consistent or not.
//!
//! [`oracle_solve`] is an independent Held-Karp style check: bitmask DP over
//! `(subset, last POI) -> earliest completion slot` on top of all-pairs
//! shortest travel times. It shares no code with the search.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use hashbrown::HashMap;

use crate::compile::CompiledTask;
use crate::model::{ItineraryTask, Plan, PlanStep};

/// Heuristic selection for [`solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Sum of visit costs of unvisited POIs. Admissible and consistent.
    #[default]
    H0,
    /// Like H0, but charges the skip cost for POIs that can no longer fit in
    /// the remaining horizon. Admissible, not consistent.
    H1,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub heuristic: Heuristic,
    /// Expansion cap; exceeding it aborts with `ResourceExhausted` instead of
    /// returning a silently suboptimal plan.
    pub node_cap: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            heuristic: Heuristic::H0,
            node_cap: 50_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveError {
    ResourceExhausted { expanded: u64 },
    TooManyPois { n: usize },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::ResourceExhausted { expanded } => {
                write!(f, "node cap hit after {expanded} expansions")
            }
            SolveError::TooManyPois { n } => write!(f, "{n} POIs exceed the bitmask limit of 32"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolveError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    TooLarge { n: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge { n } => write!(f, "oracle limited to 16 POIs, got {n}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OracleError {}

/// Search state: where we are, what slot it is, what has been visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SearchState {
    pub loc: u8,
    pub time_slot: u16,
    pub visited: u32,
}

/// Sum of visit costs over unvisited POIs. Lower bound on remaining cost
/// because every unvisited POI eventually pays at least its visit cost.
pub fn heuristic(state: &SearchState, compiled: &CompiledTask<'_>) -> u32 {
    let n = compiled.task().n_pois();
    (0..n)
        .filter(|&p| state.visited & (1 << p) == 0)
        .map(|p| compiled.visit_cost(p))
        .sum()
}

/// Stronger bound: unvisited POIs that cannot fit in the remaining horizon
/// (shortest travel plus visit duration exceeds `S - t`) are charged their
/// skip cost instead. Admissible but not consistent, so the search must
/// reopen closed states when it is enabled.
pub fn heuristic_strong(
    state: &SearchState,
    compiled: &CompiledTask<'_>,
    shortest_travel: &[u16],
) -> u32 {
    let task = compiled.task();
    let n = task.n_pois();
    let remaining = task.grid().total_slots() - state.time_slot;
    (0..n)
        .filter(|&p| state.visited & (1 << p) == 0)
        .map(|p| {
            let reach = shortest_travel[state.loc as usize * n + p] as u32
                + task.pois()[p].visit_slots as u32;
            if reach > remaining as u32 {
                compiled.skip_cost(p)
            } else {
                compiled.visit_cost(p)
            }
        })
        .sum()
}

/// All-pairs shortest travel times in slots (Floyd-Warshall with path
/// reconstruction). Travel matrices need not satisfy the triangle
/// inequality, so moving through an intermediate POI can be faster than the
/// direct edge.
fn shortest_paths(task: &ItineraryTask) -> (Vec<u16>, Vec<u8>) {
    let n = task.n_pois();
    let mut dist = vec![0u16; n * n];
    // next_hop[i*n+j]: first hop on a shortest path i -> j
    let mut next_hop = vec![0u8; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = task.travel_slots(i, j);
            next_hop[i * n + j] = j as u8;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i * n + k].saturating_add(dist[k * n + j]);
                if via < dist[i * n + j] {
                    dist[i * n + j] = via;
                    next_hop[i * n + j] = next_hop[i * n + k];
                }
            }
        }
    }
    (dist, next_hop)
}

#[derive(Clone, Copy, Debug)]
enum Action {
    Start,
    Visit,
    MoveTo,
}

struct Node {
    state: SearchState,
    g: u32,
    parent: u32,
    action: Action,
}

/// Find a minimum-cost (maximum-utility) valid plan. Always succeeds within
/// the node cap: the empty plan (skip everything) is a valid fallback.
///
/// Ties among equal-cost plans are broken by earlier completion slot, then
/// by the lexicographic id sequence of the visits, so output is
/// deterministic.
pub fn solve(compiled: &CompiledTask<'_>, options: &SolveOptions) -> Result<Plan, SolveError> {
    let task = compiled.task();
    let n = task.n_pois();
    if n > 32 {
        return Err(SolveError::TooManyPois { n });
    }
    let total_slots = task.grid().total_slots();
    let (sp_dist, _) = shortest_paths(task);

    let h = |state: &SearchState| -> u32 {
        match options.heuristic {
            Heuristic::H0 => heuristic(state, compiled),
            Heuristic::H1 => heuristic_strong(state, compiled, &sp_dist),
        }
    };

    let start = SearchState {
        loc: task.start_poi() as u8,
        time_slot: 0,
        visited: 0,
    };

    let mut nodes: Vec<Node> = vec![Node {
        state: start,
        g: 0,
        parent: 0,
        action: Action::Start,
    }];
    let mut best_g: HashMap<SearchState, u32> = HashMap::new();
    best_g.insert(start, 0);

    // Heap entries: (f, insertion seq, node index). The seq keeps pops
    // deterministic among equal f.
    let mut open: BinaryHeap<Reverse<(u32, u64, u32)>> = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Reverse((h(&start), seq, 0)));

    // Goal candidates: (cost, end_slot, node index of the state the terminal
    // transition fires from).
    let mut best: Option<(u32, u16, u32)> = None;
    let mut expanded = 0u64;

    while let Some(Reverse((f, _, idx))) = open.pop() {
        if let Some((best_cost, _, _)) = best {
            // h is admissible, so nothing with f > best_cost can beat or tie it.
            if f > best_cost {
                break;
            }
        }
        let (state, g) = {
            let node = &nodes[idx as usize];
            (node.state, node.g)
        };
        if best_g.get(&state).copied().unwrap_or(u32::MAX) < g {
            continue; // stale entry
        }
        expanded += 1;
        if expanded > options.node_cap {
            return Err(SolveError::ResourceExhausted { expanded });
        }

        // Terminal transition: stop here and pay skip costs for the rest.
        let skip_total: u32 = (0..n)
            .filter(|&p| state.visited & (1 << p) == 0)
            .map(|p| compiled.skip_cost(p))
            .sum();
        let goal_cost = g + skip_total;
        let candidate = (goal_cost, state.time_slot, idx);
        let replace = match &best {
            None => true,
            Some(cur) => {
                (candidate.0, candidate.1).lt(&(cur.0, cur.1))
                    || ((candidate.0, candidate.1) == (cur.0, cur.1)
                        && visit_sequence(&nodes, task, candidate.2)
                            < visit_sequence(&nodes, task, cur.2))
            }
        };
        if replace {
            best = Some(candidate);
        }

        // Visit the current location.
        let loc = state.loc as usize;
        if state.visited & (1 << loc) == 0 {
            let end = state.time_slot + task.pois()[loc].visit_slots;
            if end <= total_slots {
                let succ = SearchState {
                    loc: state.loc,
                    time_slot: end,
                    visited: state.visited | (1 << loc),
                };
                let sg = g + compiled.visit_cost(loc);
                if sg < best_g.get(&succ).copied().unwrap_or(u32::MAX) {
                    best_g.insert(succ, sg);
                    nodes.push(Node {
                        state: succ,
                        g: sg,
                        parent: idx,
                        action: Action::Visit,
                    });
                    seq += 1;
                    open.push(Reverse((sg + h(&succ), seq, nodes.len() as u32 - 1)));
                }
            }
        }

        // Move to another POI (also allowed through visited ones: the travel
        // matrix need not satisfy the triangle inequality).
        for q in 0..n {
            if q == loc {
                continue;
            }
            let end = state.time_slot + task.travel_slots(loc, q);
            if end > total_slots {
                continue;
            }
            let succ = SearchState {
                loc: q as u8,
                time_slot: end,
                visited: state.visited,
            };
            let sg = g + compiled.move_cost();
            if sg < best_g.get(&succ).copied().unwrap_or(u32::MAX) {
                best_g.insert(succ, sg);
                nodes.push(Node {
                    state: succ,
                    g: sg,
                    parent: idx,
                    action: Action::MoveTo,
                });
                seq += 1;
                open.push(Reverse((sg + h(&succ), seq, nodes.len() as u32 - 1)));
            }
        }
    }

    let (_, _, goal_idx) = best.expect("terminal transition from the start state always exists");
    Ok(reconstruct(&nodes, task, goal_idx))
}

fn visit_sequence(nodes: &[Node], task: &ItineraryTask, mut idx: u32) -> Vec<String> {
    let mut seq = Vec::new();
    loop {
        let node = &nodes[idx as usize];
        if let Action::Visit = node.action {
            seq.push(task.pois()[node.state.loc as usize].id.clone());
        }
        if let Action::Start = node.action {
            break;
        }
        idx = node.parent;
    }
    seq.reverse();
    seq
}

fn reconstruct(nodes: &[Node], task: &ItineraryTask, goal_idx: u32) -> Plan {
    let mut chain = Vec::new();
    let mut idx = goal_idx;
    loop {
        chain.push(idx);
        if let Action::Start = nodes[idx as usize].action {
            break;
        }
        idx = nodes[idx as usize].parent;
    }
    chain.reverse();

    let mut steps = Vec::new();
    for pair in chain.windows(2) {
        let prev = &nodes[pair[0] as usize];
        let node = &nodes[pair[1] as usize];
        match node.action {
            Action::Visit => steps.push(PlanStep::Visit {
                poi: task.pois()[node.state.loc as usize].id.clone(),
                start_slot: prev.state.time_slot,
                end_slot: node.state.time_slot,
            }),
            Action::MoveTo => steps.push(PlanStep::Move {
                from: task.pois()[prev.state.loc as usize].id.clone(),
                to: task.pois()[node.state.loc as usize].id.clone(),
                start_slot: prev.state.time_slot,
                end_slot: node.state.time_slot,
            }),
            Action::Start => unreachable!(),
        }
    }
    Plan::new(task.city().into(), steps)
}

/// Independent exact optimum by bitmask dynamic programming.
///
/// `dp[mask][last]` is the earliest slot at which the visit of `last`
/// completes with `mask` as the exact visited set; transitions use
/// all-pairs shortest travel times. Returns the maximum achievable utility
/// and one witness plan (moves expanded into single-edge hops).
pub fn oracle_solve(task: &ItineraryTask) -> Result<(u32, Plan), OracleError> {
    let n = task.n_pois();
    if n > 16 {
        return Err(OracleError::TooLarge { n });
    }
    let total_slots = task.grid().total_slots();
    let (dist, next_hop) = shortest_paths(task);
    let start = task.start_poi();

    const INF: u16 = u16::MAX;
    let size = 1usize << n;
    let mut dp = vec![INF; size * n];
    let mut parent = vec![u8::MAX; size * n]; // previous `last`, MAX = initial

    for p in 0..n {
        let t = dist[start * n + p] + task.pois()[p].visit_slots;
        if t <= total_slots {
            dp[(1 << p) * n + p] = t;
        }
    }
    for mask in 1..size {
        for last in 0..n {
            let t = dp[mask * n + last];
            if t == INF || mask & (1 << last) == 0 {
                continue;
            }
            for q in 0..n {
                if mask & (1 << q) != 0 {
                    continue;
                }
                let arrive = t
                    .saturating_add(dist[last * n + q])
                    .saturating_add(task.pois()[q].visit_slots);
                if arrive <= total_slots {
                    let key = (mask | (1 << q)) * n + q;
                    if arrive < dp[key] {
                        dp[key] = arrive;
                        parent[key] = last as u8;
                    }
                }
            }
        }
    }

    let mut best_utility = 0u32;
    let mut best_state: Option<(usize, usize)> = None; // (mask, last)
    let mut best_end = 0u16;
    for mask in 1..size {
        let utility: u32 = (0..n)
            .filter(|&p| mask & (1 << p) != 0)
            .map(|p| task.pois()[p].utility)
            .sum();
        for last in 0..n {
            let t = dp[mask * n + last];
            if t == INF {
                continue;
            }
            let better = utility > best_utility
                || (utility == best_utility && (best_state.is_none() || t < best_end));
            if better {
                best_utility = utility;
                best_state = Some((mask, last));
                best_end = t;
            }
        }
    }

    let Some((mut mask, mut last)) = best_state else {
        return Ok((0, Plan::empty(task.city().into())));
    };

    // Unwind the visit order.
    let mut order = Vec::new();
    loop {
        order.push(last);
        let prev = parent[mask * n + last];
        if prev == u8::MAX {
            break;
        }
        mask &= !(1 << last);
        last = prev as usize;
    }
    order.reverse();

    // Expand into timed steps, routing each leg along its shortest path.
    let mut steps = Vec::new();
    let mut at = start;
    let mut t = 0u16;
    for &target in &order {
        while at != target {
            let hop = next_hop[at * n + target] as usize;
            let end = t + task.travel_slots(at, hop);
            steps.push(PlanStep::Move {
                from: task.pois()[at].id.clone(),
                to: task.pois()[hop].id.clone(),
                start_slot: t,
                end_slot: end,
            });
            at = hop;
            t = end;
        }
        let end = t + task.pois()[at].visit_slots;
        steps.push(PlanStep::Visit {
            poi: task.pois()[at].id.clone(),
            start_slot: t,
            end_slot: end,
        });
        t = end;
    }
    debug_assert!(t <= total_slots);
    Ok((best_utility, Plan::new(task.city().into(), steps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile, total_cost};
    use crate::model::{plan_utility, Poi, TimeGrid};
    use alloc::string::ToString;

    fn make_task(
        utilities: &[u32],
        visit_slots: &[u16],
        travel: &[u16],
        horizon_hours: u16,
        max_utility: u32,
    ) -> ItineraryTask {
        let n = utilities.len();
        let pois: Vec<Poi> = (0..n)
            .map(|i| Poi {
                id: alloc::format!("p{i}"),
                display_name: alloc::format!("P{i}"),
                utility: utilities[i],
                visit_slots: visit_slots[i],
            })
            .collect();
        ItineraryTask::new(
            "test".to_string(),
            TimeGrid::standard(horizon_hours).unwrap(),
            max_utility,
            pois,
            travel.to_vec(),
            0,
        )
        .unwrap()
    }

    #[test]
    fn oracle_nothing_feasible() {
        // visits longer than the whole day
        let t = make_task(&[5, 5], &[40, 40], &[0, 1, 1, 0], 8, 10);
        let (u, plan) = oracle_solve(&t).unwrap();
        assert_eq!(u, 0);
        assert!(plan.steps.is_empty());
    }

    #[test]
    fn oracle_visits_all_when_fits() {
        let t = make_task(
            &[1, 1, 1],
            &[1, 1, 1],
            &[0, 1, 1, 1, 0, 1, 1, 1, 0],
            8,
            10,
        );
        let (u, plan) = oracle_solve(&t).unwrap();
        assert_eq!(u, 3);
        assert_eq!(plan.visited.len(), 3);
    }

    #[test]
    fn oracle_too_large() {
        let n = 17;
        let mut travel = vec![1u16; n * n];
        for i in 0..n {
            travel[i * n + i] = 0;
        }
        let t = make_task(&vec![1; n], &vec![1; n], &travel, 8, 10);
        assert!(matches!(
            oracle_solve(&t),
            Err(OracleError::TooLarge { n: 17 })
        ));
    }

    #[test]
    fn solve_single_poi() {
        let t = make_task(&[4], &[4], &[0], 8, 10);
        let c = compile(&t);
        let plan = solve(&c, &SolveOptions::default()).unwrap();
        assert_eq!(plan.visited.len(), 1);
        assert_eq!(plan_utility(&plan, &t).unwrap(), 4);
    }

    #[test]
    fn solve_visits_all_four_with_generous_horizon() {
        let travel = [
            0, 1, 2, 1, //
            1, 0, 1, 2, //
            2, 1, 0, 1, //
            1, 2, 1, 0,
        ];
        let t = make_task(&[5, 3, 8, 2], &[4, 2, 6, 2], &travel, 8, 10);
        let c = compile(&t);
        let plan = solve(&c, &SolveOptions::default()).unwrap();
        assert_eq!(plan.visited.len(), 4);
    }

    #[test]
    fn solve_matches_oracle_and_duality() {
        // asymmetric, triangle-violating matrix: direct p0->p2 is slower
        // than hopping through p1
        let travel = [
            0, 1, 4, //
            1, 0, 1, //
            2, 1, 0,
        ];
        let t = make_task(&[2, 9, 7], &[8, 10, 6], &travel, 8, 10);
        let c = compile(&t);
        let plan = solve(&c, &SolveOptions::default()).unwrap();
        let (oracle_u, _) = oracle_solve(&t).unwrap();
        let u = plan_utility(&plan, &t).unwrap();
        assert_eq!(u, oracle_u);
        let cost = total_cost(&plan, &c).unwrap();
        assert_eq!(cost + u, 3 * 11);
    }

    #[test]
    fn solve_deterministic() {
        let travel = [
            0, 1, 2, 1, //
            1, 0, 1, 2, //
            2, 1, 0, 1, //
            1, 2, 1, 0,
        ];
        let t = make_task(&[5, 5, 5, 5], &[4, 4, 4, 4], &travel, 5, 10);
        let c = compile(&t);
        let a = solve(&c, &SolveOptions::default()).unwrap();
        let b = solve(&c, &SolveOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn solve_no_trailing_moves() {
        let t = make_task(&[5, 1], &[2, 30], &[0, 1, 1, 0], 8, 10);
        let c = compile(&t);
        let plan = solve(&c, &SolveOptions::default()).unwrap();
        assert!(matches!(plan.steps.last(), Some(PlanStep::Visit { .. })));
    }

    #[test]
    fn h1_dominates_h0_and_both_solve_optimally() {
        let travel = [
            0, 1, 2, //
            1, 0, 1, //
            2, 1, 0,
        ];
        let t = make_task(&[3, 9, 5], &[10, 10, 10], &travel, 6, 10);
        let c = compile(&t);
        let state = SearchState {
            loc: 0,
            time_slot: 0,
            visited: 0,
        };
        let (sp, _) = shortest_paths(&t);
        assert!(heuristic_strong(&state, &c, &sp) >= heuristic(&state, &c));
        let p0 = solve(&c, &SolveOptions::default()).unwrap();
        let p1 = solve(
            &c,
            &SolveOptions {
                heuristic: Heuristic::H1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(
            plan_utility(&p0, &t).unwrap(),
            plan_utility(&p1, &t).unwrap()
        );
    }

    #[test]
    fn h1_charges_skips_when_nothing_fits() {
        let t = make_task(&[3, 9], &[2, 2], &[0, 1, 1, 0], 8, 10);
        let c = compile(&t);
        let (sp, _) = shortest_paths(&t);
        let state = SearchState {
            loc: 0,
            time_slot: t.grid().total_slots(),
            visited: 0,
        };
        // S - t = 0: both POIs pay skip cost
        assert_eq!(heuristic_strong(&state, &c, &sp), 2 * 11);
    }

    #[test]
    fn node_cap_trips() {
        let travel = [
            0, 1, 2, 1, //
            1, 0, 1, 2, //
            2, 1, 0, 1, //
            1, 2, 1, 0,
        ];
        let t = make_task(&[5, 3, 8, 2], &[4, 2, 6, 2], &travel, 8, 10);
        let c = compile(&t);
        let err = solve(
            &c,
            &SolveOptions {
                node_cap: 3,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, SolveError::ResourceExhausted { .. }));
    }
}
